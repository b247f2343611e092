"""Readers that route every file access through the run context."""

from pathlib import Path

from src.app.glm import apply_glm, parse_glm
from src.app.models import GlmRules, NormalizationPolicy, Segment, Transcript
from src.app.segmenter import parse_segments
from src.app.services.run_tracker import RunContext
from src.app.text_normalizer import normalize
from src.app.transcript_io import parse_transcripts


def load_transcripts(ctx: RunContext, path: Path, fmt: str = "kaldi") -> list[Transcript]:
    return parse_transcripts(ctx.read_text(path), path, fmt)


def load_rules(ctx: RunContext, path: Path | None) -> GlmRules:
    if path is None:
        return GlmRules()
    return parse_glm(ctx.read_text(path), path)


def load_segment_file(ctx: RunContext, path: Path) -> list[Segment]:
    return parse_segments(ctx.read_text(path), path)


def prepare(
    transcripts: list[Transcript],
    rules: GlmRules,
    policy: NormalizationPolicy | None,
) -> list[Transcript]:
    """GLM rewrite first, then normalization when a policy is given."""
    out = [apply_glm(rules, t) for t in transcripts]
    if policy is not None:
        out = [normalize(t, policy) for t in out]
    return out
