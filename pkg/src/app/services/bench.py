"""
Segmentation benchmark: cap → durstats → score for several conditions.

The config is YAML:

    max_segment_s: 25
    conditions:
      - name: HS
        detector_segments: hs.segments
        ref: hs.ref
        hyp: hs.hyp
        cap: false
      - name: Imp_IS
        detector_segments: is.segments
        audio_dir: wav/          # or boundaries: vad.segments
        ref: is.ref
        hyp: is.hyp

Relative paths resolve against the config file's directory. A condition
whose files are missing or unreadable is reported with an ``error`` entry
and the remaining conditions still run.
"""

import logging
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.app.config import settings
from src.app.errors import FileFormatError, UsageProblem
from src.app.models import NormalizationPolicy, Segment, VadParams
from src.app.scoring import ScoringError
from src.app.segmenter import SegmentError
from src.app.services.command_runner import handler
from src.app.services.loaders import load_rules, load_segment_file, load_transcripts, prepare
from src.app.services.run_tracker import RunContext
from src.app.services.scoring_tasks import score_payload
from src.app.services.segment_tasks import cap_payload, durstats_payload, run_vad
from src.app.transcript_io import pair_transcripts
from src.app.wav_io import WavError

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ("condition", "segments", "0-15", "15-30", "30+", "mean_s", "std_s", "wer_pct")


class BenchConfigError(Exception):
    """Raised when the bench config cannot be read or validated."""


class BenchCondition(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    detector_segments: Path
    ref: Path
    hyp: Path
    boundaries: Path | None = None
    audio_dir: Path | None = None
    cap: bool = True

    @model_validator(mode="after")
    def _one_boundary_source(self) -> "BenchCondition":
        if self.boundaries is not None and self.audio_dir is not None:
            raise ValueError(f"condition {self.name!r}: give boundaries or audio_dir, not both")
        return self

    def resolved(self, base: Path) -> "BenchCondition":
        paths = {
            name: base / value
            for name in ("detector_segments", "ref", "hyp", "boundaries", "audio_dir")
            if (value := getattr(self, name)) is not None
        }
        return self.model_copy(update=paths)


class BenchConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_segment_s: float = Field(default_factory=lambda: settings.max_segment_s, gt=0)
    glm: Path | None = None
    normalize: bool = False
    format: str = "kaldi"
    vad: VadParams = Field(default_factory=VadParams)
    conditions: list[BenchCondition] = Field(default_factory=list)

    @model_validator(mode="after")
    def _unique_names(self) -> "BenchConfig":
        names = [c.name for c in self.conditions]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate condition name(s): {', '.join(duplicates)}")
        return self


def parse_bench_config(text: str, source: str | Path = "<bench>") -> BenchConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line_no = mark.line + 1 if mark is not None else None
        raise FileFormatError(source, line_no, "valid YAML", getattr(exc, "problem", None)) from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise FileFormatError(source, None, "a mapping at the top level", type(data).__name__)
    try:
        config = BenchConfig.model_validate(data)
    except ValidationError as exc:
        raise BenchConfigError(f"{source}: {exc}") from exc
    base = Path(source).parent
    return config.model_copy(
        update={
            "conditions": [c.resolved(base) for c in config.conditions],
            "glm": base / config.glm if config.glm is not None else None,
        }
    )


def _boundaries_for(ctx: RunContext, cond: BenchCondition, primary: list[Segment], params: VadParams, workers) -> list[Segment]:
    if cond.boundaries is not None:
        return load_segment_file(ctx, cond.boundaries)
    if cond.audio_dir is not None:
        rec_ids = sorted({seg.rec_id for seg in primary})
        return run_vad(ctx, [cond.audio_dir / f"{rec}.wav" for rec in rec_ids], params, workers)
    return []


def run_condition(ctx: RunContext, config: BenchConfig, cond: BenchCondition, workers: int | None = None) -> dict[str, Any]:
    """One condition's payloads, each equal to what the standalone command reports."""
    primary = load_segment_file(ctx, cond.detector_segments)
    if cond.cap:
        boundaries = _boundaries_for(ctx, cond, primary, config.vad, workers)
        cap, segments = cap_payload(primary, boundaries, config.max_segment_s)
    else:
        cap, segments = None, primary

    rules = load_rules(ctx, config.glm)
    policy = NormalizationPolicy() if config.normalize else None
    refs = prepare(load_transcripts(ctx, cond.ref, config.format), rules, policy)
    hyps = prepare(load_transcripts(ctx, cond.hyp, config.format), rules, policy)
    durations = {seg.seg_id: seg.duration_s for seg in segments if seg.seg_id is not None}
    return {
        "cap": cap,
        "durstats": durstats_payload(segments),
        "score": score_payload(pair_transcripts(refs, hyps), workers, durations),
    }


def table_rows(conditions: dict[str, dict[str, Any]]) -> list[dict[str, Any]]:
    rows = []
    for name, result in conditions.items():
        if "error" in result:
            rows.append({"condition": name, "error": result["error"]})
            continue
        stats = result["durstats"]
        rows.append(
            {
                "condition": name,
                "segments": stats["total"],
                **stats["bucket_pct_rounded"],
                "mean_s": round(stats["mean_s"], 2),
                "std_s": round(stats["std_s"], 2),
                "wer_pct": result["score"]["rate_pct"],
            }
        )
    return rows


def table_tsv(rows: list[dict[str, Any]]) -> str:
    lines = ["\t".join(TABLE_COLUMNS)]
    for row in rows:
        if "error" in row:
            lines.append(row["condition"] + "\t" + "\t".join("-" for _ in TABLE_COLUMNS[1:]))
        else:
            lines.append("\t".join(str(row[col]) for col in TABLE_COLUMNS))
    return "\n".join(lines) + "\n"


@handler("bench")
def bench_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    config = parse_bench_config(ctx.read_text(opts["config"]), opts["config"])
    if not config.conditions:
        raise UsageProblem(f"{opts['config']}: the condition list is empty")

    results: dict[str, dict[str, Any]] = {}
    for cond in config.conditions:
        try:
            results[cond.name] = run_condition(ctx, config, cond, opts.get("workers"))
        except (OSError, FileFormatError, WavError, SegmentError, ScoringError) as exc:
            logger.warning("Condition %s failed: %s", cond.name, exc)
            results[cond.name] = {"error": f"{type(exc).__name__}: {exc}"}

    rows = table_rows(results)
    if opts.get("tsv") is not None:
        ctx.write_text(opts["tsv"], table_tsv(rows))
    return {"max_segment_s": config.max_segment_s, "conditions": results, "table": rows}
