"""Handlers for the scoring commands plus the payload builders the bench reuses."""

import logging
from pathlib import Path
from typing import Any

from src.app.alignment import align
from src.app.errors import UsageProblem
from src.app.models import AlignmentOps, ErrorCounts, NormalizationPolicy, Transcript
from src.app.scoring import (
    ScoringError,
    av_wer,
    disagreement_matrix,
    gap,
    gap_from_matrix,
    mr_wer,
    top_errors,
    wer_by_duration,
)
from src.app.services.command_runner import handler
from src.app.services.loaders import load_rules, load_segment_file, load_transcripts, prepare
from src.app.services.run_tracker import RunContext
from src.app.services.workers import ordered_map
from src.app.transcript_io import pair_transcripts

logger = logging.getLogger(__name__)


def _policy(opts: dict[str, Any]) -> NormalizationPolicy | None:
    return NormalizationPolicy() if opts.get("normalize") else None


def _align_pairs(pairs: list[tuple[Transcript, Transcript]], workers: int | None) -> list[AlignmentOps]:
    return ordered_map(lambda pair: align(*pair), pairs, workers)


def score_payload(
    pairs: list[tuple[Transcript, Transcript]],
    workers: int | None = None,
    durations: dict[str, float] | None = None,
    details: bool = True,
) -> dict[str, Any]:
    """Pooled counts, per-utterance rows (sorted by id) and optional duration buckets."""
    alignments = _align_pairs(pairs, workers)
    per_utt = [a.counts() for a in alignments]
    total = sum(per_utt, ErrorCounts.zero())
    if total.ref_len == 0:
        raise ScoringError("cannot compute WER: every reference is empty")
    payload: dict[str, Any] = {"utterance_count": len(pairs), **total.to_dict()}
    if details:
        payload["utterances"] = [
            {"utt_id": ref.utt_id, **counts.to_dict()} for (ref, _), counts in zip(pairs, per_utt)
        ]
    if durations is not None:
        payload["by_duration"] = wer_by_duration(pairs, durations)
    return payload


def _load_pairs(opts: dict[str, Any], ctx: RunContext) -> list[tuple[Transcript, Transcript]]:
    fmt = opts.get("format", "kaldi")
    rules = load_rules(ctx, opts.get("glm"))
    policy = _policy(opts)
    refs = prepare(load_transcripts(ctx, opts["ref"], fmt), rules, policy)
    hyps = prepare(load_transcripts(ctx, opts["hyp"], fmt), rules, policy)
    return pair_transcripts(refs, hyps)


@handler("score")
def score_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    pairs = _load_pairs(opts, ctx)
    durations = None
    if opts.get("segments") is not None:
        durations = {s.seg_id: s.duration_s for s in load_segment_file(ctx, opts["segments"])}
    return score_payload(pairs, opts.get("workers"), durations, details=opts.get("details", True))


def errors_payload(
    pairs: list[tuple[Transcript, Transcript]],
    top: int | None,
    workers: int | None = None,
) -> tuple[dict[str, Any], str]:
    """Ranked error tables as JSON rows plus their TSV rendering."""
    tables = top_errors(_align_pairs(pairs, workers), top)
    return {
        "top": top,
        "tables": tables.formatted(),
        "substitutions": [{"count": c, "ref": r, "hyp": h} for c, r, h in tables.substitutions],
        "insertions": [{"count": c, "hyp": h} for c, h in tables.insertions],
        "deletions": [{"count": c, "ref": r} for c, r in tables.deletions],
    }, tables.to_tsv()


@handler("errors")
def errors_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    pairs = _load_pairs(opts, ctx)
    payload, tsv = errors_payload(pairs, opts.get("top", 10), opts.get("workers"))
    if opts.get("tsv") is not None:
        ctx.write_text(opts["tsv"], tsv)
    return payload


def _reference_sets(
    annotators: list[list[Transcript]],
    hyps: list[Transcript],
) -> tuple[list[list[Transcript]], list[Transcript]]:
    """Index-aligned reference sets and hypotheses, sorted by utterance id."""
    ids = {t.utt_id for t in annotators[0]}
    for k, refs in enumerate(annotators[1:], 2):
        other = {t.utt_id for t in refs}
        if other != ids:
            missing = sorted(ids.symmetric_difference(other))
            raise ScoringError(f"reference file #{k} covers different utterances: {', '.join(missing[:5])}")
    by_annotator = [{t.utt_id: t for t in refs} for refs in annotators]
    hyp_by_id = {t.utt_id: t for t in hyps}
    extra = sorted(set(hyp_by_id) - ids)
    if extra:
        logger.warning("Skipping %d hypothesis utterance(s) with no reference", len(extra))
    order = sorted(ids)
    ref_sets = [[refs[u] for refs in by_annotator] for u in order]
    hyp_list = [hyp_by_id.get(u, Transcript(u, ())) for u in order]
    return ref_sets, hyp_list


@handler("mr-score")
def mr_score_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    ref_paths: list[Path] = list(opts["refs"])
    if not ref_paths:
        raise UsageProblem("mr-score needs at least one --ref")
    fmt = opts.get("format", "kaldi")
    rules = load_rules(ctx, opts.get("glm"))
    policy = _policy(opts)
    annotators = [prepare(load_transcripts(ctx, p, fmt), rules, policy) for p in ref_paths]
    hyps = prepare(load_transcripts(ctx, opts["hyp"], fmt), rules, policy)
    ref_sets, hyp_list = _reference_sets(annotators, hyps)

    mr = mr_wer(ref_sets, hyp_list)
    av = av_wer(ref_sets, hyp_list)
    return {
        "references": len(ref_paths),
        "utterance_count": len(hyp_list),
        "mr_wer": mr.to_dict(),
        "av_wer": av,
        "av_wer_pct": round(av, 1),
    }


def _parse_labelled(entries: list[str]) -> dict[str, Path]:
    sets: dict[str, Path] = {}
    for entry in entries:
        label, sep, path = entry.partition("=")
        if not sep or not label or not path:
            raise UsageProblem(f"expected LABEL=PATH, got {entry!r}")
        if label in sets:
            raise UsageProblem(f"label {label!r} given twice")
        sets[label] = Path(path)
    return sets


def _matrix_from_sets(opts: dict[str, Any], ctx: RunContext):
    sets = _parse_labelled(opts.get("sets") or [])
    if len(sets) < 2:
        raise UsageProblem("need at least two --set LABEL=PATH collections")
    fmt = opts.get("format", "kaldi")
    rules = load_rules(ctx, opts.get("glm"))
    policy = _policy(opts)
    collections = {label: prepare(load_transcripts(ctx, path, fmt), rules, policy) for label, path in sets.items()}
    return disagreement_matrix(collections)


def matrix_tsv(labels: list[str], cells: list[list[float]]) -> str:
    lines = ["hyp\\ref\t" + "\t".join(labels)]
    for label, row in zip(labels, cells):
        lines.append(label + "\t" + "\t".join(f"{v:.1f}" for v in row))
    return "\n".join(lines) + "\n"


@handler("matrix")
def matrix_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    matrix = _matrix_from_sets(opts, ctx)
    payload = matrix.to_dict()
    if opts.get("tsv") is not None:
        ctx.write_text(opts["tsv"], matrix_tsv(payload["labels"], payload["cells"]))
    return payload


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageProblem(f"{what}: expected comma-separated numbers, got {text!r}") from exc


@handler("gap")
def gap_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    if opts.get("a") is not None:
        if opts.get("b") is None:
            raise UsageProblem("--a needs --b")
        a = _parse_floats(opts["a"], "--a")
        b = [_parse_floats(row, "--b") for row in opts["b"].split(";")]
        value = gap(a, b)
        return {"gap": value, "gap_rounded": round(value, 4), "J": len(a), "K": len(b)}

    member, group = opts.get("member"), opts.get("group")
    if not member or not group:
        raise UsageProblem("give either --a/--b values or --set collections with --member and --group")
    matrix = _matrix_from_sets(opts, ctx)
    members = [g for g in group.split(",") if g]
    value = gap_from_matrix(matrix, member, members)
    return {
        "gap": value,
        "gap_rounded": round(value, 4),
        "member": member,
        "group": members,
        "matrix": matrix.to_dict(),
    }
