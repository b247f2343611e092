"""Handlers for VAD, segment capping and duration statistics."""

import logging
from pathlib import Path
from typing import Any

from src.app.errors import UsageProblem
from src.app.models import Segment, VadParams
from src.app.segmenter import cap_segments, duration_stats, format_segments
from src.app.services.command_runner import handler
from src.app.services.loaders import load_segment_file
from src.app.services.run_tracker import RunContext
from src.app.services.workers import ordered_map
from src.app.vad import energy_vad
from src.app.wav_io import read_wav

logger = logging.getLogger(__name__)

VAD_OPTIONS = tuple(VadParams.model_fields)


def vad_params_from_options(opts: dict[str, Any]) -> VadParams:
    return VadParams(**{name: opts[name] for name in VAD_OPTIONS if opts.get(name) is not None})


def run_vad(ctx: RunContext, wavs: list[Path], params: VadParams, workers: int | None = None) -> list[Segment]:
    """Energy-VAD segments for every WAV file, recording id = file stem."""
    rec_ids = [Path(p).stem for p in wavs]
    if len(set(rec_ids)) != len(rec_ids):
        raise UsageProblem("WAV files must have distinct names (the stem is the recording id)")
    # Read in order on this thread so the input list is deterministic
    audio = []
    for path in wavs:
        ctx.record_input(path)
        audio.append(read_wav(path))
    per_rec = ordered_map(lambda item: energy_vad(item[0], params, item[1]), list(zip(audio, rec_ids)), workers)
    segments = [seg for segs in per_rec for seg in segs]
    return sorted(segments, key=Segment.sort_key)


@handler("vad")
def vad_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    wavs = list(opts["wav"])
    if not wavs:
        raise UsageProblem("vad needs at least one --wav")
    params = vad_params_from_options(opts)
    segments = run_vad(ctx, wavs, params, opts.get("workers"))
    ctx.write_text(opts["output"], format_segments(segments))
    counts: dict[str, int] = {Path(p).stem: 0 for p in wavs}
    for seg in segments:
        counts[seg.rec_id] += 1
    return {"params": params.model_dump(), "recordings": counts, "segment_count": len(segments)}


def cap_payload(primary: list[Segment], boundaries: list[Segment], max_dur_s: float) -> tuple[dict[str, Any], list[Segment]]:
    """Capped segments plus a summary; the bench reuses this unchanged."""
    capped = cap_segments(primary, boundaries, max_dur_s)
    payload = {
        "max_dur_s": max_dur_s,
        "input_segments": len(primary),
        "output_segments": len(capped),
        "split_segments": sum(1 for seg in primary if seg.duration_s > max_dur_s),
        "longest_s": max((seg.duration_s for seg in capped), default=0.0),
        "segments": [seg.to_dict() for seg in capped],
    }
    return payload, capped


@handler("cap")
def cap_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    primary = load_segment_file(ctx, opts["segments"])
    boundaries: list[Segment] = []
    if opts.get("boundaries") is not None:
        boundaries = load_segment_file(ctx, opts["boundaries"])
    elif opts.get("wav"):
        boundaries = run_vad(ctx, list(opts["wav"]), vad_params_from_options(opts), opts.get("workers"))
    payload, capped = cap_payload(primary, boundaries, opts["max_dur"])
    if opts.get("output") is not None:
        ctx.write_text(opts["output"], format_segments(capped))
    return payload


def durstats_payload(segments: list[Segment]) -> dict[str, Any]:
    stats = duration_stats(segments)
    payload = stats.model_dump()
    payload["bucket_pct_rounded"] = {name: round(v, 1) for name, v in stats.bucket_pct.items()}
    return payload


@handler("durstats")
def durstats_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    return durstats_payload(load_segment_file(ctx, opts["segments"]))
