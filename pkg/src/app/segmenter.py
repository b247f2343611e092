"""
Long-segment capping and segment-duration analytics.

``cap_segments`` takes the segments of an external speech detector
(``primary``) and the speech intervals of the energy VAD
(``boundaries``). Any primary segment longer than the cap is split at
midpoints of the VAD's silence gaps, greedily taking the farthest gap
that keeps the piece within the cap; when no gap qualifies the piece is
cut at exactly the cap.

Segments file, UTF-8, one segment per line::

    <seg_id> <rec_id> <start_s> <end_s>
"""

import logging
import math
from collections.abc import Iterable, Sequence
from itertools import groupby, pairwise
from pathlib import Path

import numpy as np

from .errors import FileFormatError
from .models import DURATION_BUCKETS, DurationStats, Segment, duration_bucket

logger = logging.getLogger(__name__)


class SegmentError(Exception):
    """Raised when segment input violates ordering or capping preconditions."""


class SegmentFormatError(FileFormatError):
    """Raised when a segments file line does not parse."""


def segment_id(rec_id: str, start_s: float, end_s: float) -> str:
    """Kaldi-style id from centisecond offsets."""
    return f"{rec_id}_{round(start_s * 100):07d}_{round(end_s * 100):07d}"


def _by_recording(segments: Iterable[Segment]) -> dict[str, list[Segment]]:
    grouped: dict[str, list[Segment]] = {}
    for seg in segments:
        grouped.setdefault(seg.rec_id, []).append(seg)
    return grouped


def _check_ordered(name: str, grouped: dict[str, list[Segment]]) -> None:
    for rec_id, segs in grouped.items():
        for prev, cur in pairwise(segs):
            if cur.start_s < prev.start_s:
                raise SegmentError(f"{name} segments of {rec_id} are not sorted at {cur.start_s}")
            if cur.start_s < prev.end_s:
                raise SegmentError(
                    f"{name} segments of {rec_id} overlap: [{prev.start_s}, {prev.end_s}] and "
                    f"[{cur.start_s}, {cur.end_s}]"
                )


def gap_midpoints(boundaries: Sequence[Segment]) -> list[float]:
    """Midpoints of the silences between consecutive speech intervals of one recording."""
    return [(a.end_s + b.start_s) / 2 for a, b in pairwise(boundaries) if a.end_s < b.start_s]


def _split(seg: Segment, cuts: Sequence[float], max_dur_s: float) -> list[Segment]:
    pieces: list[Segment] = []
    cur = seg.start_s
    while seg.end_s - cur > max_dur_s:
        admissible = [c for c in cuts if cur < c < seg.end_s and c - cur <= max_dur_s]
        if admissible:
            cut = max(admissible)
        else:
            cut = cur + max_dur_s
            while cut - cur > max_dur_s:
                cut = math.nextafter(cut, -math.inf)
        if not cur < cut:
            raise SegmentError(f"cap {max_dur_s} s is below the time resolution at {cur} s")
        pieces.append(Segment(seg.rec_id, cur, cut, segment_id(seg.rec_id, cur, cut)))
        cur = cut
    pieces.append(Segment(seg.rec_id, cur, seg.end_s, segment_id(seg.rec_id, cur, seg.end_s)))
    return pieces


def cap_segments(
    primary: Sequence[Segment],
    boundaries: Sequence[Segment],
    max_dur_s: float = 25.0,
) -> list[Segment]:
    """
    Split every primary segment longer than ``max_dur_s``.

    Args:
        primary: Segments to cap, sorted and non-overlapping per recording
        boundaries: Energy-VAD speech intervals, same ordering contract
        max_dur_s: Hard cap on output durations (default: 25)

    Returns:
        Segments sorted by (rec_id, start_s); short segments pass through unchanged
    """
    if not max_dur_s > 0:
        raise SegmentError(f"max duration must be > 0, got {max_dur_s}")
    grouped = _by_recording(primary)
    bounds = _by_recording(boundaries)
    _check_ordered("primary", grouped)
    _check_ordered("boundary", bounds)

    out: list[Segment] = []
    split_count = 0
    for rec_id in sorted(grouped):
        cuts = gap_midpoints(bounds.get(rec_id, []))
        for seg in grouped[rec_id]:
            if seg.duration_s <= max_dur_s:
                out.append(seg)
                continue
            pieces = _split(seg, cuts, max_dur_s)
            split_count += 1
            logger.debug("Split %s [%s, %s] into %d piece(s)", seg.seg_id, seg.start_s, seg.end_s, len(pieces))
            out.extend(pieces)
    logger.info("Capped %d of %d segment(s) at %s s", split_count, len(primary), max_dur_s)
    return out


def interval_union(segments: Iterable[Segment]) -> dict[str, list[tuple[float, float]]]:
    """Per-recording union of segment intervals as merged, sorted (start, end) pairs."""
    union: dict[str, list[tuple[float, float]]] = {}
    for rec_id, segs in groupby(sorted(segments, key=Segment.sort_key), key=lambda s: s.rec_id):
        merged: list[list[float]] = []
        for seg in segs:
            if merged and seg.start_s <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], seg.end_s)
            else:
                merged.append([seg.start_s, seg.end_s])
        union[rec_id] = [(a, b) for a, b in merged]
    return union


def duration_stats(segments: Sequence[Segment]) -> DurationStats:
    """Histogram over [0, 15], (15, 30], (30, inf) plus population mean/std and mean ± 3 std."""
    if not segments:
        raise SegmentError("cannot summarize an empty segment list")
    durations = np.array([seg.duration_s for seg in segments], dtype=np.float64)
    total = len(segments)
    counts = {name: 0 for name, _, _ in DURATION_BUCKETS}
    for d in durations.tolist():
        counts[duration_bucket(d)] += 1
    mean = float(durations.mean())
    std = float(durations.std())
    low, high = max(0.0, mean - 3 * std), mean + 3 * std
    covered = int(np.count_nonzero((durations >= low) & (durations <= high)))
    return DurationStats(
        total=total,
        bucket_counts=counts,
        bucket_pct={name: 100.0 * c / total for name, c in counts.items()},
        mean_s=mean,
        std_s=std,
        effective_range=(low, high),
        coverage_pct=100.0 * covered / total,
    )


def parse_segments(text: str, source: str | Path = "<segments>") -> list[Segment]:
    segments: list[Segment] = []
    seen: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        fields = raw.split()
        if len(fields) != 4:
            raise SegmentFormatError(source, line_no, "'<seg_id> <rec_id> <start_s> <end_s>'", raw)
        seg_id, rec_id, start_text, end_text = fields
        if seg_id in seen:
            raise SegmentFormatError(source, line_no, f"a unique segment id (duplicate {seg_id!r})", raw)
        seen.add(seg_id)
        try:
            start, end = float(start_text), float(end_text)
        except ValueError as exc:
            raise SegmentFormatError(source, line_no, "decimal start and end seconds", raw) from exc
        if not (math.isfinite(start) and math.isfinite(end)):
            raise SegmentFormatError(source, line_no, "finite start and end seconds", raw)
        try:
            segments.append(Segment(rec_id, start, end, seg_id))
        except ValueError as exc:
            raise SegmentFormatError(source, line_no, "0 <= start < end", raw) from exc
    logger.info("Read %d segment(s) from %s", len(segments), source)
    return segments


def format_segments(segments: Iterable[Segment]) -> str:
    lines = []
    for seg in segments:
        seg_id = seg.seg_id or segment_id(seg.rec_id, seg.start_s, seg.end_s)
        lines.append(f"{seg_id} {seg.rec_id} {seg.start_s!r} {seg.end_s!r}")
    return "".join(line + "\n" for line in lines)
