"""
Energy-based voice activity detection.

Frames the signal, computes log-energy per frame and thresholds it at a
low percentile of the recording's own energies plus a margin, so the
detector does not depend on the recording level. The binary decision is
median-smoothed, short silences are bridged and short speech runs dropped.
"""

import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import medfilt

from .models import AudioBuffer, Segment, VadParams
from .segmenter import SegmentError, segment_id

logger = logging.getLogger(__name__)

ENERGY_FLOOR_DB = -120.0


def frame_energies(audio: AudioBuffer, frame_len: int, hop: int) -> np.ndarray:
    """Mean-square energy per frame in dB, floored at ENERGY_FLOOR_DB."""
    frames = sliding_window_view(audio.samples, frame_len)[::hop]
    power = np.mean(frames**2, axis=1)
    floor_power = 10.0 ** (ENERGY_FLOOR_DB / 10.0)
    db = 10.0 * np.log10(np.maximum(power, floor_power))
    return np.where(power > floor_power, np.maximum(db, ENERGY_FLOOR_DB), ENERGY_FLOOR_DB)


def speech_threshold(energies: np.ndarray, params: VadParams) -> float:
    """
    Percentile energy plus the margin, capped at (max - margin) so a
    recording that is mostly speech still has speech frames.
    """
    base = float(np.quantile(energies, params.threshold_percentile, method="lower"))
    return min(base + params.margin_db, float(energies.max()) - params.margin_db)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive (first, last) index pairs of the True runs in ``mask``."""
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return [(int(a), int(b) - 1) for a, b in zip(edges[::2], edges[1::2])]


def energy_vad(audio: AudioBuffer, params: VadParams | None = None, rec_id: str = "rec") -> list[Segment]:
    """
    Speech intervals of ``audio``, sorted and non-overlapping.

    Frame k spans samples [k*hop, k*hop + frame_len); a run of frames
    [first, last] maps to the seconds between the centres of its edge hops,
    extended to the buffer edges when the run touches them.
    """
    params = params or VadParams()
    sr = audio.sample_rate
    frame_len = max(1, round(params.frame_ms * sr / 1000.0))
    hop = max(1, round(params.hop_ms * sr / 1000.0))
    if audio.samples.shape[0] < frame_len:
        raise SegmentError(
            f"audio of {audio.samples.shape[0]} sample(s) is shorter than one {params.frame_ms} ms frame"
        )

    energies = frame_energies(audio, frame_len, hop)
    threshold = speech_threshold(energies, params)
    speech = (energies >= threshold) & (energies > ENERGY_FLOOR_DB)
    if params.smoothing_frames > 1:
        speech = medfilt(speech.astype(np.float64), kernel_size=params.smoothing_frames) > 0.5
    logger.debug("VAD threshold %.1f dB, %d/%d speech frame(s)", threshold, int(speech.sum()), speech.shape[0])

    n_frames = energies.shape[0]
    duration = audio.duration_s
    intervals: list[list[float]] = []
    for first, last in _runs(speech):
        start = 0.0 if first == 0 else (first * hop + frame_len / 2 - hop / 2) / sr
        end = duration if last == n_frames - 1 else min(duration, (last * hop + frame_len / 2 + hop / 2) / sr)
        if intervals and start - intervals[-1][1] < params.min_silence_s:
            intervals[-1][1] = end
        else:
            intervals.append([start, end])

    segments = [
        Segment(rec_id, start, end, segment_id(rec_id, start, end))
        for start, end in intervals
        if end - start >= params.min_speech_s
    ]
    logger.info("VAD found %d speech segment(s) in %s", len(segments), rec_id)
    return segments
