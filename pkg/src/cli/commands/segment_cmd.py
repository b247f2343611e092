"""Segmentation commands: vad, cap, durstats."""

from pathlib import Path
from typing import List, Optional

import typer
from typing_extensions import Annotated

from ...app.config import settings
from ..runner import dispatch
from .options import (
    VAD_DEFAULTS,
    FrameMsOption,
    HopMsOption,
    MarginOption,
    MinSilenceOption,
    MinSpeechOption,
    OutputOption,
    PercentileOption,
    ReportOption,
    SmoothingOption,
    WorkersOption,
)

SegmentsOption = Annotated[Path, typer.Option("--segments", help="Kaldi segments file")]


def vad(
    wav: Annotated[List[Path], typer.Option("--wav", help="PCM-16 WAV file; the file stem is the recording id (repeatable)")],
    output: OutputOption,
    frame_ms: FrameMsOption = VAD_DEFAULTS["frame_ms"],
    hop_ms: HopMsOption = VAD_DEFAULTS["hop_ms"],
    threshold_percentile: PercentileOption = VAD_DEFAULTS["threshold_percentile"],
    margin_db: MarginOption = VAD_DEFAULTS["margin_db"],
    smoothing_frames: SmoothingOption = VAD_DEFAULTS["smoothing_frames"],
    min_silence_s: MinSilenceOption = VAD_DEFAULTS["min_silence_s"],
    min_speech_s: MinSpeechOption = VAD_DEFAULTS["min_speech_s"],
    workers: WorkersOption = None,
    report: ReportOption = None,
):
    """
    Energy-based voice activity detection, written as a segments file.

    Example:
        asrbench vad --wav rec1.wav --wav rec2.wav -o vad.segments
    """
    dispatch(
        "vad",
        wav=wav,
        output=output,
        frame_ms=frame_ms,
        hop_ms=hop_ms,
        threshold_percentile=threshold_percentile,
        margin_db=margin_db,
        smoothing_frames=smoothing_frames,
        min_silence_s=min_silence_s,
        min_speech_s=min_speech_s,
        workers=workers,
        report=report,
    )


def cap(
    segments: SegmentsOption,
    boundaries: Annotated[
        Optional[Path],
        typer.Option("--boundaries", "-b", help="Speech intervals whose gaps give the cut points"),
    ] = None,
    wav: Annotated[
        Optional[List[Path]],
        typer.Option("--wav", help="Run the energy VAD on these recordings instead of reading --boundaries"),
    ] = None,
    max_dur: Annotated[float, typer.Option("--max-dur", min=0.0, help="Longest allowed segment (s)")] = settings.max_segment_s,
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="Write the capped segments file")] = None,
    frame_ms: FrameMsOption = VAD_DEFAULTS["frame_ms"],
    hop_ms: HopMsOption = VAD_DEFAULTS["hop_ms"],
    threshold_percentile: PercentileOption = VAD_DEFAULTS["threshold_percentile"],
    margin_db: MarginOption = VAD_DEFAULTS["margin_db"],
    smoothing_frames: SmoothingOption = VAD_DEFAULTS["smoothing_frames"],
    min_silence_s: MinSilenceOption = VAD_DEFAULTS["min_silence_s"],
    min_speech_s: MinSpeechOption = VAD_DEFAULTS["min_speech_s"],
    workers: WorkersOption = None,
    report: ReportOption = None,
):
    """
    Split detector segments longer than --max-dur at silence midpoints.

    Example:
        asrbench cap --segments is.segments --boundaries vad.segments -o capped.segments
    """
    if boundaries is not None and wav:
        raise typer.BadParameter("give --boundaries or --wav, not both")
    dispatch(
        "cap",
        segments=segments,
        boundaries=boundaries,
        wav=wav,
        max_dur=max_dur,
        output=output,
        frame_ms=frame_ms,
        hop_ms=hop_ms,
        threshold_percentile=threshold_percentile,
        margin_db=margin_db,
        smoothing_frames=smoothing_frames,
        min_silence_s=min_silence_s,
        min_speech_s=min_speech_s,
        workers=workers,
        report=report,
    )


def durstats(
    segments: SegmentsOption,
    report: ReportOption = None,
):
    """
    Duration histogram (0-15 / 15-30 / 30+ s), mean, std and effective range.

    Example:
        asrbench durstats --segments capped.segments
    """
    dispatch("durstats", segments=segments, report=report)
