"""Option types shared by several commands."""

from enum import Enum
from pathlib import Path
from typing import Optional

import typer
from typing_extensions import Annotated

from ...app.models import VadParams


class TranscriptFormat(str, Enum):
    kaldi = "kaldi"
    trn = "trn"


ReportOption = Annotated[
    Optional[Path],
    typer.Option("--report", help="Write the JSON run report here (default: standard output)"),
]
OutputOption = Annotated[Path, typer.Option("--output", "-o", help="Output file")]
InputOption = Annotated[Path, typer.Option("--input", "-i", help="Input transcript file")]
FormatOption = Annotated[
    TranscriptFormat,
    typer.Option("--format", "-f", help="Transcript layout: 'kaldi' (id first) or 'trn' (id in trailing parentheses)"),
]
GlmOption = Annotated[Optional[Path], typer.Option("--glm", help="GLM rules applied to both sides before scoring")]
NormalizeOption = Annotated[
    bool,
    typer.Option("--normalize/--no-normalize", help="Apply the default normalization policy before scoring"),
]
WorkersOption = Annotated[
    Optional[int],
    typer.Option("--workers", "-w", min=1, help="Worker threads (default: available parallelism)"),
]
CleanOption = Annotated[bool, typer.Option("--clean", help="Run the LM-text cleaning pipeline first")]

FrameMsOption = Annotated[float, typer.Option("--frame-ms", min=0.0, help="VAD frame length (ms)")]
HopMsOption = Annotated[float, typer.Option("--hop-ms", min=0.0, help="VAD hop (ms)")]
PercentileOption = Annotated[
    float,
    typer.Option("--threshold-percentile", min=0.0, max=1.0, help="Energy percentile the threshold starts from"),
]
MarginOption = Annotated[float, typer.Option("--margin-db", help="Margin added to the percentile energy (dB)")]
SmoothingOption = Annotated[int, typer.Option("--smoothing-frames", min=1, help="Median filter width (odd)")]
MinSilenceOption = Annotated[float, typer.Option("--min-silence-s", min=0.0, help="Shorter silences are bridged")]
MinSpeechOption = Annotated[float, typer.Option("--min-speech-s", min=0.0, help="Shorter speech runs are dropped")]

VAD_DEFAULTS = {name: field.default for name, field in VadParams.model_fields.items()}
