"""Text preparation commands: normalize, bw, glm, chunk, bpe-train, bpe-apply."""

from enum import Enum
from pathlib import Path
from typing import Optional

import typer
from typing_extensions import Annotated

from ...app.config import settings
from ..runner import dispatch
from .options import CleanOption, FormatOption, InputOption, OutputOption, ReportOption, TranscriptFormat


class Direction(str, Enum):
    to_arabic = "to-arabic"
    to_bw = "to-bw"


def normalize(
    input: InputOption,
    output: OutputOption,
    fold_alif: Annotated[bool, typer.Option("--fold-alif/--keep-alif", help="Fold hamza/madda alif variants to bare alif")] = True,
    fold_ya: Annotated[bool, typer.Option("--fold-ya/--keep-ya", help="Fold alif maqsura to ya")] = True,
    fold_ta_marbuta: Annotated[bool, typer.Option("--fold-ta-marbuta/--keep-ta-marbuta", help="Fold ta marbuta to ha")] = True,
    strip_diacritics: Annotated[bool, typer.Option("--strip-diacritics/--keep-diacritics")] = True,
    strip_punctuation: Annotated[bool, typer.Option("--strip-punctuation/--keep-punctuation")] = True,
    drop_single_char_words: Annotated[bool, typer.Option("--drop-single-char/--keep-single-char")] = True,
    format: FormatOption = TranscriptFormat.kaldi,
    report: ReportOption = None,
):
    """
    Normalize Buckwalter transcripts for scoring.

    Example:
        asrbench normalize -i hyp.txt -o hyp.norm.txt
    """
    dispatch(
        "normalize",
        input=input,
        output=output,
        fold_alif=fold_alif,
        fold_ya=fold_ya,
        fold_ta_marbuta=fold_ta_marbuta,
        strip_diacritics=strip_diacritics,
        strip_punctuation=strip_punctuation,
        drop_single_char_words=drop_single_char_words,
        format=format.value,
        report=report,
    )


def bw(
    input: InputOption,
    output: OutputOption,
    direction: Annotated[Direction, typer.Option("--direction", "-d", help="to-arabic or to-bw")] = Direction.to_arabic,
    format: FormatOption = TranscriptFormat.kaldi,
    report: ReportOption = None,
):
    """
    Transliterate between Buckwalter and Arabic script.

    Example:
        asrbench bw -i ref.bw.txt -o ref.ar.txt --direction to-arabic
    """
    dispatch("bw", input=input, output=output, direction=direction.value, format=format.value, report=report)


def glm(
    input: InputOption,
    rules: Annotated[Path, typer.Option("--glm", help="GLM rules file ('LHS => RHS' per line)")],
    output: OutputOption,
    format: FormatOption = TranscriptFormat.kaldi,
    report: ReportOption = None,
):
    """
    Rewrite transcripts with GLM rules (longest match wins).

    Example:
        asrbench glm -i hyp.txt --glm rules.glm -o hyp.glm.txt
    """
    dispatch("glm", input=input, glm=rules, output=output, format=format.value, report=report)


def chunk(
    input: InputOption,
    output: OutputOption,
    max_len: Annotated[int, typer.Option("--max-len", min=1, help="Words per chunk")] = settings.chunk_max_len,
    overlap: Annotated[int, typer.Option("--overlap", min=0, help="Words shared by consecutive chunks")] = settings.chunk_overlap,
    clean: CleanOption = False,
    format: FormatOption = TranscriptFormat.kaldi,
    report: ReportOption = None,
):
    """
    Split long documents into overlapping chunks for LM training.

    Example:
        asrbench chunk -i news.txt -o news.chunks --max-len 200 --overlap 50 --clean
    """
    dispatch(
        "chunk",
        input=input,
        output=output,
        max_len=max_len,
        overlap=overlap,
        clean=clean,
        format=format.value,
        report=report,
    )


def bpe_train(
    input: InputOption,
    output: OutputOption,
    merges: Annotated[int, typer.Option("--merges", "-m", min=0, help="Number of merge operations")],
    clean: CleanOption = False,
    format: FormatOption = TranscriptFormat.kaldi,
    report: ReportOption = None,
):
    """
    Learn a BPE merge table.

    Example:
        asrbench bpe-train -i train.txt -m 5000 -o bpe.model
    """
    dispatch("bpe-train", input=input, output=output, merges=merges, clean=clean, format=format.value, report=report)


def bpe_apply(
    input: InputOption,
    output: OutputOption,
    model: Annotated[Optional[Path], typer.Option("--model", help="Model written by bpe-train")] = None,
    decode: Annotated[bool, typer.Option("--decode", help="Join '@@' subwords back into words")] = False,
    format: FormatOption = TranscriptFormat.kaldi,
    report: ReportOption = None,
):
    """
    Segment transcripts into subwords, or join them back with --decode.

    Example:
        asrbench bpe-apply -i train.txt --model bpe.model -o train.bpe
    """
    dispatch("bpe-apply", input=input, output=output, model=model, decode=decode, format=format.value, report=report)
