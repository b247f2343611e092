"""Decoding commands: decode, lm-train, ppl."""

from pathlib import Path
from typing import List, Optional

import typer
from typing_extensions import Annotated

from ...app.config import settings
from ..runner import dispatch
from .options import CleanOption, FormatOption, InputOption, OutputOption, ReportOption, TranscriptFormat, WorkersOption

ChunkOption = Annotated[bool, typer.Option("--chunk", help="Chunk documents (--max-len/--overlap) before counting")]
MaxLenOption = Annotated[int, typer.Option("--max-len", min=1, help="Words per chunk")]
OverlapOption = Annotated[int, typer.Option("--overlap", min=0, help="Words shared by consecutive chunks")]


def decode(
    post: Annotated[List[Path], typer.Option("--post", "-p", help="CTC posterior file; the stem is the utterance id (repeatable)")],
    beam: Annotated[int, typer.Option("--beam", min=1, help="Beam size")] = settings.beam_size,
    lam: Annotated[float, typer.Option("--lam", min=0.0, max=1.0, help="CTC weight in the joint score")] = settings.decoding_ctc_weight,
    mu: Annotated[float, typer.Option("--mu", min=0.0, help="LM weight in the joint score")] = settings.lm_weight,
    dec: Annotated[Optional[Path], typer.Option("--dec", help="JSON table of decoder log-probabilities")] = None,
    lm: Annotated[Optional[Path], typer.Option("--lm", help="N-gram model written by lm-train")] = None,
    nbest: Annotated[int, typer.Option("--nbest", min=1, help="Hypotheses kept per utterance")] = 1,
    max_len: Annotated[Optional[int], typer.Option("--max-len", min=0, help="Longest hypothesis (default: frame count)")] = None,
    length_norm: Annotated[bool, typer.Option("--length-norm", help="Rank finished hypotheses by score / (length + 1)")] = False,
    greedy: Annotated[bool, typer.Option("--greedy", help="Also report the best-path CTC decode")] = False,
    sweep: Annotated[
        Optional[str],
        typer.Option("--sweep", help="Comma-separated beam sizes; decode at each, with and without --lm, and score"),
    ] = None,
    ref: Annotated[Optional[Path], typer.Option("--ref", "-r", help="References for --sweep")] = None,
    frame_shift_ms: Annotated[
        float,
        typer.Option("--frame-shift-ms", min=0.0, help="Posterior frame shift, for the real-time factor"),
    ] = 40.0,
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="Write best hypotheses as transcripts")] = None,
    workers: WorkersOption = None,
    report: ReportOption = None,
):
    """
    Joint CTC / decoder / LM beam search over posterior matrices.

    Examples:
        asrbench decode --post utt1.ctc --beam 20 --lam 0.5 --mu 0.3 --lm news.lm
        asrbench decode -p a.ctc -p b.ctc --sweep 20,5,2 --ref ref.txt --lm news.lm
    """
    dispatch(
        "decode",
        post=post,
        beam=beam,
        lam=lam,
        mu=mu,
        dec=dec,
        lm=lm,
        nbest=nbest,
        max_len=max_len,
        length_norm=length_norm,
        greedy=greedy,
        sweep=sweep,
        ref=ref,
        frame_shift_ms=frame_shift_ms,
        output=output,
        workers=workers,
        report=report,
    )


def lm_train(
    input: InputOption,
    output: OutputOption,
    order: Annotated[int, typer.Option("--order", "-n", min=1, help="N-gram order")] = 3,
    k: Annotated[float, typer.Option("--k", min=0.0, help="Add-k smoothing constant")] = 1.0,
    clean: CleanOption = False,
    chunk: ChunkOption = False,
    max_len: MaxLenOption = settings.chunk_max_len,
    overlap: OverlapOption = settings.chunk_overlap,
    format: FormatOption = TranscriptFormat.kaldi,
    report: ReportOption = None,
):
    """
    Train an add-k smoothed n-gram language model.

    Example:
        asrbench lm-train -i news.txt --clean --order 3 -o news.lm
    """
    dispatch(
        "lm-train",
        input=input,
        output=output,
        order=order,
        k=k,
        clean=clean,
        chunk=chunk,
        max_len=max_len,
        overlap=overlap,
        format=format.value,
        report=report,
    )


def ppl(
    lm: Annotated[Path, typer.Option("--lm", help="N-gram model written by lm-train")],
    input: InputOption,
    clean: CleanOption = False,
    chunk: ChunkOption = False,
    max_len: MaxLenOption = settings.chunk_max_len,
    overlap: OverlapOption = settings.chunk_overlap,
    format: FormatOption = TranscriptFormat.kaldi,
    report: ReportOption = None,
):
    """
    Perplexity of a transcript file under an n-gram model.

    Example:
        asrbench ppl --lm news.lm -i dev.txt
    """
    dispatch(
        "ppl",
        lm=lm,
        input=input,
        clean=clean,
        chunk=chunk,
        max_len=max_len,
        overlap=overlap,
        format=format.value,
        report=report,
    )
