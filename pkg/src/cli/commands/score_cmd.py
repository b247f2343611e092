"""Scoring commands: score, mr-score, gap, errors, matrix."""

from pathlib import Path
from typing import List, Optional

import typer
from typing_extensions import Annotated

from ..runner import dispatch
from .options import FormatOption, GlmOption, NormalizeOption, ReportOption, TranscriptFormat, WorkersOption

RefOption = Annotated[Path, typer.Option("--ref", "-r", help="Reference transcripts")]
HypOption = Annotated[Path, typer.Option("--hyp", help="Hypothesis transcripts")]
SetsOption = Annotated[
    Optional[List[str]],
    typer.Option("--set", "-s", help="Labelled transcript collection LABEL=PATH (repeatable)"),
]
TsvOption = Annotated[Optional[Path], typer.Option("--tsv", help="Also write the table as TSV")]


def score(
    ref: RefOption,
    hyp: HypOption,
    glm: GlmOption = None,
    normalize: NormalizeOption = False,
    segments: Annotated[
        Optional[Path],
        typer.Option("--segments", help="Segments file; adds WER per duration range"),
    ] = None,
    details: Annotated[bool, typer.Option("--details/--no-details", help="Per-utterance counts")] = True,
    format: FormatOption = TranscriptFormat.kaldi,
    workers: WorkersOption = None,
    report: ReportOption = None,
):
    """
    Word error rate of hypotheses against one reference set.

    Example:
        asrbench score --ref ref.txt --hyp hyp.txt --glm arabic.glm --normalize
    """
    dispatch(
        "score",
        ref=ref,
        hyp=hyp,
        glm=glm,
        normalize=normalize,
        segments=segments,
        details=details,
        format=format.value,
        workers=workers,
        report=report,
    )


def mr_score(
    refs: Annotated[List[Path], typer.Option("--ref", "-r", help="Reference transcripts, one file per annotator (repeatable)")],
    hyp: HypOption,
    glm: GlmOption = None,
    normalize: NormalizeOption = False,
    format: FormatOption = TranscriptFormat.kaldi,
    report: ReportOption = None,
):
    """
    Multi-reference WER (confusion network) and average WER over annotators.

    Example:
        asrbench mr-score -r ann1.txt -r ann2.txt -r ann3.txt --hyp hyp.txt
    """
    dispatch("mr-score", refs=refs, hyp=hyp, glm=glm, normalize=normalize, format=format.value, report=report)


def gap(
    a: Annotated[Optional[str], typer.Option("--a", help="Member-vs-group disagreements, comma-separated (%)")] = None,
    b: Annotated[
        Optional[str],
        typer.Option("--b", help="Group-internal disagreement matrix, rows ';'-separated (%)"),
    ] = None,
    sets: SetsOption = None,
    member: Annotated[Optional[str], typer.Option("--member", help="Label of the transcriber under test")] = None,
    group: Annotated[Optional[str], typer.Option("--group", help="Comma-separated labels of the reference group")] = None,
    glm: GlmOption = None,
    normalize: NormalizeOption = False,
    format: FormatOption = TranscriptFormat.kaldi,
    report: ReportOption = None,
):
    """
    Gap between one transcriber and a group of annotators.

    Examples:
        asrbench gap --a 0.2,0.2 --b "0,0.1;0.1,0"
        asrbench gap -s asr=hyp.txt -s A=a.txt -s B=b.txt --member asr --group A,B
    """
    dispatch(
        "gap",
        a=a,
        b=b,
        sets=sets,
        member=member,
        group=group,
        glm=glm,
        normalize=normalize,
        format=format.value,
        report=report,
    )


def errors(
    ref: RefOption,
    hyp: HypOption,
    top: Annotated[int, typer.Option("--top", "-n", min=1, help="Rows per table")] = 10,
    tsv: TsvOption = None,
    glm: GlmOption = None,
    normalize: NormalizeOption = False,
    format: FormatOption = TranscriptFormat.kaldi,
    workers: WorkersOption = None,
    report: ReportOption = None,
):
    """
    Most frequent substitutions, insertions and deletions.

    Example:
        asrbench errors --ref ref.txt --hyp hyp.txt --top 10 --tsv errors.tsv
    """
    dispatch(
        "errors",
        ref=ref,
        hyp=hyp,
        top=top,
        tsv=tsv,
        glm=glm,
        normalize=normalize,
        format=format.value,
        workers=workers,
        report=report,
    )


def matrix(
    sets: SetsOption = None,
    tsv: TsvOption = None,
    glm: GlmOption = None,
    normalize: NormalizeOption = False,
    format: FormatOption = TranscriptFormat.kaldi,
    report: ReportOption = None,
):
    """
    Pairwise disagreement (WER of each collection against each other).

    Example:
        asrbench matrix -s A=a.txt -s B=b.txt -s C=c.txt --tsv matrix.tsv
    """
    dispatch("matrix", sets=sets, tsv=tsv, glm=glm, normalize=normalize, format=format.value, report=report)
