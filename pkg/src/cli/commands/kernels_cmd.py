"""kernels-check command."""

import typer
from typing_extensions import Annotated

from ..runner import dispatch
from .options import ReportOption


def kernels_check(
    seed: Annotated[int, typer.Option("--seed", help="Seed of the random cases")] = 0,
    cases: Annotated[int, typer.Option("--cases", min=1, help="Random cases per check")] = 100,
    report: ReportOption = None,
):
    """
    Compare the attention, feed-forward, positional-encoding and score
    kernels against scalar re-implementations on seeded random inputs.

    Example:
        asrbench kernels-check --seed 7 --cases 200
    """
    dispatch("kernels-check", seed=seed, cases=cases, report=report)
