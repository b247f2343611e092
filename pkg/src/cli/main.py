"""Main CLI entry point for the asrbench command."""

import logging
from collections.abc import Sequence
from importlib.metadata import PackageNotFoundError, version as package_version

import typer
from rich.console import Console
from rich.logging import RichHandler
from typing_extensions import Annotated

from ..app.config import settings
from ..app.errors import UsageProblem
from ..app.services.command_runner import Command
from . import commands
from .runner import capturing

# Create the main Typer app
app = typer.Typer(
    name="asrbench",
    help="Benchmark Arabic speech recognition: transcripts, WER, decoding and segmentation",
    no_args_is_help=True,
    add_completion=False,
)

# Global console for rich output
console = Console()


def _version() -> str:
    try:
        return package_version("asr-benchkit")
    except PackageNotFoundError:
        return "0.1.0"


def version_callback(value: bool):
    """Show version and exit."""
    if value:
        console.print(f"[bold blue]asrbench[/bold blue] version [green]{_version()}[/green]")
        raise typer.Exit()


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else settings.log_level.upper()
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=verbose)],
        force=True,
    )


@app.callback()
def main(
    version: Annotated[
        bool,
        typer.Option(
            "--version",
            help="Show version and exit",
            callback=version_callback,
            is_eager=True,
        ),
    ] = False,
    verbose: Annotated[
        bool,
        typer.Option("--verbose", "-v", help="Debug logging on stderr"),
    ] = False,
):
    """
    Benchmark Arabic speech recognition.

    Every command writes a JSON run report (to --report, or standard
    output) listing the inputs it read with their SHA-256 digests.
    Exit codes: 0 success, 1 runtime failure, 2 usage error.
    """
    configure_logging(verbose)


# Text preparation
app.command(name="normalize")(commands.normalize)
app.command(name="bw")(commands.bw)
app.command(name="glm")(commands.glm)
app.command(name="chunk")(commands.chunk)
app.command(name="bpe-train")(commands.bpe_train)
app.command(name="bpe-apply")(commands.bpe_apply)
# Scoring
app.command(name="score")(commands.score)
app.command(name="mr-score")(commands.mr_score)
app.command(name="gap")(commands.gap)
app.command(name="errors")(commands.errors)
app.command(name="matrix")(commands.matrix)
# Segmentation
app.command(name="vad")(commands.vad)
app.command(name="cap")(commands.cap)
app.command(name="durstats")(commands.durstats)
# Decoding
app.command(name="decode")(commands.decode)
app.command(name="lm-train")(commands.lm_train)
app.command(name="ppl")(commands.ppl)
app.command(name="kernels-check")(commands.kernels_check)
app.command(name="bench")(commands.bench)


def parse_args(argv: Sequence[str]) -> Command | None:
    """
    Parse ``argv`` into a Command without running it.

    Returns None when the arguments only asked for help or the version.
    Raises ``UsageProblem`` for malformed arguments.
    """
    command = typer.main.get_command(app)
    with capturing() as sink:
        try:
            command.main(list(argv), prog_name="asrbench", standalone_mode=False)
        except Exception as exc:
            # Parser usage errors carry exit code 2 whichever click build typer uses
            if getattr(exc, "exit_code", None) != 2:
                raise
            raise UsageProblem(exc.format_message()) from exc
    return sink[0] if sink else None


if __name__ == "__main__":
    app()
