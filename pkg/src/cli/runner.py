"""Bridge between the Typer command callbacks and the command runner."""

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from pathlib import Path
from typing import Any

import typer
from rich.console import Console
from rich.markup import escape

from ..app.errors import UsageProblem
from ..app.services.command_runner import Command, RunReport, run

logger = logging.getLogger(__name__)

# Status lines go to stderr; stdout carries the JSON report
err_console = Console(stderr=True)

_captured: ContextVar[list[Command] | None] = ContextVar("asrbench_captured", default=None)


@contextmanager
def capturing() -> Iterator[list[Command]]:
    """Collect dispatched commands instead of running them."""
    sink: list[Command] = []
    token = _captured.set(sink)
    try:
        yield sink
    finally:
        _captured.reset(token)


def dispatch(name: str, **options: Any) -> RunReport | None:
    """Build the Command for a parsed invocation and run it (or capture it)."""
    cmd = Command(name=name, options=options)
    sink = _captured.get()
    if sink is not None:
        sink.append(cmd)
        return None
    return execute(cmd)


def execute(cmd: Command) -> RunReport:
    """Run ``cmd`` and map failures onto the exit-code contract (usage 2, runtime 1)."""
    try:
        report = run(cmd)
    except UsageProblem as exc:
        err_console.print(f"[red]✗ usage:[/red] {escape(str(exc))}", soft_wrap=True)
        raise typer.Exit(2) from exc
    except Exception as exc:
        logger.debug("%s failed", cmd.name, exc_info=True)
        err_console.print(f"[red]✗ {type(exc).__name__}:[/red] {escape(str(exc))}", soft_wrap=True)
        raise typer.Exit(1) from exc

    destination = cmd.options.get("report")
    if destination is None:
        typer.echo(report.to_json(), nl=False)
    else:
        err_console.print(f"[green]✓[/green] {cmd.name}: report written to {escape(str(Path(destination)))}")
    return report
