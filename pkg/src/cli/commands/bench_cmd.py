"""bench command: side-by-side segmentation comparison."""

from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.markup import escape
from rich.table import Table
from typing_extensions import Annotated

from ...app.services.bench import TABLE_COLUMNS
from ..runner import dispatch
from .options import ReportOption, WorkersOption

console = Console()


def _show_table(rows: list[dict]) -> None:
    table = Table(title="Segmentation conditions")
    for column in TABLE_COLUMNS:
        table.add_column(column, justify="left" if column == "condition" else "right")
    for row in rows:
        if "error" in row:
            table.add_row(row["condition"], f"[red]{escape(row['error'])}[/red]", *["" for _ in TABLE_COLUMNS[2:]])
        else:
            table.add_row(*[str(row[column]) for column in TABLE_COLUMNS])
    console.print(table)


def bench(
    config: Annotated[Path, typer.Option("--config", "-c", help="YAML file listing the conditions")],
    tsv: Annotated[Optional[Path], typer.Option("--tsv", help="Also write the comparison table as TSV")] = None,
    workers: WorkersOption = None,
    report: ReportOption = None,
):
    """
    Run cap, durstats and score for every condition of a YAML config.

    Example:
        asrbench bench -c conditions.yaml --tsv table.tsv --report bench.json
    """
    result = dispatch("bench", config=config, tsv=tsv, workers=workers, report=report)
    # The table goes to stdout only when stdout is not carrying the report
    if result is not None and report is not None:
        _show_table(result.results["table"])
