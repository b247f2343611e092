"""
Command dispatch and run reports.

A ``Command`` is a parsed invocation: a command name plus its option map.
``run`` looks up the handler registered for the name, gives it a fresh
``RunContext`` and wraps the payload it returns in a ``RunReport``. The
report is written to the ``report`` option's path (atomically) or returned
for the caller to print.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field

from src.app.config import settings
from src.app.services.run_tracker import RunContext, atomic_write_bytes

logger = logging.getLogger(__name__)

CommandName = Literal[
    "normalize",
    "bw",
    "glm",
    "chunk",
    "bpe-train",
    "bpe-apply",
    "score",
    "mr-score",
    "gap",
    "errors",
    "matrix",
    "vad",
    "cap",
    "durstats",
    "decode",
    "lm-train",
    "ppl",
    "kernels-check",
    "bench",
]

# Options that change how a run executes but not what it computes
NON_SEMANTIC_OPTIONS = frozenset({"workers", "report"})

Handler = Callable[[dict[str, Any], RunContext], dict[str, Any]]
HANDLERS: dict[str, Handler] = {}


class Command(BaseModel):
    name: CommandName
    options: dict[str, Any] = Field(default_factory=dict)

    def echo(self) -> dict[str, Any]:
        options = {k: v for k, v in self.options.items() if k not in NON_SEMANTIC_OPTIONS}
        return {"name": self.name, "options": _jsonable(options)}


class InputDigest(BaseModel):
    path: str
    sha256: str


class RunReport(BaseModel):
    """Machine-readable result of one run. Only ``wall_time_s`` and
    ``timings`` vary between runs on identical inputs."""

    command: dict[str, Any]
    version: str
    inputs: list[InputDigest]
    outputs: list[str]
    results: dict[str, Any]
    wall_time_s: float
    timings: dict[str, Any] = Field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def handler(name: str) -> Callable[[Handler], Handler]:
    """Register the decorated function as the handler of command ``name``."""

    def register(fn: Handler) -> Handler:
        if name in HANDLERS:
            raise RuntimeError(f"duplicate handler for command {name!r}")
        HANDLERS[name] = fn
        return fn

    return register


def run(cmd: Command) -> RunReport:
    """Execute ``cmd`` and return its report (also written to ``report`` when given)."""
    fn = HANDLERS.get(cmd.name)
    if fn is None:
        raise KeyError(f"no handler registered for {cmd.name!r}")
    ctx = RunContext()
    logger.info("Running %s", cmd.name)
    results = fn(dict(cmd.options), ctx)
    report = RunReport(
        command=cmd.echo(),
        version=settings.report_version,
        inputs=[InputDigest(**entry) for entry in ctx.inputs],
        outputs=ctx.outputs,
        results=_jsonable(results),
        wall_time_s=ctx.elapsed_s(),
        timings=_jsonable(ctx.timings),
    )
    destination = cmd.options.get("report")
    if destination is not None:
        atomic_write_bytes(Path(destination), report.to_json().encode("utf-8"))
    return report


# Handler modules register themselves on import
from src.app.services import (  # noqa: E402,F401
    bench,
    decode_tasks,
    kernels_check,
    scoring_tasks,
    segment_tasks,
    text_tasks,
)
