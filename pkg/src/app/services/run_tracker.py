from __future__ import annotations

import hashlib
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from time import perf_counter

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    """Handle passed to a command handler for the duration of one run.

    Every file the handler reads goes through ``read_text``/``read_bytes`` so
    the report can list exactly the inputs that were touched, with digests.
    Every file it writes goes through ``write_text``/``write_bytes`` so no
    partial output is left behind on failure.
    """
    started_at: float = field(default_factory=perf_counter)
    inputs: list[dict[str, str]] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    timings: dict[str, object] = field(default_factory=dict)

    def elapsed_s(self) -> float:
        return perf_counter() - self.started_at

    def _record(self, path: Path, data: bytes) -> None:
        digest = hashlib.sha256(data).hexdigest()
        entry = {"path": str(path), "sha256": digest}
        if entry not in self.inputs:
            self.inputs.append(entry)

    def read_bytes(self, path: Path) -> bytes:
        data = Path(path).read_bytes()
        self._record(path, data)
        return data

    def read_text(self, path: Path) -> str:
        return self.read_bytes(path).decode("utf-8")

    def record_input(self, path: Path) -> None:
        """Digest a file that a library reader opens itself."""
        self._record(path, Path(path).read_bytes())

    def write_text(self, path: Path, text: str) -> None:
        self.write_bytes(path, text.encode("utf-8"))

    def write_bytes(self, path: Path, data: bytes) -> None:
        atomic_write_bytes(Path(path), data)
        self.outputs.append(str(path))


def atomic_write_bytes(path: Path, data: bytes) -> None:
    """Write to a temp file next to ``path`` and rename it into place."""
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except FileNotFoundError:
            pass
        raise
    logger.debug("Wrote %s (%d bytes)", path, len(data))
