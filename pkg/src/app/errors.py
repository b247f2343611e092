"""Exception types shared by the file readers and the command runner."""

from pathlib import Path


class FileFormatError(Exception):
    """Raised when an input file does not parse under its expected format."""

    def __init__(
        self,
        path: str | Path,
        line_no: int | None,
        expectation: str,
        got: str | None = None,
    ) -> None:
        """
        Initialize FileFormatError.

        Args:
            path: File that failed to parse
            line_no: 1-based line number, or None when the problem is file-wide
            expectation: What the reader expected at that position
            got: The offending text, truncated for display
        """
        self.path = str(path)
        self.line_no = line_no
        self.expectation = expectation
        self.got = got
        location = f"{self.path}:{line_no}" if line_no is not None else self.path
        message = f"{location}: expected {expectation}"
        if got is not None:
            shown = got if len(got) <= 60 else got[:60] + "..."
            message += f", got {shown!r}"
        super().__init__(message)


class UsageProblem(ValueError):
    """Raised by a command handler when its options are valid individually but
    unusable together (e.g. an empty benchmark condition list). The CLI maps
    it to a usage error (exit code 2)."""
