"""
Posterior matrix files.

Layout, UTF-8::

    ctcpost v1 <T> <V> <blank_id>
    <V symbols, space-separated>
    <T lines of V log-probabilities; "-inf" allowed>
"""

from pathlib import Path

import numpy as np

from .errors import FileFormatError
from .models import PosteriorMatrix, Vocab

POSTERIOR_HEADER = "ctcpost v1"


class PosteriorFormatError(FileFormatError):
    """Raised when a posterior file does not parse or is not normalized."""


def parse_posterior(text: str, source: str | Path = "<posterior>") -> tuple[PosteriorMatrix, Vocab]:
    lines = text.splitlines()
    header = lines[0].split() if lines else []
    if len(header) != 5 or " ".join(header[:2]) != POSTERIOR_HEADER:
        raise PosteriorFormatError(source, 1, f"header '{POSTERIOR_HEADER} T V blank_id'", lines[0] if lines else "")
    try:
        frames, size, blank_id = (int(x) for x in header[2:])
    except ValueError as exc:
        raise PosteriorFormatError(source, 1, "integer T, V and blank_id", lines[0]) from exc

    if len(lines) < 2:
        raise PosteriorFormatError(source, 2, f"{size} vocabulary symbols", "")
    symbols = lines[1].split()
    if len(symbols) != size:
        raise PosteriorFormatError(source, 2, f"{size} vocabulary symbols", lines[1])
    try:
        vocab = Vocab(tuple(symbols), blank_id)
    except ValueError as exc:
        raise PosteriorFormatError(source, 2, str(exc), lines[1]) from exc

    rows = [(no, line) for no, line in enumerate(lines[2:], 3) if line.strip()]
    if len(rows) != frames:
        raise PosteriorFormatError(source, None, f"{frames} frame line(s), found {len(rows)}")
    data = np.empty((frames, size), dtype=np.float64)
    for t, (line_no, line) in enumerate(rows):
        fields = line.split()
        if len(fields) != size:
            raise PosteriorFormatError(source, line_no, f"{size} log-probabilities", line)
        try:
            data[t] = [float(f) for f in fields]
        except ValueError as exc:
            raise PosteriorFormatError(source, line_no, "decimal log-probabilities", line) from exc
    try:
        post = PosteriorMatrix(data)
    except ValueError as exc:
        raise PosteriorFormatError(source, None, f"normalized log-probability rows ({exc})") from exc
    return post, vocab


def read_posterior(path: Path) -> tuple[PosteriorMatrix, Vocab]:
    return parse_posterior(path.read_text(encoding="utf-8"), path)


def format_posterior(post: PosteriorMatrix, vocab: Vocab) -> str:
    lines = [
        f"{POSTERIOR_HEADER} {post.frames} {post.vocab_size} {vocab.blank_id}",
        " ".join(vocab.symbols),
    ]
    lines += [" ".join(repr(float(x)) for x in row) for row in post.logp]
    return "\n".join(lines) + "\n"
