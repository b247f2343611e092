"""Overlapping fixed-size chunking of long token sequences for LM training."""

from collections.abc import Sequence


def chunk_starts(n: int, max_len: int, overlap: int) -> list[int]:
    """Start offsets of the chunks ``chunk_text`` produces for ``n`` tokens."""
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    if not 0 <= overlap < max_len:
        raise ValueError(f"overlap must satisfy 0 <= overlap < max_len, got {overlap} (max_len {max_len})")
    if n == 0:
        return []
    stride = max_len - overlap
    starts = [0]
    while starts[-1] + max_len < n:
        starts.append(starts[-1] + stride)
    return starts


def chunk_text(
    tokens: Sequence[str],
    max_len: int = 200,
    overlap: int = 50,
) -> list[list[str]]:
    """
    Split ``tokens`` into windows of at most ``max_len`` tokens, consecutive
    windows sharing ``overlap`` tokens. The last window ends at the input end.

    Args:
        tokens: Input token sequence
        max_len: Maximum chunk length (default: 200)
        overlap: Tokens shared by consecutive chunks (default: 50)

    Returns:
        List of chunks; empty input gives no chunks
    """
    tokens = list(tokens)
    return [tokens[s : s + max_len] for s in chunk_starts(len(tokens), max_len, overlap)]


def unchunk(chunks: Sequence[Sequence[str]], overlap: int) -> list[str]:
    """Inverse of ``chunk_text``: drop each later chunk's leading overlap."""
    out: list[str] = []
    for i, chunk in enumerate(chunks):
        out.extend(chunk if i == 0 else chunk[overlap:])
    return out
