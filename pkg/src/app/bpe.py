"""
Byte-pair-encoding subword model.

Merges are learned within words only (no cross-word merges, no end-of-word
marker). Each step merges the most frequent adjacent symbol pair; ties go
to the lexicographically smallest pair, so training is deterministic.

Model file::

    bpe v1
    left right
    ...
"""

import logging
from collections import Counter
from collections.abc import Iterable, Sequence
from pathlib import Path

from .errors import FileFormatError
from .models import BpeModel, Transcript

logger = logging.getLogger(__name__)

BPE_HEADER = "bpe v1"
# Continuation marker used when subword sequences are written as text
CONTINUATION = "@@"


class BpeFormatError(FileFormatError):
    """Raised when a BPE model file does not parse."""


def _merge_word(symbols: tuple[str, ...], pair: tuple[str, str]) -> tuple[str, ...]:
    left, right = pair
    out: list[str] = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == left and symbols[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


def bpe_train(corpus: Iterable[Transcript], num_merges: int) -> BpeModel:
    """Learn up to ``num_merges`` merges; stops early when no pair occurs twice."""
    if num_merges < 0:
        raise ValueError(f"num_merges must be >= 0, got {num_merges}")

    word_freq: Counter[str] = Counter()
    for transcript in corpus:
        word_freq.update(transcript.tokens)
    base_symbols = frozenset(ch for word in word_freq for ch in word)
    vocab: dict[tuple[str, ...], int] = {tuple(word): freq for word, freq in word_freq.items()}

    merges: list[tuple[str, str]] = []
    while len(merges) < num_merges:
        pair_counts: Counter[tuple[str, str]] = Counter()
        for symbols, freq in vocab.items():
            for pair in zip(symbols, symbols[1:]):
                pair_counts[pair] += freq
        if not pair_counts:
            break
        best, count = min(pair_counts.items(), key=lambda item: (-item[1], item[0]))
        if count < 2:
            break
        merges.append(best)
        merged: Counter[tuple[str, ...]] = Counter()
        for symbols, freq in vocab.items():
            merged[_merge_word(symbols, best)] += freq
        vocab = dict(merged)

    logger.info("Learned %d BPE merge(s) over %d word type(s)", len(merges), len(word_freq))
    return BpeModel(tuple(merges), base_symbols)


def bpe_encode(model: BpeModel, word: str) -> list[str]:
    """Split ``word`` into subword symbols by applying merges in model order."""
    symbols = tuple(word)
    for pair in model.merges:
        if len(symbols) < 2:
            break
        symbols = _merge_word(symbols, pair)
    return list(symbols)


def bpe_decode(symbols: Sequence[str]) -> str:
    return "".join(symbols)


def encode_tokens(model: BpeModel, tokens: Sequence[str]) -> list[str]:
    """Encode a token sequence, marking word-internal boundaries with ``@@``."""
    out: list[str] = []
    for token in tokens:
        pieces = bpe_encode(model, token)
        out.extend(p + CONTINUATION for p in pieces[:-1])
        out.append(pieces[-1])
    return out


def decode_tokens(pieces: Sequence[str]) -> list[str]:
    """Join ``@@``-marked subword pieces back into words."""
    words: list[str] = []
    current = ""
    for piece in pieces:
        if piece.endswith(CONTINUATION):
            current += piece[: -len(CONTINUATION)]
        else:
            words.append(current + piece)
            current = ""
    if current:
        words.append(current)
    return words


def dump_bpe(model: BpeModel) -> str:
    lines = [BPE_HEADER] + [f"{left} {right}" for left, right in model.merges]
    return "\n".join(lines) + "\n"


def parse_bpe(text: str, source: str | Path = "<bpe>") -> BpeModel:
    lines = text.splitlines()
    if not lines or lines[0].strip() != BPE_HEADER:
        raise BpeFormatError(source, 1, f"header {BPE_HEADER!r}", lines[0] if lines else "")
    merges = []
    for line_no, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BpeFormatError(source, line_no, "'left right'", line)
        merges.append((parts[0], parts[1]))
    if len(set(merges)) != len(merges):
        raise BpeFormatError(source, None, "a duplicate-free merge list")
    base = frozenset(ch for left, right in merges for ch in left + right)
    return BpeModel(tuple(merges), base)
