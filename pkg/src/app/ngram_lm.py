"""
Add-k smoothed n-gram language model.

For n >= 2 each context distributes probability over the training
vocabulary plus the end symbol:

    P(w | ctx) = (c(ctx, w) + k) / (c(ctx) + k * (|V| + 1))

with contexts padded by ``<s>``. The unigram model keeps the end symbol out
of its event space: P(w) = (c(w) + k) / (N + k * |V|) over the N training
tokens, and utterance ends are scored by a separate add-k stop/continue
estimate, P(</s>) = (utterances + k) / (N + utterances + 2k).

Model file::

    ngram v1 <n> <k>
    <context tokens>|<symbol> <count>
    ...

``|`` and ``%`` inside tokens are written as ``%7C`` and ``%25``.
"""

import logging
import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FileFormatError
from .models import Transcript

logger = logging.getLogger(__name__)

BOS = "<s>"
EOS = "</s>"
LM_HEADER = "ngram v1"


class LmFormatError(FileFormatError):
    """Raised when an LM file does not parse."""


@dataclass(frozen=True)
class NgramLm:
    """Counts keyed by context tuple (length n-1), each a Counter over symbols and EOS."""

    order: int
    k: float
    vocab: frozenset[str]
    counts: dict[tuple[str, ...], Counter] = field(compare=False)
    _totals: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError(f"n-gram order must be >= 1, got {self.order}")
        if not self.k > 0:
            raise ValueError(f"smoothing constant k must be > 0, got {self.k}")
        object.__setattr__(self, "vocab", frozenset(self.vocab))
        if not self.vocab:
            raise ValueError("n-gram model needs a non-empty vocabulary")
        object.__setattr__(self, "_totals", {ctx: sum(c.values()) for ctx, c in self.counts.items()})

    def _context(self, history: Sequence[str]) -> tuple[str, ...]:
        width = self.order - 1
        if width == 0:
            return ()
        padded = (BOS,) * width + tuple(history)
        return padded[-width:]

    def prob(self, symbol: str, history: Sequence[str] = ()) -> float:
        """P(symbol | history); ``symbol`` may be EOS."""
        ctx = self._context(history)
        table = self.counts.get(ctx, Counter())
        if self.order == 1:
            tokens = self._totals.get((), 0) - table[EOS]
            if symbol == EOS:
                return (table[EOS] + self.k) / (tokens + table[EOS] + 2 * self.k)
            return (table[symbol] + self.k) / (tokens + self.k * len(self.vocab))
        return (table[symbol] + self.k) / (self._totals.get(ctx, 0) + self.k * (len(self.vocab) + 1))

    def log_prob(self, symbol: str, history: Sequence[str] = ()) -> float:
        return math.log(self.prob(symbol, history))

    def sentence_log_prob(self, tokens: Sequence[str]) -> float:
        """log P of the tokens followed by the end symbol."""
        terms = [self.log_prob(tok, tokens[:i]) for i, tok in enumerate(tokens)]
        terms.append(self.log_prob(EOS, tokens))
        return math.fsum(terms)

    # ScorerHandle protocol: the state is the (n-1)-token context

    def start(self) -> tuple[str, ...]:
        return self._context(())

    def score(self, state: tuple[str, ...], symbol: str) -> tuple[float, tuple[str, ...]]:
        return self.log_prob(symbol, state), self._context(state + (symbol,))

    def finish(self, state: tuple[str, ...]) -> float:
        return self.log_prob(EOS, state)


def lm_train(corpus: Iterable[Transcript], n: int = 3, k: float = 1.0) -> NgramLm:
    """Count every n-gram (with begin/end padding) of the corpus."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not k > 0:
        raise ValueError(f"k must be > 0, got {k}")
    counts: dict[tuple[str, ...], Counter] = {}
    vocab: set[str] = set()
    utterances = 0
    width = n - 1
    for transcript in corpus:
        utterances += 1
        vocab.update(transcript.tokens)
        padded = (BOS,) * width + transcript.tokens + (EOS,)
        for i in range(width, len(padded)):
            ctx = padded[i - width : i]
            counts.setdefault(ctx, Counter())[padded[i]] += 1
    if not vocab:
        raise ValueError("cannot train an n-gram model on an empty corpus")
    logger.info("Trained %d-gram model: %d utterance(s), %d symbol(s)", n, utterances, len(vocab))
    return NgramLm(n, float(k), frozenset(vocab), counts)


def perplexity(lm: NgramLm, text: Iterable[Transcript]) -> float:
    """exp of the negative mean log-probability per token, one end event per utterance included."""
    terms: list[float] = []
    for transcript in text:
        tokens = transcript.tokens
        terms.extend(lm.log_prob(tok, tokens[:i]) for i, tok in enumerate(tokens))
        terms.append(lm.log_prob(EOS, tokens))
    if not terms:
        raise ValueError("cannot compute perplexity of empty text")
    return math.exp(-math.fsum(terms) / len(terms))


def _escape(token: str) -> str:
    return token.replace("%", "%25").replace("|", "%7C")


def _unescape(token: str) -> str:
    return token.replace("%7C", "|").replace("%25", "%")


def dump_lm(lm: NgramLm) -> str:
    lines = [f"{LM_HEADER} {lm.order} {lm.k!r}"]
    for ctx in sorted(lm.counts):
        context = " ".join(_escape(t) for t in ctx)
        for symbol, count in sorted(lm.counts[ctx].items()):
            lines.append(f"{context}|{_escape(symbol)} {count}")
    return "\n".join(lines) + "\n"


def parse_lm(text: str, source: str | Path = "<lm>") -> NgramLm:
    lines = text.splitlines()
    header = lines[0].split() if lines else []
    if len(header) != 4 or " ".join(header[:2]) != LM_HEADER:
        raise LmFormatError(source, 1, f"header '{LM_HEADER} <n> <k>'", lines[0] if lines else "")
    try:
        order, k = int(header[2]), float(header[3])
    except ValueError as exc:
        raise LmFormatError(source, 1, "integer order and real k", lines[0]) from exc

    counts: dict[tuple[str, ...], Counter] = {}
    vocab: set[str] = set()
    for line_no, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        body, _, count_text = line.rpartition(" ")
        context, sep, symbol = body.partition("|")
        if not sep or not symbol or not count_text.isdigit():
            raise LmFormatError(source, line_no, "'<context>|<symbol> <count>'", line)
        ctx = tuple(_unescape(t) for t in context.split())
        if len(ctx) != order - 1:
            raise LmFormatError(source, line_no, f"a context of {order - 1} token(s)", line)
        symbol = _unescape(symbol)
        counts.setdefault(ctx, Counter())[symbol] = int(count_text)
        if symbol != EOS:
            vocab.add(symbol)
    try:
        return NgramLm(order, k, frozenset(vocab), counts)
    except ValueError as exc:
        raise LmFormatError(source, None, str(exc)) from exc
