"""
CTC scoring over a posterior matrix.

``ctc_log_prob`` runs the forward recursion over the blank-interleaved
label sequence. ``CtcPrefixScorer`` carries the prefix variant used by the
beam search: for a prefix g it keeps, per frame t, the log-probability that
frames 0..t collapse to g with the last frame emitting a label (``r_n``) or
a blank (``r_b``). Everything stays in the log domain; -inf is an ordinary
value.
"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .models import PosteriorMatrix, Vocab

NEG_INF = -np.inf


def label_ids(labels: Sequence[str], vocab: Vocab) -> list[int]:
    ids = [vocab.index(sym) for sym in labels]
    if vocab.blank_id in ids:
        raise ValueError("label sequence must not contain the blank symbol")
    return ids


def _check_vocab(post: PosteriorMatrix, vocab: Vocab) -> None:
    if post.vocab_size != len(vocab):
        raise ValueError(f"posterior has {post.vocab_size} columns but vocabulary has {len(vocab)} symbols")


def ctc_log_prob(post: PosteriorMatrix, labels: Sequence[str], vocab: Vocab) -> float:
    """
    log P(labels | post), summed over every frame alignment that collapses
    to ``labels``. Returns -inf when the labels cannot fit in T frames.
    """
    _check_vocab(post, vocab)
    ids = label_ids(labels, vocab)
    logp = post.logp
    T = post.frames
    blank = vocab.blank_id

    # Repeated labels need a blank between them
    if len(ids) + sum(1 for a, b in zip(ids, ids[1:]) if a == b) > T:
        return float(NEG_INF)
    if not ids:
        return float(np.sum(logp[:, blank]))

    ext = np.full(2 * len(ids) + 1, blank, dtype=np.int64)
    ext[1::2] = ids
    S = ext.shape[0]
    # s-2 transition allowed into a label that differs from the label two back
    skip = np.zeros(S, dtype=bool)
    skip[3::2] = ext[3::2] != ext[1:-2:2]

    alpha = np.full(S, NEG_INF)
    alpha[0] = logp[0, blank]
    alpha[1] = logp[0, ext[1]]
    for t in range(1, T):
        prev1 = np.concatenate(([NEG_INF], alpha[:-1]))
        prev2 = np.concatenate(([NEG_INF, NEG_INF], alpha[:-2]))
        prev2 = np.where(skip, prev2, NEG_INF)
        alpha = np.logaddexp(np.logaddexp(alpha, prev1), prev2) + logp[t, ext]

    return float(np.logaddexp(alpha[-1], alpha[-2]))


def ctc_greedy(post: PosteriorMatrix, vocab: Vocab) -> list[str]:
    """Best-path decoding: frame argmax (lowest index on ties), collapse repeats, drop blanks."""
    _check_vocab(post, vocab)
    best = np.argmax(post.logp, axis=1)
    out: list[str] = []
    prev = None
    for idx in best.tolist():
        if idx != prev and idx != vocab.blank_id:
            out.append(vocab.symbols[idx])
        prev = idx
    return out


@dataclass(frozen=True, eq=False)
class CtcPrefixState:
    """Per-frame forward variables of one prefix."""

    r_n: np.ndarray
    r_b: np.ndarray
    last: int | None


class CtcPrefixScorer:
    """Prefix probabilities for label-synchronous decoding over one posterior matrix."""

    def __init__(self, post: PosteriorMatrix, vocab: Vocab) -> None:
        _check_vocab(post, vocab)
        self.logp = post.logp
        self.blank = vocab.blank_id
        self.frames = post.frames

    def initial_state(self) -> CtcPrefixState:
        r_b = np.cumsum(self.logp[:, self.blank])
        r_n = np.full(self.frames, NEG_INF)
        return CtcPrefixState(r_n, r_b, None)

    def full_score(self, state: CtcPrefixState) -> float:
        """log P of exactly this prefix (equals ``ctc_log_prob`` of the prefix)."""
        return float(np.logaddexp(state.r_n[-1], state.r_b[-1]))

    def extend(self, state: CtcPrefixState, symbol_ids: Sequence[int]) -> tuple[np.ndarray, list[CtcPrefixState]]:
        """
        Prefix scores for g + c over every c in ``symbol_ids``.

        Returns the log-probabilities that the output starts with g + c
        (summed over all continuations) and the successor states.
        """
        ids = np.asarray(symbol_ids, dtype=np.int64)
        if (ids == self.blank).any():
            raise ValueError("cannot extend a prefix by the blank symbol")
        T = self.frames
        C = ids.shape[0]
        x = self.logp[:, ids]  # T x C

        phi = np.repeat(np.logaddexp(state.r_n, state.r_b)[:, None], C, axis=1)
        if state.last is not None:
            same = ids == state.last
            phi[:, same] = state.r_b[:, None]

        r_n = np.full((T, C), NEG_INF)
        r_b = np.full((T, C), NEG_INF)
        if state.last is None:
            r_n[0] = x[0]
        for t in range(1, T):
            r_n[t] = np.logaddexp(r_n[t - 1], phi[t - 1]) + x[t]
            r_b[t] = np.logaddexp(r_n[t - 1], r_b[t - 1]) + self.logp[t, self.blank]

        if T > 1:
            psi = np.logaddexp.reduce(np.vstack([r_n[:1], phi[:-1] + x[1:]]), axis=0)
        else:
            psi = r_n[0].copy()

        states = [CtcPrefixState(r_n[:, i].copy(), r_b[:, i].copy(), int(c)) for i, c in enumerate(ids)]
        return psi, states
