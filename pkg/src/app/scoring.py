"""
Corpus scoring: pooled WER, multi-reference WER over a confusion network,
averaged WER, error tables, inter-annotator disagreement and the
disagreement gap.

All corpus figures pool counts over utterances before dividing, so results
do not depend on utterance order.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .alignment import align
from .models import (
    DURATION_BUCKETS,
    EPSILON,
    AlignmentOps,
    ConfusionNetwork,
    DisagreementMatrix,
    ErrorCounts,
    OpKind,
    Transcript,
    duration_bucket,
)

logger = logging.getLogger(__name__)


class ScoringError(Exception):
    """Raised when a corpus cannot be scored as requested."""


# ── single reference ────────────────────────────────────────────────────────


def wer(pairs: Iterable[tuple[Transcript, Transcript]]) -> ErrorCounts:
    """Pooled error counts over (reference, hypothesis) pairs."""
    total = ErrorCounts.zero()
    for ref, hyp in pairs:
        total = total + align(ref, hyp).counts()
    if total.ref_len == 0:
        raise ScoringError("cannot compute WER: every reference is empty")
    return total


def per_utterance(pairs: Iterable[tuple[Transcript, Transcript]]) -> list[dict]:
    """Per-utterance counts, in the order given."""
    rows = []
    for ref, hyp in pairs:
        counts = align(ref, hyp).counts()
        rows.append({"utt_id": ref.utt_id, **counts.to_dict()})
    return rows


# ── confusion network / MR-WER ──────────────────────────────────────────────

_C, _S, _D, _I = range(4)


def _network_backtrace(
    slots: Sequence[frozenset],
    tokens: Sequence[str],
) -> list[tuple[int, int | None, str | None]]:
    """
    Align ``tokens`` to ``slots`` for network construction.

    A token matching any alternative costs 0, skipping a slot costs 0 when it
    already admits epsilon and 1 otherwise, insertions cost 1. Returns
    (op, slot index, token) steps in forward order.
    """
    n, m = len(slots), len(tokens)
    cost = np.zeros((n + 1, m + 1), dtype=np.int64)
    for i in range(1, n + 1):
        cost[i, 0] = cost[i - 1, 0] + (0 if EPSILON in slots[i - 1] else 1)
    cost[0, :] = np.arange(m + 1)
    for i in range(1, n + 1):
        skip = 0 if EPSILON in slots[i - 1] else 1
        for j in range(1, m + 1):
            diag = cost[i - 1, j - 1] + (0 if tokens[j - 1] in slots[i - 1] else 1)
            cost[i, j] = min(diag, cost[i - 1, j] + skip, cost[i, j - 1] + 1)

    steps = []
    i, j = n, m
    while i > 0 or j > 0:
        here = cost[i, j]
        if i > 0 and j > 0:
            hit = tokens[j - 1] in slots[i - 1]
            if hit and cost[i - 1, j - 1] == here:
                steps.append((_C, i - 1, tokens[j - 1]))
                i, j = i - 1, j - 1
                continue
            if not hit and cost[i - 1, j - 1] + 1 == here:
                steps.append((_S, i - 1, tokens[j - 1]))
                i, j = i - 1, j - 1
                continue
        if i > 0 and cost[i - 1, j] + (0 if EPSILON in slots[i - 1] else 1) == here:
            steps.append((_D, i - 1, None))
            i -= 1
        else:
            steps.append((_I, i, tokens[j - 1]))
            j -= 1
    steps.reverse()
    return steps


def build_confusion_network(refs: Sequence[Transcript]) -> ConfusionNetwork:
    """
    Fold several references into one slot sequence.

    The first reference seeds one slot per token. Each further reference is
    aligned to the network; matched/substituted tokens join their slot,
    skipped slots gain epsilon and inserted tokens open a new {token, eps}
    slot. Every reference stays a path through the result.
    """
    if not refs:
        raise ScoringError("need at least one reference to build a confusion network")
    slots: list[set] = [{tok} for tok in refs[0].tokens]
    for ref in refs[1:]:
        steps = _network_backtrace([frozenset(s) for s in slots], ref.tokens)
        new_slots: list[set] = []
        # Insertions are reported before the slot index they precede
        for op, slot_idx, token in steps:
            if op == _I:
                new_slots.append({token, EPSILON})
            elif op == _D:
                new_slots.append(slots[slot_idx] | {EPSILON})
            else:
                new_slots.append(slots[slot_idx] | {token})
        slots = new_slots
    return ConfusionNetwork(tuple(frozenset(s) for s in slots))


def network_counts(network: ConfusionNetwork, hyp: Sequence[str]) -> ErrorCounts:
    """
    Minimum edit cost of ``hyp`` against any path of ``network``.

    Ties between equally cheap paths go to the longer reference path. N is
    the reference-side token count of the chosen path.
    """
    slots = network.slots
    n, m = len(slots), len(hyp)
    # (errors, -ref_len, subs, dels, ins) compared lexicographically on the first two
    INF = (math.inf, 0, 0, 0, 0)
    table = [[INF] * (m + 1) for _ in range(n + 1)]
    table[0][0] = (0, 0, 0, 0, 0)

    def better(a, b):
        return a[:2] < b[:2]

    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            best = INF
            if i > 0 and j > 0:
                e, nl, s, d, ins = table[i - 1][j - 1]
                if hyp[j - 1] in slots[i - 1]:
                    cand = (e, nl - 1, s, d, ins)
                else:
                    cand = (e + 1, nl - 1, s + 1, d, ins)
                if better(cand, best):
                    best = cand
            if i > 0:
                e, nl, s, d, ins = table[i - 1][j]
                if EPSILON in slots[i - 1]:
                    cand = (e, nl, s, d, ins)
                else:
                    cand = (e + 1, nl - 1, s, d + 1, ins)
                if better(cand, best):
                    best = cand
            if j > 0:
                e, nl, s, d, ins = table[i][j - 1]
                cand = (e + 1, nl, s, d, ins + 1)
                if better(cand, best):
                    best = cand
            table[i][j] = best

    _, neg_len, subs, dels, ins = table[n][m]
    return ErrorCounts(subs, dels, ins, -neg_len)


def _check_ref_sets(ref_sets: Sequence[Sequence[Transcript]]) -> None:
    for k, refs in enumerate(ref_sets):
        if not refs:
            raise ScoringError(f"utterance #{k} has an empty reference set")


def mr_wer(
    ref_sets: Sequence[Sequence[Transcript]],
    hyps: Sequence[Transcript],
) -> ErrorCounts:
    """Multi-reference WER: pooled network edit cost over utterances."""
    if len(ref_sets) != len(hyps):
        raise ScoringError(f"{len(ref_sets)} reference sets for {len(hyps)} hypotheses")
    _check_ref_sets(ref_sets)
    total = ErrorCounts.zero()
    for refs, hyp in zip(ref_sets, hyps):
        total = total + network_counts(build_confusion_network(refs), hyp.tokens)
    if total.ref_len == 0:
        raise ScoringError("cannot compute MR-WER: every reference path is empty")
    return total


def av_wer(
    ref_sets: Sequence[Sequence[Transcript]],
    hyps: Sequence[Transcript],
) -> float:
    """Mean over annotators k of the pooled WER of the hypotheses against reference k (percent)."""
    if len(ref_sets) != len(hyps):
        raise ScoringError(f"{len(ref_sets)} reference sets for {len(hyps)} hypotheses")
    _check_ref_sets(ref_sets)
    annotators = {len(refs) for refs in ref_sets}
    if len(annotators) != 1:
        raise ScoringError(f"ragged annotator counts across utterances: {sorted(annotators)}")
    k_count = annotators.pop()
    rates = []
    for k in range(k_count):
        counts = wer((refs[k], hyp) for refs, hyp in zip(ref_sets, hyps))
        rates.append(100.0 * counts.rate)
    return sum(rates) / k_count


# ── error tables ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class TopErrors:
    """Ranked substitution, insertion and deletion tables."""

    substitutions: tuple[tuple[int, str, str], ...]
    insertions: tuple[tuple[int, str], ...]
    deletions: tuple[tuple[int, str], ...]

    def formatted(self) -> dict[str, list[str]]:
        return {
            "substitutions": [f"{c}: {r} / {h}" for c, r, h in self.substitutions],
            "insertions": [f"{c}: {h}" for c, h in self.insertions],
            "deletions": [f"{c}: {r}" for c, r in self.deletions],
        }

    def to_tsv(self) -> str:
        lines = ["table\tcount\tref\thyp"]
        lines += [f"substitution\t{c}\t{r}\t{h}" for c, r, h in self.substitutions]
        lines += [f"insertion\t{c}\t\t{h}" for c, h in self.insertions]
        lines += [f"deletion\t{c}\t{r}\t" for c, r in self.deletions]
        return "\n".join(lines) + "\n"


def _ranked(counter: Counter, n: int | None) -> list:
    ranked = sorted(counter.items(), key=lambda item: (-item[1], item[0]))
    return ranked if n is None else ranked[:n]


def top_errors(alignments: Iterable[AlignmentOps], n: int | None = 10) -> TopErrors:
    """Most frequent errors; ``n=None`` keeps every entry."""
    if n is not None and n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    subs: Counter[tuple[str, str]] = Counter()
    ins: Counter[str] = Counter()
    dels: Counter[str] = Counter()
    for alignment in alignments:
        for op in alignment.ops:
            if op.kind == OpKind.SUB:
                subs[(op.ref, op.hyp)] += 1
            elif op.kind == OpKind.INS:
                ins[op.hyp] += 1
            elif op.kind == OpKind.DEL:
                dels[op.ref] += 1
    return TopErrors(
        substitutions=tuple((c, r, h) for (r, h), c in _ranked(subs, n)),
        insertions=tuple((c, h) for h, c in _ranked(ins, n)),
        deletions=tuple((c, r) for r, c in _ranked(dels, n)),
    )


# ── inter-annotator disagreement ────────────────────────────────────────────


def disagreement_matrix(transcript_sets: Mapping[str, Sequence[Transcript]]) -> DisagreementMatrix:
    """
    Pooled WER (percent) for every ordered pair of transcript collections:
    cell (row h, column r) scores h as hypothesis against r as reference.
    """
    labels = tuple(transcript_sets)
    if len(labels) < 2:
        raise ScoringError("need at least two transcript collections")
    by_label = {label: {t.utt_id: t for t in transcript_sets[label]} for label in labels}
    ids = set(by_label[labels[0]])
    for label in labels[1:]:
        if set(by_label[label]) != ids:
            diff = sorted(ids.symmetric_difference(by_label[label]))
            raise ScoringError(
                f"{label!r} covers different utterances than {labels[0]!r}: {', '.join(diff[:5])}"
            )
    order = sorted(ids)

    cells = []
    for h in labels:
        row = []
        for r in labels:
            if h == r:
                row.append(0.0)
                continue
            counts = wer((by_label[r][u], by_label[h][u]) for u in order)
            row.append(100.0 * counts.rate)
        cells.append(tuple(row))
    return DisagreementMatrix(labels, tuple(cells))


def gap(a_disag: Sequence[float], b_disag: Sequence[Sequence[float]]) -> float:
    """
    Inter-annotation disagreement gap of a member ``a`` against group B.

    ``a_disag[j]`` is disag(a, b_j) for j < J; ``b_disag[j][k]`` is
    disag(b_j, b_k) over the K members of B (diagonal ignored). Evaluated as
    printed: the sum over j and k != j of |disag(a, b_j) - disag(b_j, b_k)|,
    scaled by 1 / (J + K).
    """
    a = np.asarray(a_disag, dtype=np.float64)
    b = np.asarray(b_disag, dtype=np.float64)
    J = a.shape[0]
    if J < 1:
        raise ScoringError("gap needs at least one a-to-B disagreement")
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ScoringError(f"intra-group disagreements must form a square matrix, got shape {b.shape}")
    K = b.shape[0]
    if K < 2:
        raise ScoringError("gap needs a group of at least two members")
    if J > K:
        raise ScoringError(f"{J} a-to-B values for a group of {K}")
    diffs = np.abs(a[:, None] - b[:J, :])
    off_diagonal = ~np.eye(J, K, dtype=bool)
    return float(diffs[off_diagonal].sum() / (J + K))


def gap_from_matrix(matrix: DisagreementMatrix, member: str, group: Sequence[str]) -> float:
    """Gap of ``member`` against ``group`` read from a disagreement matrix."""
    for label in (member, *group):
        if label not in matrix.labels:
            raise ScoringError(f"label {label!r} not in matrix ({', '.join(matrix.labels)})")
    a = [matrix.cell(member, b) for b in group]
    b = [[matrix.cell(bj, bk) for bk in group] for bj in group]
    return gap(a, b)


# ── duration-bucketed scoring ───────────────────────────────────────────────


def wer_by_duration(
    pairs: Iterable[tuple[Transcript, Transcript]],
    durations: Mapping[str, float],
) -> dict[str, dict]:
    """Pooled WER per segment-duration range; utterances without a duration are skipped."""
    grouped: dict[str, ErrorCounts] = {name: ErrorCounts.zero() for name, _, _ in DURATION_BUCKETS}
    utts: Counter[str] = Counter()
    skipped = 0
    for ref, hyp in pairs:
        duration = durations.get(ref.utt_id)
        if duration is None:
            skipped += 1
            continue
        bucket = duration_bucket(duration)
        grouped[bucket] = grouped[bucket] + align(ref, hyp).counts()
        utts[bucket] += 1
    if skipped:
        logger.warning("%d utterance(s) had no segment duration and were not bucketed", skipped)
    return {name: {"utterances": utts[name], **grouped[name].to_dict()} for name in grouped}
