"""
Levenshtein alignment of token sequences.

Unit costs for substitution, deletion and insertion. The backtrace walks
from the end and, among predecessors that keep the path optimal, prefers
Correct > Substitution > Deletion > Insertion, so the operation sequence
(and every table built from it) is deterministic.
"""

from collections.abc import Sequence

import numpy as np

from .models import AlignmentOps, EditOp, ErrorCounts, OpKind, Transcript


def _cost_matrix(ref: Sequence[str], hyp: Sequence[str]) -> np.ndarray:
    n, m = len(ref), len(hyp)
    cost = np.zeros((n + 1, m + 1), dtype=np.int64)
    cost[:, 0] = np.arange(n + 1)
    cost[0, :] = np.arange(m + 1)
    for i in range(1, n + 1):
        r = ref[i - 1]
        for j in range(1, m + 1):
            diag = cost[i - 1, j - 1] + (0 if r == hyp[j - 1] else 1)
            cost[i, j] = min(diag, cost[i - 1, j] + 1, cost[i, j - 1] + 1)
    return cost


def align_tokens(ref: Sequence[str], hyp: Sequence[str]) -> AlignmentOps:
    cost = _cost_matrix(ref, hyp)
    ops: list[EditOp] = []
    i, j = len(ref), len(hyp)
    while i > 0 or j > 0:
        here = cost[i, j]
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and cost[i - 1, j - 1] == here:
            ops.append(EditOp(OpKind.CORRECT, ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and ref[i - 1] != hyp[j - 1] and cost[i - 1, j - 1] + 1 == here:
            ops.append(EditOp(OpKind.SUB, ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and cost[i - 1, j] + 1 == here:
            ops.append(EditOp(OpKind.DEL, ref[i - 1], None))
            i -= 1
        else:
            ops.append(EditOp(OpKind.INS, None, hyp[j - 1]))
            j -= 1
    ops.reverse()
    return AlignmentOps(tuple(ops))


def align(ref: Transcript, hyp: Transcript) -> AlignmentOps:
    """Minimum-edit alignment of ``hyp`` against ``ref``."""
    return align_tokens(ref.tokens, hyp.tokens)


def edit_counts(ref: Sequence[str], hyp: Sequence[str]) -> ErrorCounts:
    return align_tokens(ref, hyp).counts()
