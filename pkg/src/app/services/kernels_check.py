"""
Self-check of the numerical kernels.

Seeded random cases are pushed through the ``numpy`` kernels and through
straight-line scalar re-implementations written here with ``math`` only.
Each check reports its largest deviation; any deviation above tolerance
fails the run.
"""

import logging
import math
import random
from collections.abc import Callable
from typing import Any

import numpy as np

from src.app.kernels import (
    attention_weights,
    combine_losses,
    combine_scores,
    multi_head_attention,
    position_wise_ff,
    positional_encoding,
    self_attention,
)
from src.app.models import AttentionHead, CombineConfig
from src.app.services.command_runner import handler
from src.app.services.run_tracker import RunContext

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-12
AFFINE_TOLERANCE = 1e-9

Rows = list[list[float]]


class KernelCheckError(Exception):
    """Raised when a kernel disagrees with its scalar re-implementation."""


# ============================================================================
# Scalar oracles
# ============================================================================


def _oracle_matmul(a: Rows, b: Rows) -> Rows:
    return [[math.fsum(a[i][t] * b[t][j] for t in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def _oracle_attention(q: Rows, k: Rows, v: Rows) -> Rows:
    d_k = len(q[0])
    out = []
    for qi in q:
        logits = [math.fsum(qi[d] * kj[d] for d in range(d_k)) / math.sqrt(d_k) for kj in k]
        top = max(logits)
        exps = [math.exp(x - top) for x in logits]
        total = math.fsum(exps)
        weights = [e / total for e in exps]
        out.append([math.fsum(weights[j] * v[j][c] for j in range(len(v))) for c in range(len(v[0]))])
    return out


def _oracle_ff(z: Rows, w1: Rows, b1: list[float], w2: Rows, b2: list[float]) -> Rows:
    out = []
    for row in z:
        hidden = [max(0.0, math.fsum(row[i] * w1[i][j] for i in range(len(row))) + b1[j]) for j in range(len(b1))]
        out.append([math.fsum(hidden[j] * w2[j][c] for j in range(len(hidden))) + b2[c] for c in range(len(b2))])
    return out


def _max_diff(actual: np.ndarray, expected: Rows) -> float:
    return float(np.max(np.abs(actual - np.asarray(expected, dtype=np.float64)), initial=0.0))


# ============================================================================
# Checks
# ============================================================================


def _random(rng: random.Random, rows: int, cols: int) -> Rows:
    return [[rng.uniform(-1.0, 1.0) for _ in range(cols)] for _ in range(rows)]


def _check_self_attention(rng: random.Random) -> float:
    n, m, d_k, d_v = rng.randint(1, 4), rng.randint(1, 4), rng.randint(1, 3), rng.randint(1, 3)
    q, k, v = _random(rng, n, d_k), _random(rng, m, d_k), _random(rng, m, d_v)
    return _max_diff(self_attention(q, k, v), _oracle_attention(q, k, v))


def _check_softmax_rows(rng: random.Random) -> float:
    n, m, d_k = rng.randint(1, 4), rng.randint(1, 4), rng.randint(1, 3)
    weights = attention_weights(_random(rng, n, d_k), _random(rng, m, d_k))
    return float(np.max(np.abs(weights.sum(axis=1) - 1.0)))


def _check_key_permutation(rng: random.Random) -> float:
    n, m, d_k, d_v = rng.randint(1, 3), rng.randint(2, 4), rng.randint(1, 3), rng.randint(1, 3)
    q, k, v = _random(rng, n, d_k), _random(rng, m, d_k), _random(rng, m, d_v)
    order = list(range(m))
    rng.shuffle(order)
    permuted = self_attention(q, [k[i] for i in order], [v[i] for i in order])
    return float(np.max(np.abs(permuted - self_attention(q, k, v))))


def _check_scale(rng: random.Random) -> float:
    n, m, d_k, d_v = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
    q, k, v = _random(rng, n, d_k), _random(rng, m, d_k), _random(rng, m, d_v)
    c = rng.uniform(0.5, 2.0)
    scaled = self_attention(np.asarray(q) * c, np.asarray(k) / c, v)
    return float(np.max(np.abs(scaled - self_attention(q, k, v))))


def _check_multi_head(rng: random.Random) -> float:
    n, d_model, heads_n = rng.randint(1, 3), rng.randint(1, 3), 2
    d_k, d_v = rng.randint(1, 3), rng.randint(1, 3)
    x = _random(rng, n, d_model)
    heads = [
        (_random(rng, d_model, d_k), _random(rng, d_model, d_k), _random(rng, d_model, d_v)) for _ in range(heads_n)
    ]
    w_h = _random(rng, heads_n * d_v, d_model)
    concat = [[] for _ in range(n)]
    for w_q, w_k, w_v in heads:
        z = _oracle_attention(_oracle_matmul(x, w_q), _oracle_matmul(x, w_k), _oracle_matmul(x, w_v))
        for row, part in zip(concat, z):
            row.extend(part)
    expected = _oracle_matmul(concat, w_h)
    actual = multi_head_attention(x, [AttentionHead(np.asarray(a), np.asarray(b), np.asarray(c)) for a, b, c in heads], w_h)
    return _max_diff(actual, expected)


def _check_feed_forward(rng: random.Random) -> float:
    n, d_in, d_ff, d_out = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 4), rng.randint(1, 3)
    z, w1, w2 = _random(rng, n, d_in), _random(rng, d_in, d_ff), _random(rng, d_ff, d_out)
    b1 = [rng.uniform(-1.0, 1.0) for _ in range(d_ff)]
    b2 = [rng.uniform(-1.0, 1.0) for _ in range(d_out)]
    return _max_diff(position_wise_ff(z, w1, b1, w2, b2), _oracle_ff(z, w1, b1, w2, b2))


def _check_positional_encoding(rng: random.Random) -> float:
    max_pos, d_model = rng.randint(1, 8), 2 * rng.randint(1, 4)
    pe = positional_encoding(max_pos, d_model)
    identity = np.abs(pe[:, 0::2] ** 2 + pe[:, 1::2] ** 2 - 1.0).max()
    expected = [
        [
            (math.sin if c % 2 == 0 else math.cos)(pos / 10000.0 ** ((c - c % 2) / d_model))
            for c in range(d_model)
        ]
        for pos in range(max_pos)
    ]
    return max(float(identity), _max_diff(pe, expected))


def _check_combine_affine(rng: random.Random) -> float:
    """Finite-difference slopes against the printed coefficients."""
    alpha, lam, mu = rng.random(), rng.random(), rng.uniform(0.0, 2.0)
    l_ctc, l_dec = rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0)
    s = [rng.uniform(-10.0, 0.0) for _ in range(3)]
    cfg = CombineConfig(alpha=alpha, lam=lam, mu=mu)
    h = 1.0
    worst = 0.0
    slopes = [
        (combine_losses(l_ctc + h, l_dec, alpha) - combine_losses(l_ctc, l_dec, alpha), alpha),
        (combine_losses(l_ctc, l_dec + h, alpha) - combine_losses(l_ctc, l_dec, alpha), 1.0 - alpha),
    ]
    base = combine_scores(*s, cfg)
    for idx, coefficient in enumerate((lam, 1.0 - lam, mu)):
        bumped = list(s)
        bumped[idx] += h
        slopes.append((combine_scores(*bumped, cfg) - base, coefficient))
    for measured, coefficient in slopes:
        worst = max(worst, abs(measured / h - coefficient))
    return worst


CHECKS: dict[str, tuple[Callable[[random.Random], float], float]] = {
    "self_attention": (_check_self_attention, DEFAULT_TOLERANCE),
    "softmax_rows": (_check_softmax_rows, DEFAULT_TOLERANCE),
    "key_permutation": (_check_key_permutation, DEFAULT_TOLERANCE),
    "scale_invariance": (_check_scale, DEFAULT_TOLERANCE),
    "multi_head_attention": (_check_multi_head, DEFAULT_TOLERANCE),
    "position_wise_ff": (_check_feed_forward, DEFAULT_TOLERANCE),
    "positional_encoding": (_check_positional_encoding, DEFAULT_TOLERANCE),
    "combine_affine": (_check_combine_affine, AFFINE_TOLERANCE),
}


def run_checks(seed: int = 0, cases: int = 100) -> list[dict[str, Any]]:
    """Run every check ``cases`` times; one result row per check."""
    if cases < 1:
        raise ValueError(f"cases must be >= 1, got {cases}")
    rows = []
    for name, (check, tolerance) in CHECKS.items():
        rng = random.Random(f"{seed}:{name}")
        worst = max(check(rng) for _ in range(cases))
        rows.append({"check": name, "cases": cases, "max_error": worst, "tolerance": tolerance, "passed": worst <= tolerance})
        logger.debug("%s: max error %.3e", name, worst)
    return rows


@handler("kernels-check")
def kernels_check_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    rows = run_checks(opts.get("seed", 0), opts.get("cases", 100))
    failed = [row["check"] for row in rows if not row["passed"]]
    if failed:
        raise KernelCheckError(f"kernel(s) out of tolerance: {', '.join(failed)}")
    return {"seed": opts.get("seed", 0), "checks": rows}
