"""
Forward-only reference kernels for the transformer sub-layers and the
training/decoding score combinations.

Matrices are float64 ``numpy`` arrays; every public kernel checks shapes up
front and raises ``KernelShapeError`` instead of broadcasting silently.
"""

import math

import numpy as np
from scipy.special import softmax

from .models import AttentionHead, AttentionWeights, CombineConfig


class KernelShapeError(ValueError):
    """Raised when kernel inputs have inconsistent dimensions or non-finite values."""


def _matrix(name: str, value) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim != 2:
        raise KernelShapeError(f"{name} must be a matrix, got {arr.ndim}-D")
    if not np.isfinite(arr).all():
        raise KernelShapeError(f"{name} contains non-finite values")
    return arr


def _vector(name: str, value, size: int) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64).reshape(-1)
    if arr.shape[0] != size:
        raise KernelShapeError(f"{name} has length {arr.shape[0]}, expected {size}")
    return arr


def attention_weights(q, k) -> np.ndarray:
    """Row-wise softmax of q kᵀ / sqrt(d_k); each row sums to 1."""
    q = _matrix("q", q)
    k = _matrix("k", k)
    if q.shape[1] != k.shape[1]:
        raise KernelShapeError(f"q has d_k={q.shape[1]} but k has d_k={k.shape[1]}")
    logits = q @ k.T / math.sqrt(q.shape[1])
    return softmax(logits, axis=1)


def self_attention(q, k, v) -> np.ndarray:
    """softmax(q kᵀ / sqrt(d_k)) v."""
    k = _matrix("k", k)
    v = _matrix("v", v)
    if k.shape[0] != v.shape[0]:
        raise KernelShapeError(f"k has {k.shape[0]} rows but v has {v.shape[0]}")
    return attention_weights(q, k) @ v


def multi_head_attention(x, heads: tuple[AttentionHead, ...] | list[AttentionHead], w_h) -> np.ndarray:
    """
    Concatenate per-head attention outputs and project by ``w_h``.

    Each head projects ``x`` by its own w_q/w_k/w_v; ``w_h`` has
    sum(d_v) rows and d_model columns.
    """
    x = _matrix("x", x)
    w_h = _matrix("w_h", w_h)
    if not heads:
        raise KernelShapeError("multi-head attention needs at least one head")
    outputs = []
    for idx, head in enumerate(heads):
        w_q = _matrix(f"heads[{idx}].w_q", head.w_q)
        w_k = _matrix(f"heads[{idx}].w_k", head.w_k)
        w_v = _matrix(f"heads[{idx}].w_v", head.w_v)
        for name, w in (("w_q", w_q), ("w_k", w_k), ("w_v", w_v)):
            if w.shape[0] != x.shape[1]:
                raise KernelShapeError(
                    f"heads[{idx}].{name} has {w.shape[0]} rows, expected d_model={x.shape[1]}"
                )
        if w_q.shape[1] != w_k.shape[1]:
            raise KernelShapeError(f"heads[{idx}]: d_q={w_q.shape[1]} differs from d_k={w_k.shape[1]}")
        outputs.append(self_attention(x @ w_q, x @ w_k, x @ w_v))
    concat = np.concatenate(outputs, axis=1)
    if concat.shape[1] != w_h.shape[0]:
        raise KernelShapeError(f"w_h has {w_h.shape[0]} rows, expected h*d_v={concat.shape[1]}")
    return concat @ w_h


def position_wise_ff(z, w1, b1, w2, b2) -> np.ndarray:
    """max(0, z W1 + b1) W2 + b2, applied row by row."""
    z = _matrix("z", z)
    w1 = _matrix("w1", w1)
    w2 = _matrix("w2", w2)
    if z.shape[1] != w1.shape[0]:
        raise KernelShapeError(f"z has {z.shape[1]} columns but w1 has {w1.shape[0]} rows")
    if w1.shape[1] != w2.shape[0]:
        raise KernelShapeError(f"w1 has {w1.shape[1]} columns but w2 has {w2.shape[0]} rows")
    b1 = _vector("b1", b1, w1.shape[1])
    b2 = _vector("b2", b2, w2.shape[1])
    hidden = np.maximum(0.0, z @ w1 + b1)
    return hidden @ w2 + b2


def attention_block(x, weights: AttentionWeights) -> np.ndarray:
    """Multi-head attention followed by the position-wise feed-forward layer."""
    z = multi_head_attention(x, weights.heads, weights.w_h)
    return position_wise_ff(z, weights.ff_w1, weights.ff_b1, weights.ff_w2, weights.ff_b2)


def positional_encoding(max_pos: int, d_model: int) -> np.ndarray:
    """Sinusoidal table: PE[n, 2i] = sin(n / 10000^(2i/d)), PE[n, 2i+1] = cos(same)."""
    if max_pos < 1:
        raise KernelShapeError(f"max_pos must be >= 1, got {max_pos}")
    if d_model < 2 or d_model % 2:
        raise KernelShapeError(f"d_model must be a positive even number, got {d_model}")
    positions = np.arange(max_pos, dtype=np.float64)[:, None]
    two_i = np.arange(0, d_model, 2, dtype=np.float64)
    angles = positions / np.power(10000.0, two_i / d_model)
    pe = np.empty((max_pos, d_model), dtype=np.float64)
    pe[:, 0::2] = np.sin(angles)
    pe[:, 1::2] = np.cos(angles)
    return pe


def combine_losses(l_ctc: float, l_dec: float, alpha: float) -> float:
    """Multi-task objective alpha * L_ctc + (1 - alpha) * L_dec."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if l_ctc < 0 or l_dec < 0:
        raise ValueError("losses must be non-negative")
    return alpha * l_ctc + (1.0 - alpha) * l_dec


def combine_scores(s_ctc: float, s_dec: float, s_lm: float, cfg: CombineConfig) -> float:
    """
    Joint decoding score lam * s_ctc + (1 - lam) * s_dec + mu * s_lm.

    Terms with weight 0 are left out, so an absent scorer's -inf never turns
    into NaN.
    """
    total = 0.0
    for weight, score in ((cfg.lam, s_ctc), (1.0 - cfg.lam, s_dec), (cfg.mu, s_lm)):
        if weight != 0.0:
            total += weight * score
    return total
