"""
Data models for the ASR benchmarking toolkit.

Immutable value types are frozen dataclasses; configuration and report
shapes that need validation are Pydantic models.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import logsumexp


# ============================================================================
# Text models
# ============================================================================


def is_valid_token(value: str) -> bool:
    """A token is a non-empty string with no whitespace code points."""
    return bool(value) and not any(ch.isspace() for ch in value)


@dataclass(frozen=True)
class Transcript:
    """One utterance: an identifier plus its ordered tokens (may be empty)."""

    utt_id: str
    tokens: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.utt_id or any(ch.isspace() for ch in self.utt_id):
            raise ValueError(f"invalid utterance id {self.utt_id!r}")
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for token in self.tokens:
            if not is_valid_token(token):
                raise ValueError(f"invalid token {token!r} in utterance {self.utt_id}")

    @classmethod
    def from_text(cls, utt_id: str, text: str) -> "Transcript":
        return cls(utt_id, tuple(text.split()))

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def with_tokens(self, tokens) -> "Transcript":
        return Transcript(self.utt_id, tuple(tokens))


class NormalizationPolicy(BaseModel):
    """Independent switches for transcript normalization. All on by default."""

    model_config = ConfigDict(frozen=True)

    fold_alif: bool = True
    fold_ya: bool = True
    fold_ta_marbuta: bool = True
    strip_diacritics: bool = True
    strip_punctuation: bool = True
    drop_single_char_words: bool = True


@dataclass(frozen=True)
class GlmRule:
    """A single ``LHS => RHS`` mapping."""

    lhs: tuple[str, ...]
    rhs: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.lhs:
            raise ValueError("GLM rule needs a non-empty left-hand side")


@dataclass(frozen=True)
class GlmRules:
    """Ordered rule list; order breaks ties between equally long matches."""

    rules: tuple[GlmRule, ...] = ()
    # first token -> candidate rules, longest lhs first, then file order
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))
        index: dict[str, list[GlmRule]] = {}
        for order, rule in enumerate(self.rules):
            index.setdefault(rule.lhs[0], []).append((-len(rule.lhs), order, rule))
        object.__setattr__(
            self,
            "_index",
            {tok: tuple(r for _, _, r in sorted(c, key=lambda x: x[:2])) for tok, c in index.items()},
        )

    def candidates(self, token: str) -> tuple[GlmRule, ...]:
        return self._index.get(token, ())


@dataclass(frozen=True)
class BpeModel:
    """Ordered merge list plus the single-character alphabet seen in training."""

    merges: tuple[tuple[str, str], ...] = ()
    base_symbols: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "merges", tuple(tuple(m) for m in self.merges))
        object.__setattr__(self, "base_symbols", frozenset(self.base_symbols))
        if len(set(self.merges)) != len(self.merges):
            raise ValueError("BPE merge list contains duplicates")


# ============================================================================
# Scoring models
# ============================================================================


class OpKind(str, Enum):
    CORRECT = "C"
    SUB = "S"
    DEL = "D"
    INS = "I"


@dataclass(frozen=True)
class EditOp:
    """One alignment step. ``ref`` is None for insertions, ``hyp`` for deletions."""

    kind: OpKind
    ref: str | None = None
    hyp: str | None = None


@dataclass(frozen=True)
class ErrorCounts:
    """
    Substitution/deletion/insertion statistics over a reference of length N.

    Counts add, rates do not: pool with ``+`` (or ``sum(..., ErrorCounts.zero())``)
    and read the rate off the total.
    """

    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0
    ref_len: int = 0

    def __post_init__(self) -> None:
        if min(self.substitutions, self.deletions, self.insertions, self.ref_len) < 0:
            raise ValueError("error counts must be non-negative")

    @classmethod
    def zero(cls) -> "ErrorCounts":
        return cls()

    def __add__(self, other: "ErrorCounts") -> "ErrorCounts":
        if not isinstance(other, ErrorCounts):
            return NotImplemented
        return ErrorCounts(
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.ref_len + other.ref_len,
        )

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def rate(self) -> float | None:
        """Error rate as a fraction; None when the reference is empty."""
        if self.ref_len == 0:
            return None
        return self.errors / self.ref_len

    @property
    def rate_pct(self) -> float | None:
        rate = self.rate
        return None if rate is None else round(100.0 * rate, 1)

    def to_dict(self) -> dict:
        rate = self.rate
        return {
            "substitutions": self.substitutions,
            "deletions": self.deletions,
            "insertions": self.insertions,
            "errors": self.errors,
            "ref_len": self.ref_len,
            "rate": None if rate is None else 100.0 * rate,
            "rate_pct": self.rate_pct,
        }


@dataclass(frozen=True)
class AlignmentOps:
    """Edit-operation sequence produced by aligning a hypothesis to a reference."""

    ops: tuple[EditOp, ...] = ()

    def ref_tokens(self) -> tuple[str, ...]:
        return tuple(op.ref for op in self.ops if op.kind != OpKind.INS)

    def hyp_tokens(self) -> tuple[str, ...]:
        return tuple(op.hyp for op in self.ops if op.kind != OpKind.DEL)

    def counts(self) -> ErrorCounts:
        subs = sum(1 for op in self.ops if op.kind == OpKind.SUB)
        dels = sum(1 for op in self.ops if op.kind == OpKind.DEL)
        ins = sum(1 for op in self.ops if op.kind == OpKind.INS)
        return ErrorCounts(subs, dels, ins, len(self.ops) - ins)


EPSILON = None  # empty alternative in a confusion-network slot


@dataclass(frozen=True)
class ConfusionNetwork:
    """Slot sequence; each slot holds token alternatives and possibly EPSILON."""

    slots: tuple[frozenset, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "slots", tuple(frozenset(s) for s in self.slots))
        if any(not s for s in self.slots):
            raise ValueError("confusion network slots must be non-empty")

    def to_lists(self) -> list[list[str | None]]:
        """Slots as sorted lists, epsilon first, for reports."""
        return [sorted(slot, key=lambda t: (t is not None, t or "")) for slot in self.slots]


@dataclass(frozen=True)
class DisagreementMatrix:
    """Pairwise pooled WER in percent: row = hypothesis, column = reference."""

    labels: tuple[str, ...]
    cells: tuple[tuple[float, ...], ...]

    def cell(self, hyp_label: str, ref_label: str) -> float:
        return self.cells[self.labels.index(hyp_label)][self.labels.index(ref_label)]

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "cells": [list(row) for row in self.cells],
            "cells_pct": [[round(v, 1) for v in row] for row in self.cells],
        }


# ============================================================================
# Kernel models
# ============================================================================


class CombineConfig(BaseModel):
    """Trade-off weights: alpha for training losses, lam/mu for joint decoding."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(0.3, ge=0.0, le=1.0)
    lam: float = Field(0.5, ge=0.0, le=1.0)
    mu: float = Field(0.3, ge=0.0)


@dataclass(frozen=True, eq=False)
class AttentionHead:
    """Per-head projections: w_q, w_k are d_model x d_k, w_v is d_model x d_v."""

    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray


@dataclass(frozen=True, eq=False)
class AttentionWeights:
    """Parameters of one attention + feed-forward sub-layer pair."""

    heads: tuple[AttentionHead, ...]
    w_h: np.ndarray
    ff_w1: np.ndarray
    ff_b1: np.ndarray
    ff_w2: np.ndarray
    ff_b2: np.ndarray


# ============================================================================
# Decoding models
# ============================================================================


@dataclass(frozen=True)
class Vocab:
    """CTC label alphabet; ``blank_id`` indexes the blank symbol."""

    symbols: tuple[str, ...]
    blank_id: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("vocabulary symbols must be unique")
        if not 0 <= self.blank_id < len(self.symbols):
            raise ValueError(f"blank id {self.blank_id} out of range")
        object.__setattr__(self, "_ids", {s: i for i, s in enumerate(self.symbols)})

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def blank(self) -> str:
        return self.symbols[self.blank_id]

    def index(self, symbol: str) -> int:
        try:
            return self._ids[symbol]
        except KeyError:
            raise KeyError(f"symbol {symbol!r} not in vocabulary") from None

    def non_blank_ids(self) -> list[int]:
        return [i for i in range(len(self.symbols)) if i != self.blank_id]


@dataclass(frozen=True, eq=False)
class PosteriorMatrix:
    """T x V per-frame log-probabilities; each row log-sums-exp to 0."""

    logp: np.ndarray

    def __post_init__(self) -> None:
        logp = np.asarray(self.logp, dtype=np.float64)
        if logp.ndim != 2 or logp.shape[0] < 1 or logp.shape[1] < 1:
            raise ValueError(f"posterior matrix must be 2-D and non-empty, got shape {logp.shape}")
        if np.isnan(logp).any() or np.isposinf(logp).any():
            raise ValueError("posterior matrix contains NaN or +inf")
        if (logp > 1e-9).any():
            raise ValueError("log-probabilities must be <= 0")
        row_mass = logsumexp(logp, axis=1)
        if not np.allclose(row_mass, 0.0, atol=1e-6):
            bad = int(np.argmax(np.abs(row_mass)))
            raise ValueError(f"frame {bad} is not normalized (logsumexp = {row_mass[bad]:.3g})")
        logp.setflags(write=False)
        object.__setattr__(self, "logp", logp)

    @property
    def frames(self) -> int:
        return self.logp.shape[0]

    @property
    def vocab_size(self) -> int:
        return self.logp.shape[1]


@dataclass(frozen=True)
class Hypothesis:
    """A completed beam-search result with its component log-scores."""

    tokens: tuple[str, ...]
    joint: float
    ctc: float
    dec: float
    lm: float

    def to_dict(self) -> dict:
        def _num(x: float) -> float | str:
            return x if math.isfinite(x) else ("-inf" if x < 0 else "inf")

        return {
            "tokens": list(self.tokens),
            "joint": _num(self.joint),
            "ctc": _num(self.ctc),
            "dec": _num(self.dec),
            "lm": _num(self.lm),
        }


# ============================================================================
# Segmentation models
# ============================================================================


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono samples in [-1, 1] at ``sample_rate`` Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("audio buffer must be mono")
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")
        if not np.isfinite(samples).all():
            raise ValueError("audio samples must be finite")
        object.__setattr__(self, "samples", samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class Segment:
    """A [start_s, end_s) interval of recording ``rec_id``."""

    rec_id: str
    start_s: float
    end_s: float
    seg_id: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "start_s", float(self.start_s))
        object.__setattr__(self, "end_s", float(self.end_s))
        if not 0 <= self.start_s < self.end_s:
            raise ValueError(
                f"segment {self.seg_id or self.rec_id}: need 0 <= start < end, "
                f"got [{self.start_s}, {self.end_s}]"
            )

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s

    def sort_key(self) -> tuple[str, float, float]:
        return (self.rec_id, self.start_s, self.end_s)

    def to_dict(self) -> dict:
        return {
            "seg_id": self.seg_id,
            "rec_id": self.rec_id,
            "start_s": self.start_s,
            "end_s": self.end_s,
        }


class VadParams(BaseModel):
    """Energy VAD settings. Durations in milliseconds/seconds as named."""

    model_config = ConfigDict(frozen=True)

    frame_ms: float = Field(25.0, gt=0)
    hop_ms: float = Field(10.0, gt=0)
    threshold_percentile: float = Field(0.3, gt=0.0, lt=1.0)
    margin_db: float = 6.0
    smoothing_frames: int = Field(5, ge=1)
    min_silence_s: float = Field(0.3, ge=0)
    min_speech_s: float = Field(0.2, ge=0)

    @model_validator(mode="after")
    def _check_framing(self) -> "VadParams":
        if self.frame_ms < self.hop_ms:
            raise ValueError("frame_ms must be >= hop_ms")
        if self.smoothing_frames % 2 == 0:
            raise ValueError("smoothing_frames must be odd")
        return self


DURATION_BUCKETS: tuple[tuple[str, float, float], ...] = (
    ("0-15", 0.0, 15.0),
    ("15-30", 15.0, 30.0),
    ("30+", 30.0, math.inf),
)


def duration_bucket(duration_s: float) -> str:
    """Bucket name for a duration: [0, 15], (15, 30], (30, inf)."""
    if duration_s < 0:
        raise ValueError(f"negative duration {duration_s}")
    for name, _, high in DURATION_BUCKETS:
        if duration_s <= high:
            return name
    return DURATION_BUCKETS[-1][0]


class DurationStats(BaseModel):
    """Segment-duration histogram over fixed ranges plus mean/std summary."""

    total: int
    bucket_counts: dict[str, int]
    bucket_pct: dict[str, float]
    mean_s: float
    std_s: float
    effective_range: tuple[float, float]
    coverage_pct: float
