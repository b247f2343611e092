"""
Joint CTC + decoder + LM beam search.

Label-synchronous: every step extends each live prefix by each non-blank
symbol, and also offers to end it. A live prefix is scored with its CTC
prefix probability; an ended one with its full-sequence CTC probability
and the scorers' end-of-sequence terms. Candidates are ranked by the joint
score ``lam * ctc + (1 - lam) * dec + mu * lm`` and the best ``beam`` are
kept; ended candidates leave the beam and are collected.
"""

from __future__ import annotations

import json
import logging
import math
import time
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Protocol

from .ctc import CtcPrefixScorer, CtcPrefixState
from .errors import FileFormatError
from .kernels import combine_scores
from .models import CombineConfig, Hypothesis, PosteriorMatrix, Transcript, Vocab
from .scoring import wer

logger = logging.getLogger(__name__)

EOS = "</s>"
# Log-probability used by TableScorer for entries missing from its table
TABLE_FLOOR = math.log(1e-10)


class DecodeError(Exception):
    """Raised when a decoding request cannot be carried out."""


class ScorerHandle(Protocol):
    """Incremental sequence scorer. States are immutable values."""

    def start(self) -> Any: ...

    def score(self, state: Any, symbol: str) -> tuple[float, Any]: ...

    def finish(self, state: Any) -> float: ...


class TableScorer:
    """
    Decoder-term stand-in reading next-symbol log-probabilities from a table.

    The table maps a space-joined prefix ("" for the empty prefix) to
    ``{symbol: logp}``; the key ``"</s>"`` holds the end-of-sequence term.
    Missing entries score ``TABLE_FLOOR``.
    """

    def __init__(self, table: Mapping[str, Mapping[str, float]]) -> None:
        self.table = {prefix: dict(row) for prefix, row in table.items()}

    def start(self) -> tuple[str, ...]:
        return ()

    def _lookup(self, prefix: tuple[str, ...], symbol: str) -> float:
        return float(self.table.get(" ".join(prefix), {}).get(symbol, TABLE_FLOOR))

    def score(self, state: tuple[str, ...], symbol: str) -> tuple[float, tuple[str, ...]]:
        return self._lookup(state, symbol), state + (symbol,)

    def finish(self, state: tuple[str, ...]) -> float:
        return self._lookup(state, EOS)


def parse_table_scorer(text: str, source: str | Path = "<table>") -> TableScorer:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(source, exc.lineno, "valid JSON", exc.msg) from exc
    if not isinstance(data, dict) or not all(isinstance(row, dict) for row in data.values()):
        raise FileFormatError(source, None, "an object mapping prefixes to {symbol: logp} objects")
    try:
        return TableScorer({k: {s: float(v) for s, v in row.items()} for k, row in data.items()})
    except (TypeError, ValueError) as exc:
        raise FileFormatError(source, None, "numeric log-probabilities", str(exc)) from exc


@dataclass(frozen=True, eq=False)
class _Prefix:
    tokens: tuple[str, ...]
    ctc_state: CtcPrefixState
    ctc: float
    dec: float
    dec_state: Any
    lm: float
    lm_state: Any


def _scores_and_states(scorer: ScorerHandle | None, state: Any, symbol: str) -> tuple[float, Any]:
    if scorer is None:
        return 0.0, None
    return scorer.score(state, symbol)


def joint_beam_search(
    post: PosteriorMatrix,
    vocab: Vocab,
    beam: int,
    cfg: CombineConfig | None = None,
    dec: ScorerHandle | None = None,
    lm: ScorerHandle | None = None,
    max_len: int | None = None,
    length_norm: bool = False,
    nbest: int | None = None,
) -> list[Hypothesis]:
    """
    Decode one posterior matrix.

    Args:
        post: T x V log-posteriors
        vocab: Symbols of the posterior columns
        beam: Number of candidates kept per step (>= 1)
        cfg: Trade-off weights; lam is treated as 1 when ``dec`` is None
        dec: Decoder-term scorer, or None
        lm: Language-model scorer, or None
        max_len: Longest hypothesis considered (default: T)
        length_norm: Rank completed hypotheses by joint / (len + 1)
        nbest: Keep only the best ``nbest`` results (default: all)

    Returns:
        Completed hypotheses, best first; ties go to lexicographic token order
    """
    if beam < 1:
        raise DecodeError(f"beam must be >= 1, got {beam}")
    cfg = cfg or CombineConfig()
    if dec is None:
        cfg = cfg.model_copy(update={"lam": 1.0})
    if lm is None:
        cfg = cfg.model_copy(update={"mu": 0.0})
    max_len = post.frames if max_len is None else max_len
    if max_len < 0:
        raise DecodeError(f"max_len must be >= 0, got {max_len}")

    ctc = CtcPrefixScorer(post, vocab)
    symbol_ids = vocab.non_blank_ids()
    symbols = [vocab.symbols[i] for i in symbol_ids]

    live = [
        _Prefix(
            tokens=(),
            ctc_state=ctc.initial_state(),
            ctc=0.0,
            dec=0.0,
            dec_state=dec.start() if dec else None,
            lm=0.0,
            lm_state=lm.start() if lm else None,
        )
    ]
    ended: list[Hypothesis] = []

    for step in range(max_len + 1):
        # (sort key, ended flag, payload)
        candidates: list[tuple[tuple, bool, Any]] = []
        for prefix in live:
            final_ctc = ctc.full_score(prefix.ctc_state)
            final_dec = prefix.dec + (dec.finish(prefix.dec_state) if dec else 0.0)
            final_lm = prefix.lm + (lm.finish(prefix.lm_state) if lm else 0.0)
            joint = combine_scores(final_ctc, final_dec, final_lm, cfg)
            hyp = Hypothesis(prefix.tokens, joint, final_ctc, final_dec, final_lm)
            candidates.append(((-joint, prefix.tokens, 0), True, hyp))

            if step == max_len or not symbols:
                continue
            psi, states = ctc.extend(prefix.ctc_state, symbol_ids)
            for symbol, prefix_ctc, ctc_state in zip(symbols, psi.tolist(), states):
                d, d_state = _scores_and_states(dec, prefix.dec_state, symbol)
                l, l_state = _scores_and_states(lm, prefix.lm_state, symbol)
                extended = _Prefix(
                    tokens=prefix.tokens + (symbol,),
                    ctc_state=ctc_state,
                    ctc=prefix_ctc,
                    dec=prefix.dec + d,
                    dec_state=d_state,
                    lm=prefix.lm + l,
                    lm_state=l_state,
                )
                joint = combine_scores(extended.ctc, extended.dec, extended.lm, cfg)
                candidates.append(((-joint, extended.tokens, 1), False, extended))

        candidates.sort(key=lambda c: c[0])
        live = []
        for _, is_ended, payload in candidates[:beam]:
            if is_ended:
                ended.append(payload)
            else:
                live.append(payload)
        logger.debug("step %d: %d live, %d ended", step, len(live), len(ended))
        if not live:
            break

    def rank(h: Hypothesis) -> tuple:
        score = h.joint / (len(h.tokens) + 1) if length_norm else h.joint
        return (-score, h.tokens)

    ended.sort(key=rank)
    return ended if nbest is None else ended[:nbest]


def best_tokens(hyps: Sequence[Hypothesis]) -> tuple[str, ...]:
    return hyps[0].tokens if hyps else ()


def beam_sweep(
    posteriors: Mapping[str, PosteriorMatrix],
    vocab: Vocab,
    beams: Sequence[int],
    refs: Sequence[Transcript],
    cfg: CombineConfig | None = None,
    dec: ScorerHandle | None = None,
    lm: ScorerHandle | None = None,
    frame_shift_s: float = 0.04,
) -> tuple[list[dict], list[dict]]:
    """
    Decode every utterance at each beam size, with and without the LM.

    Returns (rows, timings): rows carry the pooled WER against ``refs`` per
    (beam, lm) setting; timings carry decode time and the real-time factor
    (decode seconds / audio seconds, audio length = frames * frame shift).
    """
    if not beams:
        raise DecodeError("beam sweep needs at least one beam size")
    ref_by_id = {r.utt_id: r for r in refs}
    missing = sorted(set(posteriors) - set(ref_by_id))
    if missing:
        raise DecodeError(f"no reference for utterance(s): {', '.join(missing[:5])}")
    audio_s = sum(p.frames for p in posteriors.values()) * frame_shift_s
    lm_settings = [False, True] if lm is not None else [False]

    rows, timings = [], []
    for beam in beams:
        for use_lm in lm_settings:
            started = time.perf_counter()
            pairs = []
            for utt_id in sorted(posteriors):
                hyps = joint_beam_search(posteriors[utt_id], vocab, beam, cfg, dec, lm if use_lm else None, nbest=1)
                pairs.append((ref_by_id[utt_id], Transcript(utt_id, best_tokens(hyps))))
            elapsed = time.perf_counter() - started
            counts = wer(pairs)
            rows.append({"beam": beam, "lm": use_lm, **counts.to_dict()})
            timings.append(
                {
                    "beam": beam,
                    "lm": use_lm,
                    "decode_s": elapsed,
                    "rtf": elapsed / audio_s if audio_s > 0 else None,
                }
            )
            logger.info("beam %d lm=%s: WER %s%%", beam, use_lm, counts.rate_pct)
    return rows, timings
