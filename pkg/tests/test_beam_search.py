"""Tests for joint CTC/decoder/LM beam search and the beam sweep."""

import itertools
import json
import math
import random

import numpy as np
import pytest
from scipy.special import logsumexp

from src.app.beam_search import (
    EOS,
    TABLE_FLOOR,
    DecodeError,
    TableScorer,
    beam_sweep,
    best_tokens,
    joint_beam_search,
    parse_table_scorer,
)
from src.app.ctc import ctc_greedy, ctc_log_prob
from src.app.errors import FileFormatError
from src.app.kernels import combine_scores
from src.app.models import CombineConfig, PosteriorMatrix, Transcript, Vocab
from src.app.ngram_lm import lm_train

VOCAB = Vocab(("<b>", "a", "b"))
EXHAUSTIVE = 10_000


def _post(probs) -> PosteriorMatrix:
    with np.errstate(divide="ignore"):
        return PosteriorMatrix(np.log(np.asarray(probs, dtype=np.float64)))


def _random_post(rng: np.random.Generator, frames: int) -> PosteriorMatrix:
    logits = rng.normal(size=(frames, len(VOCAB))) * 2.0
    return PosteriorMatrix(logits - logsumexp(logits, axis=1, keepdims=True))


def _sequences(max_len: int):
    for length in range(max_len + 1):
        yield from itertools.product(("a", "b"), repeat=length)


def _random_table(rng: random.Random, max_len: int) -> TableScorer:
    table = {}
    for seq in _sequences(max_len):
        table[" ".join(seq)] = {sym: rng.uniform(-4.0, 0.0) for sym in ("a", "b", EOS)}
    return TableScorer(table)


def _table_total(scorer: TableScorer, seq) -> float:
    state = scorer.start()
    total = 0.0
    for sym in seq:
        step, state = scorer.score(state, sym)
        total += step
    return total + scorer.finish(state)


ONE_HOT = _post([[0, 1, 0], [0, 1, 0], [1, 0, 0], [0, 0, 1]])


# ── exhaustive search agrees with enumeration ────────────────────────────────


class TestAgainstEnumeration:
    @pytest.mark.parametrize("seed", range(100))
    def test_exhaustive_beam_finds_the_best_sequence(self, seed):
        rng = random.Random(seed)
        post = _random_post(np.random.default_rng(seed), rng.randint(1, 5))
        max_len = rng.randint(0, min(post.frames, 4))
        dec = _random_table(rng, max_len)
        corpus = [Transcript(f"u{i}", tuple(rng.choice("ab") for _ in range(rng.randint(1, 4)))) for i in range(5)]
        lm = lm_train(corpus, n=2)
        cfg = CombineConfig(lam=rng.uniform(0.1, 0.9), mu=rng.uniform(0.0, 1.0))

        scored = {}
        for seq in _sequences(max_len):
            ctc = ctc_log_prob(post, seq, VOCAB)
            scored[seq] = combine_scores(ctc, _table_total(dec, seq), lm.sentence_log_prob(seq), cfg)
        best = max(scored, key=scored.get)

        hyps = joint_beam_search(post, VOCAB, EXHAUSTIVE, cfg, dec, lm, max_len=max_len)
        assert len(hyps) == len(scored)
        assert hyps[0].tokens == best
        assert hyps[0].joint == pytest.approx(scored[best], abs=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_smaller_beams_never_beat_exhaustive(self, seed):
        rng = random.Random(100 + seed)
        post = _random_post(np.random.default_rng(100 + seed), 3)
        dec = _random_table(rng, 3)
        cfg = CombineConfig(lam=0.5, mu=0.0)
        top = joint_beam_search(post, VOCAB, EXHAUSTIVE, cfg, dec)[0].joint
        for beam in (1, 2, 4):
            hyps = joint_beam_search(post, VOCAB, beam, cfg, dec)
            assert hyps[0].joint <= top + 1e-12

    @pytest.mark.parametrize("seed", range(50))
    def test_top_score_never_drops_as_the_beam_grows(self, seed):
        rng = random.Random(500 + seed)
        post = _random_post(np.random.default_rng(500 + seed), rng.randint(1, 5))
        max_len = min(post.frames, 4)
        dec = _random_table(rng, max_len)
        corpus = [Transcript(f"u{i}", tuple(rng.choice("ab") for _ in range(rng.randint(1, 4)))) for i in range(5)]
        lm = lm_train(corpus, n=2)
        cfg = CombineConfig(lam=rng.uniform(0.1, 0.9), mu=rng.uniform(0.0, 1.0))
        tops = [joint_beam_search(post, VOCAB, beam, cfg, dec, lm, max_len=max_len)[0].joint for beam in range(1, 7)]
        assert all(later >= earlier - 1e-12 for earlier, later in zip(tops, tops[1:]))


# ── behaviour ────────────────────────────────────────────────────────────────


class TestJointBeamSearch:
    def test_one_hot_posteriors_decode_to_greedy(self):
        hyps = joint_beam_search(ONE_HOT, VOCAB, 3)
        assert list(best_tokens(hyps)) == ctc_greedy(ONE_HOT, VOCAB) == ["a", "b"]
        assert hyps[0].ctc == pytest.approx(0.0)

    def test_ctc_only_uses_full_ctc_weight(self):
        hyps = joint_beam_search(ONE_HOT, VOCAB, 3, CombineConfig(lam=0.2, mu=0.7))
        assert hyps[0].joint == hyps[0].ctc
        assert hyps[0].dec == 0.0 and hyps[0].lm == 0.0

    def test_beam_zero_rejected(self):
        with pytest.raises(DecodeError):
            joint_beam_search(ONE_HOT, VOCAB, 0)

    def test_results_sorted_best_first(self):
        post = _random_post(np.random.default_rng(1), 3)
        hyps = joint_beam_search(post, VOCAB, EXHAUSTIVE)
        joints = [h.joint for h in hyps]
        assert joints == sorted(joints, reverse=True)

    def test_length_norm_ranks_by_per_token_score(self):
        post = _random_post(np.random.default_rng(2), 3)
        hyps = joint_beam_search(post, VOCAB, EXHAUSTIVE, length_norm=True)
        keys = [h.joint / (len(h.tokens) + 1) for h in hyps]
        assert keys == sorted(keys, reverse=True)

    def test_nbest_and_max_len_limit_results(self):
        post = _random_post(np.random.default_rng(3), 3)
        assert len(joint_beam_search(post, VOCAB, EXHAUSTIVE, nbest=2)) == 2
        short = joint_beam_search(post, VOCAB, EXHAUSTIVE, max_len=1)
        assert {h.tokens for h in short} == {(), ("a",), ("b",)}

    def test_hypothesis_dict_spells_out_infinities(self):
        hyps = joint_beam_search(ONE_HOT, VOCAB, EXHAUSTIVE)
        impossible = [h for h in hyps if h.ctc == -math.inf]
        assert impossible and impossible[0].to_dict()["ctc"] == "-inf"


# ── table scorer ─────────────────────────────────────────────────────────────


class TestTableScorer:
    def test_lookup_and_floor(self):
        scorer = TableScorer({"": {"a": -0.5}, "a": {EOS: -0.1}})
        step, state = scorer.score(scorer.start(), "a")
        assert step == -0.5 and state == ("a",)
        assert scorer.finish(state) == -0.1
        assert scorer.score(state, "b")[0] == TABLE_FLOOR

    def test_parse_json(self):
        scorer = parse_table_scorer(json.dumps({"": {"a": -1}, "a b": {"</s>": -2}}))
        assert scorer.finish(("a", "b")) == -2.0

    def test_invalid_json_reports_line(self):
        with pytest.raises(FileFormatError) as exc:
            parse_table_scorer('{\n"": {"a": -1},\n}', "dec.json")
        assert exc.value.line_no == 3

    def test_non_numeric_entry_rejected(self):
        with pytest.raises(FileFormatError):
            parse_table_scorer('{"": {"a": "low"}}', "dec.json")


# ── sweep ────────────────────────────────────────────────────────────────────


class TestBeamSweep:
    def test_rows_for_each_beam_with_and_without_lm(self):
        lm = lm_train([Transcript("t1", ("a", "b"))], n=2)
        rows, timings = beam_sweep({"u1": ONE_HOT}, VOCAB, [1, 2], [Transcript("u1", ("a", "b"))], lm=lm)
        assert [(r["beam"], r["lm"]) for r in rows] == [(1, False), (1, True), (2, False), (2, True)]
        assert all(r["errors"] == 0 for r in rows)
        assert len(timings) == 4
        assert all(t["rtf"] is not None for t in timings)

    def test_missing_reference_rejected(self):
        with pytest.raises(DecodeError):
            beam_sweep({"u1": ONE_HOT}, VOCAB, [1], [Transcript("other", ("a",))])

    def test_no_beams_rejected(self):
        with pytest.raises(DecodeError):
            beam_sweep({"u1": ONE_HOT}, VOCAB, [], [Transcript("u1", ("a",))])
