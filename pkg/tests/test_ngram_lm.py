"""Tests for the add-k n-gram model, perplexity and the model file."""

import math
import random

import pytest

from src.app.errors import FileFormatError
from src.app.models import Transcript
from src.app.ngram_lm import EOS, LmFormatError, dump_lm, lm_train, parse_lm, perplexity


def _tr(utt_id: str, text: str) -> Transcript:
    return Transcript.from_text(utt_id, text)


CORPUS = [
    _tr("u1", "ktb Alwld Aldrs"),
    _tr("u2", "qrA Alwld Alktb"),
    _tr("u3", "ktb Alwld"),
]


class TestTraining:
    def test_unigram_excludes_end_from_token_events(self):
        lm = lm_train([_tr("u1", "a a b")], n=1, k=1.0)
        assert lm.prob("a") == pytest.approx(0.6)
        assert lm.prob("b") == pytest.approx(0.4)

    def test_unigram_end_probability(self):
        lm = lm_train([_tr("u1", "a a b")], n=1, k=1.0)
        # (1 + 1) / (3 tokens + 1 end + 2k)
        assert lm.prob(EOS) == pytest.approx(2 / 6)

    def test_bigram_counts_with_padding(self):
        lm = lm_train([_tr("u1", "a b")], n=2, k=1.0)
        # P(a | <s>) = (1 + 1) / (1 + 3)
        assert lm.prob("a") == pytest.approx(0.5)
        assert lm.prob(EOS, ["a", "b"]) == pytest.approx(0.5)
        assert lm.prob("a", ["a"]) == pytest.approx(1 / 4)

    def test_unseen_context_is_uniform(self):
        lm = lm_train(CORPUS, n=3)
        probs = [lm.prob(w, ["qrA", "qrA"]) for w in sorted(lm.vocab) + [EOS]]
        assert all(p == pytest.approx(probs[0]) for p in probs)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_each_context_sums_to_one(self, n):
        lm = lm_train(CORPUS, n=n, k=0.5)
        histories = [(), ("ktb",), ("ktb", "Alwld"), ("Alwld", "Aldrs"), ("xx",)]
        for history in histories:
            total = math.fsum(lm.prob(w, history) for w in lm.vocab)
            if n > 1:
                total += lm.prob(EOS, history)
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_non_positive_k_rejected(self):
        with pytest.raises(ValueError):
            lm_train(CORPUS, n=2, k=0.0)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            lm_train([_tr("u1", "")], n=2)


class TestPerplexity:
    def test_unigram_worked_example(self):
        lm = lm_train([_tr("u1", "a a b")], n=1, k=1.0)
        expected = math.exp(-(math.log(0.6) + math.log(1 / 3)) / 2)
        assert perplexity(lm, [_tr("t1", "a")]) == pytest.approx(expected)

    def test_bigram_fits_alternating_text_better_than_unigram(self):
        text = [_tr("u1", "a b a b a b a b")]
        assert perplexity(lm_train(text, n=2), text) < perplexity(lm_train(text, n=1), text)

    def test_invariant_under_utterance_order(self):
        lm = lm_train(CORPUS, n=2)
        shuffled = list(CORPUS)
        random.Random(4).shuffle(shuffled)
        assert perplexity(lm, shuffled) == pytest.approx(perplexity(lm, CORPUS), rel=1e-12)

    def test_empty_text_rejected(self):
        lm = lm_train(CORPUS, n=2)
        with pytest.raises(ValueError):
            perplexity(lm, [])


class TestScorerHandle:
    def test_incremental_scores_match_sentence_probability(self):
        lm = lm_train(CORPUS, n=3)
        tokens = ("ktb", "Alwld", "Alktb")
        state = lm.start()
        total = 0.0
        for tok in tokens:
            step, state = lm.score(state, tok)
            total += step
        total += lm.finish(state)
        assert total == pytest.approx(lm.sentence_log_prob(tokens))


class TestModelFile:
    def test_dump_then_parse_keeps_probabilities(self):
        lm = lm_train(CORPUS, n=3, k=0.25)
        again = parse_lm(dump_lm(lm))
        assert again.order == 3 and again.k == 0.25 and again.vocab == lm.vocab
        for history in [(), ("ktb",), ("ktb", "Alwld")]:
            for w in sorted(lm.vocab) + [EOS]:
                assert again.prob(w, history) == lm.prob(w, history)

    def test_separator_characters_in_tokens_are_escaped(self):
        lm = lm_train([_tr("u1", "a|b 50%")], n=2)
        text = dump_lm(lm)
        assert "a%7Cb" in text and "50%25" in text
        assert parse_lm(text).vocab == {"a|b", "50%"}

    def test_bad_header(self):
        with pytest.raises(LmFormatError) as exc:
            parse_lm("arpa 3 1.0\n", "m.lm")
        assert exc.value.line_no == 1
        assert isinstance(exc.value, FileFormatError)

    def test_bad_entry_reports_line(self):
        with pytest.raises(LmFormatError) as exc:
            parse_lm("ngram v1 2 1.0\n<s>|a 1\n<s> a\n", "m.lm")
        assert exc.value.line_no == 3

    def test_wrong_context_width(self):
        with pytest.raises(LmFormatError) as exc:
            parse_lm("ngram v1 3 1.0\n<s>|a 1\n", "m.lm")
        assert exc.value.line_no == 2
