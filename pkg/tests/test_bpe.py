"""Tests for BPE training, encoding and the model file."""

import random

import pytest

from src.app.bpe import (
    BpeFormatError,
    bpe_decode,
    bpe_encode,
    bpe_train,
    decode_tokens,
    dump_bpe,
    encode_tokens,
    parse_bpe,
)
from src.app.models import BpeModel, Transcript


def _corpus(*lines: str) -> list[Transcript]:
    return [Transcript.from_text(f"u{i}", line) for i, line in enumerate(lines)]


# ── training ────────────────────────────────────────────────────────────────


def test_most_frequent_pair_merges_first():
    assert bpe_train(_corpus("ab ab ab"), 1).merges == (("a", "b"),)
    assert bpe_train(_corpus("abc abd"), 1).merges == (("a", "b"),)


def test_zero_merges_is_a_character_model():
    model = bpe_train(_corpus("abc abd"), 0)
    assert model.merges == ()
    assert model.base_symbols == frozenset("abcd")


def test_training_stops_when_no_pair_repeats():
    model = bpe_train(_corpus("abc abd"), 10)
    assert model.merges == (("a", "b"),)


def test_ties_go_to_the_smallest_pair():
    # (x,y) and (y,z) both occur twice
    assert bpe_train(_corpus("xyz xyz"), 1).merges == (("x", "y"),)


def test_training_is_deterministic():
    corpus = _corpus("ktAb ktb ktAbp mktbp", "AlktAb ktAbh")
    assert bpe_train(corpus, 6).merges == bpe_train(corpus, 6).merges


def test_negative_merges_rejected():
    with pytest.raises(ValueError):
        bpe_train(_corpus("a"), -1)


# ── encoding ────────────────────────────────────────────────────────────────


def test_encode_applies_merges_in_order():
    model = BpeModel((("a", "b"),), frozenset("ab"))
    assert bpe_encode(model, "ab") == ["ab"]
    assert bpe_encode(model, "ba") == ["b", "a"]


def test_unseen_characters_stay_single():
    model = bpe_train(_corpus("ab ab"), 1)
    assert bpe_encode(model, "abq") == ["ab", "q"]


def test_decode_of_encode_is_identity_for_random_words():
    rng = random.Random(5)
    model = bpe_train(_corpus("ktAb ktAbp AlktAb mktb ktb ktb"), 8)
    for _ in range(300):
        word = "".join(rng.choice("ktAbplm") for _ in range(rng.randint(1, 8)))
        assert bpe_decode(bpe_encode(model, word)) == word


def test_marked_pieces_join_back_into_words():
    model = bpe_train(_corpus("ktAb ktAb ktAb"), 2)
    pieces = encode_tokens(model, ["ktAb", "Al"])
    assert pieces == ["kt@@", "Ab", "A@@", "l"]
    assert decode_tokens(pieces) == ["ktAb", "Al"]


# ── model file ──────────────────────────────────────────────────────────────


def test_model_file_keeps_merge_order():
    model = bpe_train(_corpus("ktAb ktAb ktAb AlktAb"), 4)
    text = dump_bpe(model)
    assert text.splitlines()[0] == "bpe v1"
    assert parse_bpe(text).merges == model.merges


def test_model_file_errors():
    with pytest.raises(BpeFormatError):
        parse_bpe("not a header\n")
    with pytest.raises(BpeFormatError) as exc_info:
        parse_bpe("bpe v1\na b c\n", "m.bpe")
    assert exc_info.value.line_no == 2
    with pytest.raises(BpeFormatError):
        parse_bpe("bpe v1\na b\na b\n")
