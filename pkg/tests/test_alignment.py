"""Tests for Levenshtein alignment."""

import random
from functools import lru_cache

from src.app.alignment import align, align_tokens, edit_counts
from src.app.models import ErrorCounts, OpKind, Transcript


def _kinds(ref: str, hyp: str) -> list[OpKind]:
    return [op.kind for op in align_tokens(ref.split(), hyp.split()).ops]


def _brute_force_cost(ref: tuple[str, ...], hyp: tuple[str, ...]) -> int:
    """Minimum over every edit script, by exhaustive recursion."""

    @lru_cache(maxsize=None)
    def best(i: int, j: int) -> int:
        if i == len(ref):
            return len(hyp) - j
        if j == len(hyp):
            return len(ref) - i
        return min(
            best(i + 1, j + 1) + (ref[i] != hyp[j]),
            best(i + 1, j) + 1,
            best(i, j + 1) + 1,
        )

    return best(0, 0)


def test_identity_is_all_correct():
    assert _kinds("a b c", "a b c") == [OpKind.CORRECT] * 3


def test_single_substitution():
    ops = align_tokens(["a", "b", "c"], ["a", "x", "c"]).ops
    assert [op.kind for op in ops] == [OpKind.CORRECT, OpKind.SUB, OpKind.CORRECT]
    assert (ops[1].ref, ops[1].hyp) == ("b", "x")


def test_deletion_beats_substitution_plus_insertion():
    assert _kinds("a b", "b") == [OpKind.DEL, OpKind.CORRECT]


def test_empty_sides():
    assert _kinds("", "") == []
    assert _kinds("a b", "") == [OpKind.DEL, OpKind.DEL]
    assert _kinds("", "a") == [OpKind.INS]


def test_counts_from_transcripts():
    counts = align(Transcript.from_text("r", "a b c"), Transcript.from_text("h", "a x c d")).counts()
    assert counts == ErrorCounts(substitutions=1, deletions=0, insertions=1, ref_len=3)


def test_random_pairs_match_exhaustive_minimum():
    rng = random.Random(2024)
    for _ in range(500):
        ref = tuple(rng.choice("abc") for _ in range(rng.randint(0, 6)))
        hyp = tuple(rng.choice("abc") for _ in range(rng.randint(0, 6)))
        alignment = align_tokens(ref, hyp)
        assert alignment.counts().errors == _brute_force_cost(ref, hyp)
        # Replaying each side reproduces its input
        assert alignment.ref_tokens() == ref
        assert alignment.hyp_tokens() == hyp


def test_swap_exchanges_deletions_and_insertions():
    rng = random.Random(8)
    for _ in range(200):
        ref = [rng.choice("abc") for _ in range(rng.randint(1, 6))]
        hyp = [rng.choice("abc") for _ in range(rng.randint(1, 6))]
        forward, backward = edit_counts(ref, hyp), edit_counts(hyp, ref)
        assert forward.errors == backward.errors
