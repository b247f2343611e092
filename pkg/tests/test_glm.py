"""Tests for GLM rule parsing and application."""

import pytest

from src.app.glm import GlmFormatError, apply_glm, parse_glm
from src.app.models import GlmRules, Transcript


def _apply(rules_text: str, text: str) -> str:
    return apply_glm(parse_glm(rules_text), Transcript.from_text("u1", text)).text


def test_single_rule_rewrites_digits():
    assert _apply("20 => E$ryn", "qAl 20") == "qAl E$ryn"


def test_empty_rule_set_is_identity():
    transcript = Transcript.from_text("u1", "a b c")
    assert apply_glm(GlmRules(), transcript) is transcript
    assert apply_glm(parse_glm(";; nothing here\n\n"), transcript) == transcript


def test_longest_match_wins_and_output_is_not_rescanned():
    assert _apply("a b => X\na => Y", "a b a") == "X Y"
    # Replacement text that matches another rule stays as written
    assert _apply("a => b\nb => c", "a b") == "b c"


def test_longer_rule_wins_even_when_listed_later():
    assert _apply("a => Y\na b => X", "a b") == "X"
    assert _apply("a => Y\na b => X", "a c") == "Y c"


def test_file_order_breaks_ties_between_equal_lengths():
    assert _apply("a => first\na => second", "a") == "first"


def test_rule_may_delete_tokens():
    assert _apply("uh =>", "uh yes") == "yes"


def test_parse_errors_name_file_and_line():
    with pytest.raises(GlmFormatError) as exc_info:
        parse_glm("a => b\nnot a rule\n", "rules.glm")
    assert exc_info.value.line_no == 2
    assert str(exc_info.value).startswith("rules.glm:2: expected")

    with pytest.raises(GlmFormatError):
        parse_glm(" => b\n", "rules.glm")
