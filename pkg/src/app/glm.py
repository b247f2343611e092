"""
Global mapping (GLM) rules: token-sequence rewrites applied to references
and hypotheses before alignment, e.g. ``20 => E$ryn`` to score spoken forms
of numbers.

File format, UTF-8::

    ;; comment
    LHS tokens => RHS tokens

Application scans left to right. At each position the longest matching
left-hand side wins (file order breaks ties between equal lengths); the
replacement is emitted and scanning resumes after the matched span, so
output is never rescanned.
"""

import logging
from pathlib import Path

from .errors import FileFormatError
from .models import GlmRule, GlmRules, Transcript

logger = logging.getLogger(__name__)

_ARROW = "=>"


class GlmFormatError(FileFormatError):
    """Raised when a GLM file line is not ``LHS => RHS``."""


def parse_glm(text: str, source: str | Path = "<glm>") -> GlmRules:
    rules = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(";;"):
            continue
        lhs_text, sep, rhs_text = line.partition(_ARROW)
        if not sep:
            raise GlmFormatError(source, line_no, "'LHS => RHS'", raw)
        lhs = tuple(lhs_text.split())
        if not lhs:
            raise GlmFormatError(source, line_no, "a non-empty left-hand side", raw)
        rules.append(GlmRule(lhs, tuple(rhs_text.split())))
    logger.info("Parsed %d GLM rule(s) from %s", len(rules), source)
    return GlmRules(tuple(rules))


def apply_glm_tokens(rules: GlmRules, tokens: tuple[str, ...]) -> tuple[str, ...]:
    out: list[str] = []
    i = 0
    n = len(tokens)
    while i < n:
        for rule in rules.candidates(tokens[i]):
            width = len(rule.lhs)
            if tokens[i : i + width] == rule.lhs:
                out.extend(rule.rhs)
                i += width
                break
        else:
            out.append(tokens[i])
            i += 1
    return tuple(out)


def apply_glm(rules: GlmRules, transcript: Transcript) -> Transcript:
    """Rewrite ``transcript`` with ``rules``; the empty rule set is the identity."""
    if not rules.rules:
        return transcript
    return transcript.with_tokens(apply_glm_tokens(rules, transcript.tokens))
