"""
Transcript normalization and LM-text cleaning.

Works on Buckwalter (BW) tokens; Arabic-script tokens are transliterated
first. The three fold classes collapse characters that are written
inconsistently in dialectal (and sometimes standard) Arabic:

    Alif:        A  >  <  |   ->  A
    Ya:          y  Y         ->  y
    Ta-Marbuta:  h  p         ->  h

Every step is a character/token filter whose output is a fixed point of
itself, so ``normalize`` is idempotent.
"""

import logging
import re
import unicodedata

from .buckwalter import arabic_to_bw, bw_alphabet, has_arabic_script
from .models import NormalizationPolicy, Transcript

logger = logging.getLogger(__name__)

ALIF_FOLD = {">": "A", "<": "A", "|": "A"}
YA_FOLD = {"Y": "y"}
TA_MARBUTA_FOLD = {"p": "h"}

# Eight harakat (fathatan, dammatan, kasratan, fatha, damma, kasra, shadda,
# sukun) plus tatweel, in BW.
DIACRITICS = frozenset("FNKauio~_")

# Zero-width non-joiner / joiner
_ZERO_WIDTH_RE = re.compile("[‌‍]")

CLEANING_POLICY = NormalizationPolicy(
    fold_alif=False,
    fold_ya=False,
    fold_ta_marbuta=False,
)


def _fold_table(policy: NormalizationPolicy) -> dict[int, str]:
    table: dict[str, str] = {}
    if policy.fold_alif:
        table.update(ALIF_FOLD)
    if policy.fold_ya:
        table.update(YA_FOLD)
    if policy.fold_ta_marbuta:
        table.update(TA_MARBUTA_FOLD)
    return {ord(k): v for k, v in table.items()}


def is_punctuation(ch: str) -> bool:
    """Unicode punctuation/symbol that is not itself a BW letter."""
    return unicodedata.category(ch)[0] in "PS" and ch not in bw_alphabet()


def _letter_count(token: str) -> int:
    return sum(1 for ch in token if ch not in DIACRITICS)


def normalize_token(token: str, policy: NormalizationPolicy) -> str | None:
    """Normalize one token; None means the token is dropped."""
    if has_arabic_script(token):
        token = arabic_to_bw(token)
    token = _ZERO_WIDTH_RE.sub("", token)
    if policy.strip_punctuation:
        token = "".join(ch for ch in token if not is_punctuation(ch))
    if policy.strip_diacritics:
        token = "".join(ch for ch in token if ch not in DIACRITICS)
    token = token.translate(_fold_table(policy))
    if not token:
        return None
    # Counted without diacritics, so a bare harakah token is dropped too
    if policy.drop_single_char_words and _letter_count(token) <= 1 and not token.isdigit():
        return None
    return token


def normalize(
    transcript: Transcript,
    policy: NormalizationPolicy | None = None,
) -> Transcript:
    """Apply ``policy`` (default: everything on) to every token."""
    policy = policy or NormalizationPolicy()
    tokens = []
    for token in transcript.tokens:
        normalized = normalize_token(token, policy)
        if normalized is not None:
            tokens.append(normalized)
    if len(tokens) != len(transcript.tokens):
        logger.debug(
            "%s: dropped %d token(s) during normalization",
            transcript.utt_id,
            len(transcript.tokens) - len(tokens),
        )
    return transcript.with_tokens(tokens)


def clean_text(text: str, policy: NormalizationPolicy = CLEANING_POLICY) -> list[str]:
    """
    Clean raw LM training text into tokens.

    Removes punctuation, diacritics, zero-width joiners, extra spaces,
    newlines and single-character words. Character folds stay off unless
    the caller's policy enables them.
    """
    tokens = []
    for raw in text.split():
        token = normalize_token(raw, policy)
        if token is not None:
            tokens.append(token)
    return tokens
