"""
Buckwalter transliteration.

The table lives in ``data/buckwalter.tsv`` so it can be audited without
reading code. Characters outside the table pass through unchanged in both
directions.
"""

import logging
from functools import lru_cache
from importlib.resources import files

logger = logging.getLogger(__name__)

_TABLE_RESOURCE = "data/buckwalter.tsv"


@lru_cache(maxsize=1)
def load_table() -> tuple[tuple[str, str], ...]:
    """Return the (buckwalter, arabic) character pairs in table order."""
    text = files("src.app").joinpath(_TABLE_RESOURCE).read_text(encoding="utf-8")
    pairs = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line or line.startswith("#"):
            continue
        bw, codepoint, *_ = line.split("\t")
        if len(bw) != 1:
            raise ValueError(f"{_TABLE_RESOURCE}:{line_no}: expected one BW character, got {bw!r}")
        pairs.append((bw, chr(int(codepoint, 16))))

    bw_chars = [bw for bw, _ in pairs]
    ar_chars = [ar for _, ar in pairs]
    if len(set(bw_chars)) != len(bw_chars) or len(set(ar_chars)) != len(ar_chars):
        raise ValueError(f"{_TABLE_RESOURCE}: mapping is not one-to-one")
    logger.debug("Loaded %d Buckwalter pairs", len(pairs))
    return tuple(pairs)


@lru_cache(maxsize=1)
def _bw_to_ar_map() -> dict[int, str]:
    return {ord(bw): ar for bw, ar in load_table()}


@lru_cache(maxsize=1)
def _ar_to_bw_map() -> dict[int, str]:
    return {ord(ar): bw for bw, ar in load_table()}


def bw_to_arabic(text: str) -> str:
    """Map Buckwalter characters to Arabic script."""
    return text.translate(_bw_to_ar_map())


def arabic_to_bw(text: str) -> str:
    """Map Arabic-script characters to Buckwalter."""
    return text.translate(_ar_to_bw_map())


def bw_alphabet() -> frozenset[str]:
    return frozenset(bw for bw, _ in load_table())


def has_arabic_script(text: str) -> bool:
    """True if ``text`` contains any character from the Arabic block."""
    return any("؀" <= ch <= "ۿ" for ch in text)
