"""
Transcript file reading and writing.

Two layouts are accepted:

* ``kaldi`` (default): ``<utt_id> <token> ... <token>`` per line, where the
  token list may be empty.
* ``trn`` (sclite): ``<token> ... <token> (<utt_id>)`` per line.
"""

import logging
import re
from collections.abc import Iterable
from pathlib import Path

from .errors import FileFormatError
from .models import Transcript

logger = logging.getLogger(__name__)

TRANSCRIPT_FORMATS = ("kaldi", "trn")

_TRN_ID_RE = re.compile(r"^(?P<text>.*?)\s*\((?P<utt>[^()\s]+)\)\s*$")


class TranscriptFormatError(FileFormatError):
    """Raised when a transcript line cannot be parsed or repeats an utterance id."""


def parse_transcripts(
    text: str,
    source: str | Path = "<transcripts>",
    fmt: str = "kaldi",
) -> list[Transcript]:
    if fmt not in TRANSCRIPT_FORMATS:
        raise ValueError(f"unknown transcript format {fmt!r}; choose from {', '.join(TRANSCRIPT_FORMATS)}")

    transcripts: list[Transcript] = []
    seen: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if fmt == "trn":
            match = _TRN_ID_RE.match(line)
            if not match:
                raise TranscriptFormatError(source, line_no, "'tokens ... (utt_id)'", raw)
            utt_id, body = match["utt"], match["text"]
        else:
            utt_id, _, body = line.partition(" ")
        if utt_id in seen:
            raise TranscriptFormatError(source, line_no, f"a unique utterance id (duplicate {utt_id!r})", raw)
        seen.add(utt_id)
        try:
            transcripts.append(Transcript.from_text(utt_id, body))
        except ValueError as exc:
            raise TranscriptFormatError(source, line_no, str(exc), raw) from exc

    logger.info("Read %d transcript(s) from %s", len(transcripts), source)
    return transcripts


def read_transcripts(path: Path, fmt: str = "kaldi") -> list[Transcript]:
    return parse_transcripts(path.read_text(encoding="utf-8"), path, fmt)


def format_transcripts(transcripts: Iterable[Transcript], fmt: str = "kaldi") -> str:
    lines = []
    for t in transcripts:
        if fmt == "trn":
            lines.append(f"{t.text} ({t.utt_id})" if t.tokens else f"({t.utt_id})")
        else:
            lines.append(f"{t.utt_id} {t.text}" if t.tokens else t.utt_id)
    return "".join(line + "\n" for line in lines)


def index_by_id(transcripts: Iterable[Transcript]) -> dict[str, Transcript]:
    return {t.utt_id: t for t in transcripts}


def pair_transcripts(
    refs: list[Transcript],
    hyps: list[Transcript],
) -> list[tuple[Transcript, Transcript]]:
    """
    Pair references with hypotheses by utterance id, sorted by id.

    A reference without a hypothesis is scored against an empty hypothesis
    (all deletions); hypotheses without a reference are skipped.
    """
    hyp_by_id = index_by_id(hyps)
    ref_ids = {r.utt_id for r in refs}
    extra = sorted(set(hyp_by_id) - ref_ids)
    if extra:
        logger.warning("Skipping %d hypothesis utterance(s) with no reference: %s", len(extra), ", ".join(extra[:5]))

    pairs = []
    missing = []
    for ref in sorted(refs, key=lambda t: t.utt_id):
        hyp = hyp_by_id.get(ref.utt_id)
        if hyp is None:
            missing.append(ref.utt_id)
            hyp = Transcript(ref.utt_id, ())
        pairs.append((ref, hyp))
    if missing:
        logger.warning("%d reference utterance(s) have no hypothesis; scored as empty", len(missing))
    return pairs
