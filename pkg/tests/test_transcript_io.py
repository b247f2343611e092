"""Tests for transcript file parsing, writing and pairing."""

import pytest

from src.app.models import Transcript
from src.app.transcript_io import (
    TranscriptFormatError,
    format_transcripts,
    pair_transcripts,
    parse_transcripts,
    read_transcripts,
)


def test_kaldi_lines_with_empty_token_lists():
    transcripts = parse_transcripts("u1 qAl E$ryn\nu2\n\nu3   ktAb  \n")
    assert transcripts == [
        Transcript("u1", ("qAl", "E$ryn")),
        Transcript("u2", ()),
        Transcript("u3", ("ktAb",)),
    ]


def test_trn_layout():
    transcripts = parse_transcripts("qAl E$ryn (u1)\n(u2)\n", fmt="trn")
    assert transcripts == [Transcript("u1", ("qAl", "E$ryn")), Transcript("u2", ())]


def test_writers_match_readers():
    transcripts = [Transcript("u1", ("a", "b")), Transcript("u2", ())]
    assert format_transcripts(transcripts) == "u1 a b\nu2\n"
    assert format_transcripts(transcripts, "trn") == "a b (u1)\n(u2)\n"
    assert parse_transcripts(format_transcripts(transcripts, "trn"), fmt="trn") == transcripts


def test_duplicate_ids_rejected_with_line_number():
    with pytest.raises(TranscriptFormatError) as exc_info:
        parse_transcripts("u1 a\nu2 b\nu1 c\n", "hyp.txt")
    assert exc_info.value.line_no == 3
    assert exc_info.value.path == "hyp.txt"


def test_trn_line_without_id_rejected():
    with pytest.raises(TranscriptFormatError):
        parse_transcripts("a b c\n", fmt="trn")


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        parse_transcripts("u1 a\n", fmt="ctm")


def test_read_from_disk(tmp_path):
    path = tmp_path / "ref.txt"
    path.write_text("u1 ktAb\n", encoding="utf-8")
    assert read_transcripts(path) == [Transcript("u1", ("ktAb",))]


def test_pairing_sorts_and_fills_missing_hypotheses():
    refs = [Transcript("u2", ("b",)), Transcript("u1", ("a",))]
    hyps = [Transcript("u1", ("a",)), Transcript("u9", ("z",))]
    pairs = pair_transcripts(refs, hyps)
    assert [r.utt_id for r, _ in pairs] == ["u1", "u2"]
    assert pairs[1][1] == Transcript("u2", ())
