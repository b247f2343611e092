"""Tests for posterior matrix files."""

import math

import numpy as np
import pytest

from src.app.errors import FileFormatError
from src.app.models import PosteriorMatrix, Vocab
from src.app.posterior_io import PosteriorFormatError, format_posterior, parse_posterior, read_posterior

SAMPLE = f"""ctcpost v1 2 3 0
<b> a b
{math.log(0.5)!r} {math.log(0.25)!r} {math.log(0.25)!r}
-inf 0.0 -inf
"""


def test_parse_sample():
    post, vocab = parse_posterior(SAMPLE)
    assert vocab == Vocab(("<b>", "a", "b"), 0)
    assert post.frames == 2 and post.vocab_size == 3
    assert post.logp[1].tolist() == [-math.inf, 0.0, -math.inf]


def test_format_then_parse_preserves_values():
    post, vocab = parse_posterior(SAMPLE)
    again, vocab_again = parse_posterior(format_posterior(post, vocab))
    assert vocab_again == vocab
    assert np.array_equal(again.logp, post.logp)


def test_read_from_disk(tmp_path):
    path = tmp_path / "utt1.post"
    path.write_text(SAMPLE, encoding="utf-8")
    post, _ = read_posterior(path)
    assert post.frames == 2


@pytest.mark.parametrize(
    "text, line_no",
    [
        ("", 1),
        ("ctcpost v2 1 2 0\n<b> a\n0 -inf\n", 1),
        ("ctcpost v1 one 2 0\n<b> a\n0 -inf\n", 1),
        ("ctcpost v1 1 2 0\n<b>\n0 -inf\n", 2),
        ("ctcpost v1 1 2 0\n<b> <b>\n0 -inf\n", 2),
        ("ctcpost v1 1 2 5\n<b> a\n0 -inf\n", 2),
        ("ctcpost v1 1 2 0\n<b> a\n0\n", 3),
        ("ctcpost v1 1 2 0\n<b> a\n0 zero\n", 3),
    ],
)
def test_malformed_files_report_the_line(text, line_no):
    with pytest.raises(PosteriorFormatError) as exc:
        parse_posterior(text, "x.post")
    assert exc.value.line_no == line_no
    assert str(exc.value).startswith("x.post:")


def test_frame_count_mismatch():
    with pytest.raises(FileFormatError):
        parse_posterior("ctcpost v1 2 2 0\n<b> a\n0 -inf\n", "x.post")


def test_unnormalized_row_rejected():
    with pytest.raises(PosteriorFormatError, match="normalized"):
        parse_posterior("ctcpost v1 1 2 0\n<b> a\n-1 -1\n", "x.post")


def test_positive_log_probability_rejected():
    with pytest.raises(ValueError):
        PosteriorMatrix(np.array([[0.5, -1.0]]))
