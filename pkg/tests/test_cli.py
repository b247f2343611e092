"""Tests for argument parsing, exit codes and the JSON run report."""

import json
from pathlib import Path

import numpy as np
import pytest
from typer.testing import CliRunner

from src.app.errors import UsageProblem
from src.app.models import PosteriorMatrix, Vocab
from src.app.posterior_io import format_posterior
from src.cli.main import app, parse_args

runner = CliRunner()

REF = "u1 ktb Alwld Aldrs\nu2 qrA Alwld\nu3 hl\n"
HYP = "u1 ktb Alwld Aldrs\nu2 qrA Alwld\nu3 hl\n"
BOUNDARIES = "b1 r1 0 10\nb2 r1 12 24\nb3 r1 26 40\nb4 r1 42 60\n"


def _write(tmp_path: Path, name: str, text: str) -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def _invoke(args):
    return runner.invoke(app, [str(a) for a in args])


def _report(result) -> dict:
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


def _stable(report: dict) -> dict:
    return {k: v for k, v in report.items() if k not in ("wall_time_s", "timings")}


def _posterior_file(tmp_path: Path, name: str) -> Path:
    with np.errstate(divide="ignore"):
        logp = np.log(np.array([[0, 1, 0], [0, 1, 0], [1, 0, 0], [0, 0, 1.0]]))
    text = format_posterior(PosteriorMatrix(logp), Vocab(("<b>", "a", "b")))
    return _write(tmp_path, name, text)


# ── parsing ──────────────────────────────────────────────────────────────────


class TestParseArgs:
    def test_score(self):
        cmd = parse_args(["score", "--ref", "r.txt", "--hyp", "h.txt"])
        assert cmd.name == "score"
        assert cmd.options["ref"] == Path("r.txt")
        assert cmd.options["hyp"] == Path("h.txt")
        assert cmd.options["format"] == "kaldi"

    def test_missing_required_option(self):
        with pytest.raises(UsageProblem):
            parse_args(["score"])

    def test_unknown_option(self):
        with pytest.raises(UsageProblem):
            parse_args(["score", "--ref", "r.txt", "--hyp", "h.txt", "--color"])

    def test_decode_defaults(self):
        cmd = parse_args(["decode", "--post", "p.ctc", "--beam", "20", "--lam", "0.5", "--mu", "0.3"])
        assert cmd.name == "decode"
        assert cmd.options["post"] == [Path("p.ctc")]
        assert (cmd.options["beam"], cmd.options["lam"], cmd.options["mu"]) == (20, 0.5, 0.3)

    def test_repeatable_references(self):
        cmd = parse_args(["mr-score", "-r", "a.txt", "-r", "b.txt", "--hyp", "h.txt"])
        assert cmd.options["refs"] == [Path("a.txt"), Path("b.txt")]

    def test_usage_error_message_names_the_option(self):
        with pytest.raises(UsageProblem, match="--ref"):
            parse_args(["score", "--hyp", "h.txt"])

    def test_help_runs_nothing(self):
        assert parse_args(["score", "--help"]) is None

    def test_exit_code_for_usage_error(self):
        assert _invoke(["score"]).exit_code == 2


# ── running ──────────────────────────────────────────────────────────────────


class TestRun:
    def test_identical_transcripts_score_zero(self, tmp_path):
        ref = _write(tmp_path, "ref.txt", REF)
        hyp = _write(tmp_path, "hyp.txt", HYP)
        report = _report(_invoke(["score", "--ref", ref, "--hyp", hyp]))
        assert report["results"]["rate"] == 0.0
        assert report["results"]["utterance_count"] == 3
        assert [entry["path"] for entry in report["inputs"]] == [str(ref), str(hyp)]
        assert report["command"]["name"] == "score"

    def test_gap_worked_values(self):
        report = _report(_invoke(["gap", "--a", "0.2,0.2", "--b", "0,0.1;0.1,0"]))
        assert report["results"]["gap"] == pytest.approx(0.05)
        assert report["results"]["gap_rounded"] == 0.05

    def test_gap_values_need_both_sides(self):
        result = _invoke(["gap", "--a", "0.2,0.2"])
        assert result.exit_code == 2
        assert "--a needs --b" in result.output

    def test_empty_bench_config_exits_two(self, tmp_path):
        config = _write(tmp_path, "bench.yaml", "conditions: []\n")
        assert _invoke(["bench", "--config", config]).exit_code == 2

    def test_cap_with_boundary_file(self, tmp_path):
        segments = _write(tmp_path, "is.segments", "s1 r1 0 60\n")
        bounds = _write(tmp_path, "vad.segments", BOUNDARIES)
        out = tmp_path / "capped.segments"
        report = _report(_invoke(["cap", "--segments", segments, "-b", bounds, "-o", out]))
        pieces = report["results"]["segments"]
        assert [(p["start_s"], p["end_s"]) for p in pieces] == [(0.0, 25.0), (25.0, 41.0), (41.0, 60.0)]
        assert all(p["end_s"] - p["start_s"] <= 25.0 for p in pieces)
        assert len(out.read_text(encoding="utf-8").splitlines()) == 3
        assert report["outputs"] == [str(out)]

    def test_decode_one_hot(self, tmp_path):
        post = _posterior_file(tmp_path, "utt1.ctc")
        report = _report(_invoke(["decode", "--post", post, "--beam", "4", "--greedy"]))
        best = report["results"]["utterances"]["utt1"][0]
        assert best["tokens"] == ["a", "b"]
        assert report["results"]["greedy"] == {"utt1": ["a", "b"]}

    def test_report_file_keeps_stdout_free(self, tmp_path):
        ref = _write(tmp_path, "ref.txt", REF)
        out = tmp_path / "runs" / "score.json"
        result = _invoke(["score", "--ref", ref, "--hyp", ref, "--report", out])
        assert result.exit_code == 0
        assert "\"results\"" not in result.stdout
        assert json.loads(out.read_text(encoding="utf-8"))["results"]["errors"] == 0

    def test_kernels_check(self):
        report = _report(_invoke(["kernels-check", "--seed", "1", "--cases", "3"]))
        assert all(row["passed"] for row in report["results"]["checks"])


# ── determinism ──────────────────────────────────────────────────────────────


class TestDeterminism:
    def _fixtures(self, tmp_path):
        ref = _write(tmp_path, "ref.txt", REF)
        hyp = _write(tmp_path, "hyp.txt", "u1 ktb Alwld\nu2 qrA Alwld Aldrs\nu3 hl hl\n")
        segments = _write(tmp_path, "is.segments", "s1 r1 0 60\n")
        bounds = _write(tmp_path, "vad.segments", BOUNDARIES)
        post_a = _posterior_file(tmp_path, "a.ctc")
        post_b = _posterior_file(tmp_path, "b.ctc")
        return [
            ["score", "--ref", ref, "--hyp", hyp],
            ["errors", "--ref", ref, "--hyp", hyp, "--top", "5"],
            ["gap", "--a", "0.2,0.2", "--b", "0,0.1;0.1,0"],
            ["cap", "--segments", segments, "-b", bounds],
            ["decode", "--post", post_a, "--post", post_b, "--beam", "3"],
        ]

    @pytest.mark.parametrize("index", range(5))
    def test_repeat_runs_and_worker_counts_agree(self, tmp_path, index):
        args = self._fixtures(tmp_path)[index]
        runs = [_report(_invoke(args)), _report(_invoke(args))]
        if args[0] in ("score", "errors", "decode"):
            runs += [_report(_invoke(args + ["--workers", n])) for n in ("1", "4")]
        first = _stable(runs[0])
        assert all(_stable(r) == first for r in runs[1:])


# ── failures ─────────────────────────────────────────────────────────────────


class TestFailures:
    def test_missing_input_exits_one(self, tmp_path):
        result = _invoke(["score", "--ref", tmp_path / "absent.txt", "--hyp", tmp_path / "absent.txt"])
        assert result.exit_code == 1
        assert "FileNotFoundError" in result.output

    def test_malformed_file_names_the_line(self, tmp_path):
        ref = _write(tmp_path, "ref.txt", REF)
        bad = _write(tmp_path, "bad.segments", "s1 r1 0 60\ns2 r1 zero 70\n")
        result = _invoke(["score", "--ref", ref, "--hyp", ref, "--segments", bad])
        assert result.exit_code == 1
        assert "bad.segments:2" in result.output

    def test_failed_run_leaves_no_output(self, tmp_path):
        bounds = _write(tmp_path, "vad.segments", BOUNDARIES)
        unsorted = _write(tmp_path, "is.segments", "s2 r1 30 90\ns1 r1 0 20\n")
        out = tmp_path / "capped.segments"
        result = _invoke(["cap", "--segments", unsorted, "-b", bounds, "-o", out])
        assert result.exit_code == 1
        assert not out.exists()
