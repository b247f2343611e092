"""Tests for the segmentation benchmark over several conditions."""

from pathlib import Path

import numpy as np
import pytest

from src.app.errors import FileFormatError, UsageProblem
from src.app.models import AudioBuffer
from src.app.services.bench import TABLE_COLUMNS, BenchConfigError, parse_bench_config, table_tsv
from src.app.services.command_runner import Command, run
from src.app.wav_io import write_wav

REF = "s1 ktb Alwld Aldrs\ns2 qrA Alwld\n"
HYP = "s1 ktb Alwld\ns2 qrA Alwld\n"
BOUNDARIES = "b1 r1 0 10\nb2 r1 12 24\nb3 r1 26 40\nb4 r1 42 60\n"


def _write(tmp_path: Path, name: str, text: str) -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def bench_dir(tmp_path):
    _write(tmp_path, "ref.txt", REF)
    _write(tmp_path, "hyp.txt", HYP)
    _write(tmp_path, "hs.segments", "s1 r1 0 12\ns2 r1 12 20\n")
    _write(tmp_path, "is.segments", "s1 r1 0 60\n")
    _write(tmp_path, "vad.segments", BOUNDARIES)
    return tmp_path


def _bench(config: Path) -> dict:
    return run(Command(name="bench", options={"config": config})).results


TWO_CONDITIONS = """
max_segment_s: 25
conditions:
  - name: HS
    detector_segments: hs.segments
    ref: ref.txt
    hyp: hyp.txt
    cap: false
  - name: Imp_IS
    detector_segments: is.segments
    boundaries: vad.segments
    ref: ref.txt
    hyp: hyp.txt
"""


class TestBench:
    def test_capping_empties_the_longest_bucket(self, bench_dir):
        results = _bench(_write(bench_dir, "bench.yaml", TWO_CONDITIONS))
        rows = {row["condition"]: row for row in results["table"]}
        assert set(rows) == {"HS", "Imp_IS"}
        assert rows["Imp_IS"]["30+"] == 0.0
        assert rows["Imp_IS"]["segments"] == 3
        assert results["conditions"]["Imp_IS"]["cap"]["split_segments"] == 1
        assert results["conditions"]["HS"]["cap"] is None
        assert rows["HS"]["wer_pct"] == rows["Imp_IS"]["wer_pct"] == 20.0

    def test_uncapped_long_segment_shows_in_longest_bucket(self, bench_dir):
        config = TWO_CONDITIONS.replace("boundaries: vad.segments", "cap: false")
        results = _bench(_write(bench_dir, "bench.yaml", config))
        rows = {row["condition"]: row for row in results["table"]}
        assert rows["Imp_IS"]["30+"] == 100.0

    def test_single_condition_matches_separate_commands(self, bench_dir):
        config = _write(
            bench_dir,
            "one.yaml",
            "conditions:\n  - name: IS\n    detector_segments: is.segments\n"
            "    boundaries: vad.segments\n    ref: ref.txt\n    hyp: hyp.txt\n",
        )
        combined = _bench(config)["conditions"]["IS"]

        capped = bench_dir / "capped.segments"
        cap = run(
            Command(
                name="cap",
                options={
                    "segments": bench_dir / "is.segments",
                    "boundaries": bench_dir / "vad.segments",
                    "max_dur": 25.0,
                    "output": capped,
                },
            )
        ).results
        durstats = run(Command(name="durstats", options={"segments": capped})).results
        score = run(
            Command(
                name="score",
                options={"ref": bench_dir / "ref.txt", "hyp": bench_dir / "hyp.txt", "segments": capped},
            )
        ).results

        assert combined == {"cap": cap, "durstats": durstats, "score": score}

    def test_empty_condition_list_is_a_usage_problem(self, bench_dir):
        with pytest.raises(UsageProblem):
            _bench(_write(bench_dir, "empty.yaml", "max_segment_s: 25\nconditions: []\n"))

    def test_missing_file_fails_only_its_condition(self, bench_dir):
        config = TWO_CONDITIONS.replace("detector_segments: hs.segments", "detector_segments: absent.segments")
        results = _bench(_write(bench_dir, "bench.yaml", config))
        assert results["conditions"]["HS"]["error"].startswith("FileNotFoundError")
        assert "score" in results["conditions"]["Imp_IS"]
        assert table_tsv(results["table"]).splitlines()[1] == "HS\t" + "\t".join("-" for _ in TABLE_COLUMNS[1:])

    def test_vad_boundaries_from_audio(self, bench_dir):
        sr = 8000
        tone = 0.5 * np.sin(2 * np.pi * 440.0 * np.arange(20 * sr) / sr)
        samples = np.concatenate([tone, np.zeros(sr), tone[: 19 * sr]])
        (bench_dir / "wav").mkdir()
        write_wav(bench_dir / "wav" / "r1.wav", AudioBuffer(samples, sr))
        _write(bench_dir, "long.segments", "s1 r1 0 40\n")
        config = _write(
            bench_dir,
            "vad.yaml",
            "conditions:\n  - name: IS\n    detector_segments: long.segments\n"
            "    audio_dir: wav\n    ref: ref.txt\n    hyp: hyp.txt\n",
        )
        pieces = _bench(config)["conditions"]["IS"]["cap"]["segments"]
        assert len(pieces) == 2
        assert pieces[0]["end_s"] == pytest.approx(20.5, abs=0.05)
        assert pieces[1]["end_s"] == 40.0


class TestBenchConfig:
    def test_paths_resolve_against_the_config_directory(self, tmp_path):
        config = parse_bench_config(TWO_CONDITIONS, tmp_path / "bench.yaml")
        assert config.conditions[1].boundaries == tmp_path / "vad.segments"
        assert config.conditions[0].cap is False
        assert config.max_segment_s == 25

    def test_two_boundary_sources_rejected(self, tmp_path):
        text = TWO_CONDITIONS.replace("boundaries: vad.segments", "boundaries: vad.segments\n    audio_dir: wav")
        with pytest.raises(BenchConfigError):
            parse_bench_config(text, tmp_path / "bench.yaml")

    def test_duplicate_names_rejected(self, tmp_path):
        with pytest.raises(BenchConfigError, match="duplicate"):
            parse_bench_config(TWO_CONDITIONS.replace("name: HS", "name: Imp_IS"), tmp_path / "bench.yaml")

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(BenchConfigError):
            parse_bench_config("conditions: []\nthreshold: 3\n", tmp_path / "bench.yaml")

    def test_invalid_yaml_reports_line(self, tmp_path):
        with pytest.raises(FileFormatError) as exc:
            parse_bench_config("conditions:\n  - name: [unclosed\n", tmp_path / "bench.yaml")
        assert exc.value.line_no is not None
