"""Tests for the energy VAD."""

import numpy as np
import pytest

from src.app.models import AudioBuffer, VadParams
from src.app.segmenter import SegmentError
from src.app.vad import ENERGY_FLOOR_DB, energy_vad, frame_energies, speech_threshold

SR = 16000


def _silence(seconds: float) -> np.ndarray:
    return np.zeros(round(seconds * SR))


def _tone(seconds: float, amplitude: float = 0.5) -> np.ndarray:
    t = np.arange(round(seconds * SR)) / SR
    return amplitude * np.sin(2 * np.pi * 440.0 * t)


def _audio(*parts: np.ndarray) -> AudioBuffer:
    return AudioBuffer(np.concatenate(parts), SR)


def test_silence_has_no_speech():
    assert energy_vad(_audio(_silence(2.0))) == []


def test_tone_between_silences():
    segments = energy_vad(_audio(_silence(0.5), _tone(1.0), _silence(0.5)), rec_id="r1")
    assert len(segments) == 1
    seg = segments[0]
    assert seg.rec_id == "r1"
    assert seg.start_s == pytest.approx(0.5, abs=0.02)
    assert seg.end_s == pytest.approx(1.5, abs=0.02)


def test_unbroken_tone_is_one_segment():
    audio = _audio(_tone(1.5))
    segments = energy_vad(audio)
    assert [(s.start_s, s.end_s) for s in segments] == [(0.0, audio.duration_s)]


def test_level_does_not_matter():
    loud = energy_vad(_audio(_silence(0.5), _tone(1.0, 0.8), _silence(0.5)))
    quiet = energy_vad(_audio(_silence(0.5), _tone(1.0, 0.008), _silence(0.5)))
    assert [(s.start_s, s.end_s) for s in loud] == [(s.start_s, s.end_s) for s in quiet]


def test_short_pause_is_bridged():
    segments = energy_vad(_audio(_silence(0.5), _tone(1.0), _silence(0.2), _tone(1.0), _silence(0.5)))
    assert len(segments) == 1


def test_long_pause_splits():
    segments = energy_vad(_audio(_silence(0.5), _tone(1.0), _silence(0.6), _tone(1.0), _silence(0.5)))
    assert len(segments) == 2
    assert segments[0].end_s < segments[1].start_s


def test_short_burst_is_dropped():
    assert energy_vad(_audio(_silence(0.5), _tone(0.1), _silence(0.5))) == []


def test_segments_get_kaldi_style_ids():
    segments = energy_vad(_audio(_silence(0.5), _tone(1.0), _silence(0.5)), rec_id="rec7")
    assert segments[0].seg_id.startswith("rec7_")


def test_audio_shorter_than_a_frame_rejected():
    with pytest.raises(SegmentError):
        energy_vad(AudioBuffer(np.zeros(100), SR))


def test_frame_energy_floor():
    energies = frame_energies(AudioBuffer(np.zeros(1000), SR), 400, 160)
    assert energies.shape == (4,)
    assert (energies == ENERGY_FLOOR_DB).all()


def test_threshold_capped_below_the_loudest_frame():
    energies = np.full(10, -20.0)
    assert speech_threshold(energies, VadParams(margin_db=6.0)) == -26.0
