"""RIFF/WAVE PCM-16 reading and writing."""

import logging
import struct
from pathlib import Path

import numpy as np

from .models import AudioBuffer

logger = logging.getLogger(__name__)

PCM_FORMAT = 1
SCALE = 32768.0


class WavError(Exception):
    """Base class for WAV ingestion failures."""


class WavMissingError(WavError):
    """The WAV file does not exist."""


class WavContainerError(WavError):
    """The file is not a RIFF/WAVE container or lacks a fmt/data chunk."""


class WavEncodingError(WavError):
    """The audio is not 16-bit PCM."""


class WavTruncatedError(WavError):
    """The data chunk is shorter than its header claims."""


def _chunks(data: bytes):
    offset = 12
    while offset + 8 <= len(data):
        chunk_id, size = struct.unpack_from("<4sI", data, offset)
        body_start = offset + 8
        yield chunk_id, size, body_start
        # chunks are word-aligned
        offset = body_start + size + (size & 1)


def read_wav(path: Path) -> AudioBuffer:
    """Read a PCM-16 WAV file, averaging channels to mono and scaling by 1/32768."""
    path = Path(path)
    if not path.is_file():
        raise WavMissingError(f"{path}: no such file")
    data = path.read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavContainerError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    pcm: bytes | None = None
    for chunk_id, size, start in _chunks(data):
        if chunk_id == b"fmt ":
            if size < 16 or start + 16 > len(data):
                raise WavContainerError(f"{path}: fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", data, start)
        elif chunk_id == b"data":
            if fmt is None:
                raise WavContainerError(f"{path}: data chunk before fmt chunk")
            end = start + size
            if end > len(data):
                raise WavTruncatedError(f"{path}: data chunk claims {size} bytes, {len(data) - start} present")
            pcm = data[start:end]
            break
    if fmt is None:
        raise WavContainerError(f"{path}: missing fmt chunk")
    if pcm is None:
        raise WavContainerError(f"{path}: missing data chunk")

    audio_format, channels, sample_rate, _, block_align, bits = fmt
    if audio_format != PCM_FORMAT or bits != 16:
        raise WavEncodingError(f"{path}: expected 16-bit PCM, got format {audio_format} with {bits} bits")
    if channels < 1:
        raise WavContainerError(f"{path}: channel count is {channels}")
    if len(pcm) % (2 * channels):
        raise WavTruncatedError(f"{path}: data chunk ends mid-frame")

    samples = np.frombuffer(pcm, dtype="<i2").astype(np.float64) / SCALE
    mono = samples.reshape(-1, channels).mean(axis=1)
    logger.debug("Read %s: %d Hz, %d channel(s), %d frame(s)", path, sample_rate, channels, mono.shape[0])
    return AudioBuffer(mono, sample_rate)


def write_wav(path: Path, audio: AudioBuffer) -> None:
    """Write mono PCM-16; samples are rounded and clipped to the 16-bit range."""
    pcm = np.clip(np.round(audio.samples * SCALE), -32768, 32767).astype("<i2").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(pcm),
        b"WAVE",
        b"fmt ",
        16,
        PCM_FORMAT,
        1,
        audio.sample_rate,
        audio.sample_rate * 2,
        2,
        16,
        b"data",
        len(pcm),
    )
    Path(path).write_bytes(header + pcm)
