"""Bit-exact 16-bit mono PCM WAV reading and writing.

Samples are carried internally as float64 in nominal [-1, 1), mapped from
the signed 16-bit grid by s / 32768.  The divisor 32768 (not 32767) keeps
integer 0 at exactly 0.0 and makes the map one-to-one on the negative
range; the write side clamps +1.0 down to the largest representable level.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

_SCALE = 32768.0


class WavFormatError(ValueError):
    """Raised when the input bytes are not a supported WAV file."""


@dataclass
class AudioClip:
    """A mono audio signal: float samples plus their sample rate in Hz.

    Samples may transiently leave [-1, 1] while being processed; they are
    clamped only on write-out.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


def read_wav(data: bytes) -> AudioClip:
    """Parse a RIFF/WAVE byte string holding 16-bit mono integer PCM.

    Unknown chunks (LIST, fact, ...) are skipped.  Malformed containers and
    unsupported formats raise WavFormatError with a message naming the
    offending part.
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError("malformed RIFF header: not a RIFF/WAVE container")

    fmt = None
    pcm = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            if len(body) < 16:
                raise WavFormatError("malformed fmt chunk: too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            pcm = body
        # chunks are word-aligned: odd sizes carry a pad byte
        pos += 8 + size + (size & 1)

    if fmt is None:
        raise WavFormatError("malformed WAV: missing fmt chunk")
    if pcm is None:
        raise WavFormatError("malformed WAV: missing data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format != 1:
        raise WavFormatError(f"unsupported format tag {audio_format}: integer PCM required")
    if bits != 16:
        raise WavFormatError(f"unsupported bit depth {bits}: 16-bit required")
    if channels != 1:
        raise WavFormatError(f"unsupported channel count {channels}: mono required")

    ints = np.frombuffer(pcm[: len(pcm) & ~1], dtype="<i2")
    return AudioClip(ints.astype(np.float64) / _SCALE, sample_rate)


def write_wav(clip: AudioClip) -> bytes:
    """Serialize a clip as a canonical 44-byte-header 16-bit mono PCM WAV.

    Each sample is clamped to [-1, 1 - 1/32768], scaled by 32768 and
    rounded half away from zero, so values already on the 16-bit grid
    roundtrip exactly.
    """
    if len(clip.samples) == 0:
        raise ValueError("cannot write an empty clip")
    x = np.clip(clip.samples, -1.0, 1.0 - 1.0 / _SCALE) * _SCALE
    ints = (np.floor(np.abs(x) + 0.5) * np.sign(x)).astype("<i2")
    pcm = ints.tobytes()

    rate = clip.sample_rate
    header = b"RIFF" + struct.pack("<I", 36 + len(pcm)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16)
    header += b"data" + struct.pack("<I", len(pcm))
    return header + pcm


def load_wav(path) -> AudioClip:
    with open(path, "rb") as f:
        return read_wav(f.read())


def save_wav(path, clip: AudioClip) -> None:
    with open(path, "wb") as f:
        f.write(write_wav(clip))
