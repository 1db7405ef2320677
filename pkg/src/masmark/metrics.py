"""Quality and robustness measurements: SNR, BER, zero crossings."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioClip


@dataclass(frozen=True)
class BerResult:
    errors: int
    total: int

    @property
    def ber(self) -> float:
        return self.errors / self.total


def snr_db(original: AudioClip, processed: AudioClip) -> float:
    """10*log10 of signal power over distortion power, in dB.

    Identical signals return math.inf.
    """
    if len(original) != len(processed):
        raise ValueError("length mismatch")
    if original.sample_rate != processed.sample_rate:
        raise ValueError("sample rate mismatch")
    x = original.samples
    noise = x - processed.samples
    p_noise = float(noise @ noise)
    if p_noise == 0.0:
        return math.inf
    return 10.0 * math.log10(float(x @ x) / p_noise)


def ber(reference, got) -> BerResult:
    reference = np.asarray(reference)
    got = np.asarray(got)
    if reference.shape != got.shape:
        raise ValueError("payload length mismatch")
    return BerResult(int(np.count_nonzero(reference != got)), len(reference))


def zero_crossings(x) -> int:
    """Count sign changes between adjacent samples.

    Exact zeros are transparent: they inherit the sign of the previous
    nonzero sample, so a plateau at zero counts at most one crossing.
    """
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 2:
        raise ValueError("need at least 2 samples")
    s = np.sign(x)
    nz = s != 0
    if not nz.any():
        return 0
    # propagate the last nonzero sign forward over zero runs
    idx = np.maximum.accumulate(np.where(nz, np.arange(len(s)), -1))
    filled = np.where(idx >= 0, s[np.maximum(idx, 0)], 0.0)
    return int(np.count_nonzero(filled[:-1] * filled[1:] < 0))
