"""Channel attack simulator: the signal degradations a watermark must survive.

Every attack is a pure, seeded function; outputs are bit-identical across
runs and platforms.  Gaussian noise is therefore generated by Box-Muller
over an explicit 64-bit PCG stream rather than whatever the platform's
normal() happens to be.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import signal as _signal

from .audio_io import AudioClip


def awgn(clip: AudioClip, target_snr_db: float, seed: int) -> AudioClip:
    """Add white Gaussian noise, rescaled so the SNR hits the target exactly.

    The noise vector is drawn first, then scaled so that
    10*log10(sum(x^2)/sum(n^2)) equals target_snr_db to the precision of
    the power ratio itself.
    """
    x = clip.samples
    p_signal = float(x @ x)
    if p_signal == 0.0:
        raise ValueError("SNR is undefined for an all-zero signal")
    if not math.isfinite(target_snr_db):
        raise ValueError("target SNR must be finite; use the identity for no noise")

    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = (len(x) + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1]: keeps log() finite
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    noise = np.concatenate(
        (radius * np.cos(2 * np.pi * u2), radius * np.sin(2 * np.pi * u2))
    )[: len(x)]

    scale = math.sqrt(p_signal / (float(noise @ noise) * 10.0 ** (target_snr_db / 10.0)))
    return AudioClip(x + scale * noise, clip.sample_rate)


def requantize(clip: AudioClip) -> AudioClip:
    """Round every sample to the 8-bit grid (multiples of 1/128 on [-1, 1))."""
    u = clip.samples * 128.0
    levels = np.clip(np.floor(np.abs(u) + 0.5) * np.sign(u), -128, 127)
    return AudioClip(levels / 128.0, clip.sample_rate)


def _sinc_stage(x: np.ndarray, up: int, down: int) -> np.ndarray:
    """One windowed-sinc rate conversion by up or by down (not both).

    Kaiser beta 8.6 for a ~90 dB stopband; 64 taps per polyphase branch.
    The output is trimmed by the filter's group delay so it aligns with
    the input, then padded/cut to the exact rational length.
    """
    half = down * math.ceil(32 * max(up, down) / down)
    taps = 2 * half + 1
    cutoff = min(1.0, up / down) / up  # in Nyquist units of the upsampled rate
    h = _signal.firwin(taps, cutoff, window=("kaiser", 8.6))
    if up > 1:
        y = _signal.upfirdn(h * up, x, up=up, down=1)
        start = half
        out_len = len(x) * up
    else:
        y = _signal.upfirdn(h, x, up=1, down=down)
        start = half // down
        out_len = math.ceil(len(x) / down)
    y = y[start : start + out_len]
    if len(y) < out_len:
        y = np.pad(y, (0, out_len - len(y)))
    return y


def _convert_rate(x: np.ndarray, rate_from: int, rate_to: int) -> np.ndarray:
    ratio = Fraction(rate_to, rate_from)
    y = x
    if ratio.numerator > 1:
        y = _sinc_stage(y, ratio.numerator, 1)
    if ratio.denominator > 1:
        y = _sinc_stage(y, 1, ratio.denominator)
    return y


def resample(clip: AudioClip, intermediate_rate: int) -> AudioClip:
    """Downsample to intermediate_rate and back up to the original rate.

    Models the information loss of a rate conversion roundtrip; the
    returned clip has the original sample rate and exactly the original
    length (the rational chain can come out one sample short or long).
    """
    if intermediate_rate <= 0:
        raise ValueError("intermediate rate must be positive")
    rate = clip.sample_rate
    y = _convert_rate(clip.samples, rate, intermediate_rate)
    y = _convert_rate(y, intermediate_rate, rate)
    if len(y) < len(clip.samples):
        y = np.pad(y, (0, len(clip.samples) - len(y)))
    return AudioClip(y[: len(clip.samples)], rate)


def _butterworth_sos(cutoff_hz: float, sample_rate: int) -> np.ndarray:
    """6th-order Butterworth low-pass as second-order sections.

    Discretized by impulse invariance: the analog poles map to
    exp(p*T) and the partial-fraction residues carry over, keeping the
    digital magnitude response on the analog 1/(1+(f/fc)^12) law for
    cutoffs well under Nyquist.  (A bilinear transform would warp the
    response sharper near the band edge.)  The numerator is rescaled
    for exact unit DC gain.
    """
    wc = 2 * np.pi * cutoff_hz
    T = 1.0 / sample_rate
    angles = np.pi / 2 + (2 * np.arange(1, 7) - 1) * np.pi / 12
    p_analog = wc * np.exp(1j * angles)
    residues = np.array(
        [wc**6 / np.prod(p_analog[m] - np.delete(p_analog, m)) for m in range(6)]
    )
    p_digital = np.exp(p_analog * T)

    den = np.real(np.poly(p_digital))
    num = np.zeros(6, dtype=complex)
    for m in range(6):
        num += T * residues[m] * np.poly(np.delete(p_digital, m))
    num = np.real(num)
    num *= den.sum() / num.sum()

    # Relative degree 6 makes the residues sum to zero, so the leading
    # numerator coefficient is structurally zero: the impulse response
    # starts one sample late.  Root the remaining quartic and keep the
    # delay as an explicit zero at the origin.
    if abs(num[0]) > 1e-9 * np.abs(num).max():
        raise AssertionError("unexpected leading numerator coefficient")
    zeros = np.append(np.roots(num[1:]), 0.0)
    sos = _signal.zpk2sos(zeros, p_digital, num[1])
    # root-finding wobble costs ~1e-8 of DC gain; rescale it to exactly 1
    dc = np.prod(sos[:, :3].sum(axis=1) / sos[:, 3:].sum(axis=1))
    sos[0, :3] /= dc
    return sos


def lowpass_butterworth(clip: AudioClip, cutoff_hz: float) -> AudioClip:
    """6th-order Butterworth low-pass, single causal forward pass.

    Causal on purpose: the group delay it introduces is part of the
    attack, and the sync search has to absorb it.
    """
    if not 0.0 < cutoff_hz < clip.sample_rate / 2.0:
        raise ValueError("cutoff must lie in (0, sample_rate/2)")
    sos = _butterworth_sos(cutoff_hz, clip.sample_rate)
    return AudioClip(_signal.sosfilt(sos, clip.samples), clip.sample_rate)


def random_crop(clip: AudioClip, duration_s: float, seed: int) -> AudioClip:
    """Delete one contiguous segment of round(duration_s * rate) samples.

    The position is uniform over all valid placements, drawn from the
    seeded generator.
    """
    seg = round(duration_s * clip.sample_rate)
    if seg <= 0:
        raise ValueError("crop duration must be positive")
    if seg >= len(clip.samples):
        raise ValueError("crop segment must be shorter than the clip")
    rng = np.random.Generator(np.random.PCG64(seed))
    at = int(rng.integers(0, len(clip.samples) - seg + 1))
    return AudioClip(np.delete(clip.samples, slice(at, at + seg)), clip.sample_rate)


@dataclass(frozen=True)
class AttackSpec:
    """A parsed attack: kind plus its single parameter.

    Legal kinds and parameters:
      none              (identity; keeps evaluation grids uniform)
      awgn:<snr_db>
      requantize
      resample:<rate_hz>
      lowpass:<cutoff_hz>
      crop:<seconds>
    """

    kind: str
    parameter: float = 0.0

    def apply(self, clip: AudioClip, seed: int) -> AudioClip:
        if self.kind == "none":
            return clip
        if self.kind == "awgn":
            return awgn(clip, self.parameter, seed)
        if self.kind == "requantize":
            return requantize(clip)
        if self.kind == "resample":
            return resample(clip, int(self.parameter))
        if self.kind == "lowpass":
            return lowpass_butterworth(clip, self.parameter)
        if self.kind == "crop":
            return random_crop(clip, self.parameter, seed)
        raise ValueError(f"unknown attack kind {self.kind!r}")

    def __str__(self) -> str:
        if self.kind in ("none", "requantize"):
            return self.kind
        return f"{self.kind}:{self.parameter:g}"


def parse_attack_spec(text: str) -> AttackSpec:
    """Parse strings like "awgn:45", "lowpass:8000", "requantize"."""
    kind, _, arg = text.strip().partition(":")
    kind = kind.strip().lower()
    if kind in ("none", "requantize"):
        if arg:
            raise ValueError(f"attack {kind!r} takes no parameter")
        return AttackSpec(kind)
    if kind in ("awgn", "resample", "lowpass", "crop"):
        if not arg:
            raise ValueError(f"attack {kind!r} needs a parameter, e.g. {kind}:45")
        try:
            value = float(arg)
        except ValueError:
            raise ValueError(f"bad parameter {arg!r} for attack {kind!r}") from None
        return AttackSpec(kind, value)
    raise ValueError(f"unknown attack kind {kind!r}")
