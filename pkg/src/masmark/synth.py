"""Deterministic synthetic test signals.

Real music clips cannot ship with the package, so robustness checks run
on generated stand-ins: a harmonic tone stack with slow amplitude motion
over band-limited 1/f-ish noise.  Everything is seeded, so fixtures are
bit-identical across runs and platforms.
"""

from __future__ import annotations

import numpy as np

from .audio_io import AudioClip


def tone(freq_hz: float, duration_s: float, sample_rate: int = 44100,
         amplitude: float = 0.5) -> AudioClip:
    t = np.arange(round(duration_s * sample_rate)) / sample_rate
    return AudioClip(amplitude * np.sin(2 * np.pi * freq_hz * t), sample_rate)


def music_like(seed: int, duration_s: float = 15.0, sample_rate: int = 44100,
               rms: float = 0.25) -> AudioClip:
    """A music-like clip: enveloped harmonics plus shaped noise.

    The five-harmonic stack gives tonal structure, the 150 Hz - 8 kHz
    noise floor (amplitude falling as 1/sqrt(f)) fills the spectrum the
    way recorded material does.  Output is scaled to the requested RMS
    and peak-limited to 0.97.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    count = round(duration_s * sample_rate)
    t = np.arange(count) / sample_rate

    f0 = rng.uniform(110.0, 320.0)
    x = np.zeros(count)
    for k in range(1, 6):
        amp = rng.uniform(0.4, 1.0) / k
        phase = rng.uniform(0.0, 2 * np.pi)
        env = 1.0 + 0.7 * np.sin(2 * np.pi * rng.uniform(0.1, 0.6) * t
                                 + rng.uniform(0.0, 2 * np.pi))
        x += amp * env * np.sin(2 * np.pi * k * f0 * t + phase)

    spectrum = np.fft.rfft(rng.normal(size=count))
    freqs = np.fft.rfftfreq(count, 1.0 / sample_rate)
    shape = np.where((freqs > 150.0) & (freqs < 8000.0),
                     1.0 / np.sqrt(np.maximum(freqs, 150.0)), 0.0)
    noise = np.fft.irfft(spectrum * shape, count)
    noise /= np.sqrt(np.mean(noise**2))

    x = x / np.sqrt(np.mean(x**2)) * 0.8 + 0.6 * noise
    x *= rms / np.sqrt(np.mean(x**2))
    peak = np.abs(x).max()
    if peak > 0.97:
        x *= 0.97 / peak
    return AudioClip(x, sample_rate)
