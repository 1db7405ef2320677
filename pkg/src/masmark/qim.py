"""Dithered quantization index modulation on a single value.

A bit w in {-1, +1} selects a dither d[w]: d[+1] = S/4, d[-1] = 3S/4.
Embedding snaps the value onto the step-S lattice shifted by -d[w];
decoding reads which lattice the value sits nearest.  The two lattices
interleave at spacing S/2, so any perturbation smaller than S/4 in
magnitude leaves the decoded bit intact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QimConfig:
    """Quantization step S; dithers are fixed at S/4 and 3S/4."""

    S: float

    def __post_init__(self):
        if self.S <= 0:
            raise ValueError("strength S must be positive")

    @property
    def d_pos(self) -> float:
        return self.S / 4.0

    @property
    def d_neg(self) -> float:
        return 3.0 * self.S / 4.0


def _round_half_away(u):
    return np.floor(np.abs(u) + 0.5) * np.sign(u)


def embed_bit_in_coefficient(t: float, bit: int, cfg: QimConfig) -> float:
    """Quantize t onto the lattice of `bit`; moves t by at most S/2."""
    if bit not in (-1, 1):
        raise ValueError("bit must be -1 or +1")
    d = cfg.d_pos if bit == 1 else cfg.d_neg
    return float(_round_half_away((t + d) / cfg.S) * cfg.S - d)


def extract_bit_from_coefficient(t_star: float, cfg: QimConfig) -> int:
    """Decode the bit nearest to t_star.

    The residue r = t* mod S (mathematical floor, so r is in [0, S) for
    negative t* too) lands at S/4 for -1 and 3S/4 for +1.
    """
    r = t_star - np.floor(t_star / cfg.S) * cfg.S
    return 1 if r >= cfg.S / 2.0 else -1


def decode_bits(values: np.ndarray, cfg: QimConfig) -> np.ndarray:
    """Vectorized extract_bit_from_coefficient over an array."""
    values = np.asarray(values, dtype=np.float64)
    r = values - np.floor(values / cfg.S) * cfg.S
    return np.where(r >= cfg.S / 2.0, 1, -1)


def suppress_competing_coefficients(
    coeffs: np.ndarray, idx: int, t_prime: float, cfg: QimConfig
) -> np.ndarray:
    """Pull coefficients close to |t'| below it so t' stays the maximum.

    Every coefficient other than idx whose magnitude exceeds
    tau = |t'| - S/8 is reduced, keeping its sign:

      * |t'| >  S: new magnitude |t'| - S/8 (just below the winner);
      * |t'| <= S: new magnitude min(0.8*S, 0.8*|t'|), the clamp keeping
        the result under a small |t'|.

    The caller must already have written t' into coeffs[idx].
    """
    if t_prime == 0.0:
        raise ValueError("t' = 0 cannot be kept maximal")
    mag = abs(t_prime)
    tau = mag - cfg.S / 8.0
    m = mag - cfg.S / 8.0 if mag > cfg.S else min(0.8 * cfg.S, 0.8 * mag)
    out = np.array(coeffs, dtype=np.float64)
    mask = np.abs(out) > tau
    mask[idx] = False
    out[mask] = m * np.sign(out[mask])
    return out
