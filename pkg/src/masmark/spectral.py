"""Orthonormal DCT-II / DCT-III pair and maximal-coefficient lookup.

Orthonormal scaling makes the transform energy-preserving, so the
embedding strength keeps the same meaning in either domain.  scipy's
fft backend computes the same coefficients as the direct O(N^2) formula
(the test suite pins the two against each other).
"""

from __future__ import annotations

import numpy as np
from scipy import fft as _fft


def dct(x: np.ndarray) -> np.ndarray:
    """Forward orthonormal DCT-II.  Index 0 is the DC coefficient."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 2:
        raise ValueError("need at least 2 points")
    return _fft.dct(x, type=2, norm="ortho")


def idct(c: np.ndarray) -> np.ndarray:
    """Inverse of dct (orthonormal DCT-III)."""
    c = np.asarray(c, dtype=np.float64)
    if len(c) < 2:
        raise ValueError("need at least 2 points")
    return _fft.idct(c, type=2, norm="ortho")


def max_abs_coefficient(c: np.ndarray) -> tuple[int, float]:
    """Index and signed value of the largest-magnitude coefficient.

    Ties break toward the smallest index; DC takes part in the search.
    """
    c = np.asarray(c)
    if len(c) == 0:
        raise ValueError("empty coefficient vector")
    idx = int(np.argmax(np.abs(c)))
    return idx, float(c[idx])
