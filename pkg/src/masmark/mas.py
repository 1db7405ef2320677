"""Moving-average sequence (MAS) computation and its inverse problem.

The MAS of a signal x with window b is M[i] = mean(x[i : i+b]).  Embedding
works by deciding how a frame's MAS values should change and then solving
for sample-domain deltas that realize exactly that change, so this module
provides both directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Re-anchor the running sum at this stride so float drift on long signals
# stays below 1e-12 against direct per-window summation.
_ANCHOR = 1 << 16


@dataclass
class MasSequence:
    values: np.ndarray
    window: int


def sliding_means(x: np.ndarray, b: int) -> np.ndarray:
    """Length-b sliding window means of x, one per window position.

    Single pass via the incremental update mean[i+1] = mean[i] +
    (x[i+b] - x[i]) / b, with the running sum recomputed from scratch
    every _ANCHOR positions to bound accumulation error.
    """
    x = np.asarray(x, dtype=np.float64)
    if b < 1:
        raise ValueError("window must be at least 1")
    if b > len(x):
        raise ValueError(f"window {b} exceeds signal length {len(x)}")
    count = len(x) - b + 1
    out = np.empty(count)
    for start in range(0, count, _ANCHOR):
        stop = min(start + _ANCHOR, count)
        anchor = x[start : start + b].sum()
        out[start] = anchor
        if stop - start > 1:
            deltas = x[start + b : stop + b - 1] - x[start : stop - 1]
            out[start + 1 : stop] = anchor + np.cumsum(deltas)
    out /= b
    return out


def moving_average(samples: np.ndarray, b: int) -> MasSequence:
    return MasSequence(sliding_means(samples, b), b)


def solve_sample_variation(v: np.ndarray, b: int, n: int) -> np.ndarray:
    """Sample deltas z realizing the MAS deltas v over one frame.

    v has n*b entries (the desired change to each of the frame's MAS
    values) and its first b entries must be zero: those MAS values are
    held fixed so the previous frame's decoded bit is not disturbed.
    The returned z has n*b + b - 1 entries and satisfies, for every k,

        z[k] + z[k+1] + ... + z[k+b-1] = b * v[k].

    The system is underdetermined by b-1 degrees of freedom; we pin the
    tail, z[n*b - 1 : n*b + b - 1] = v[n*b - 1], and back-substitute
    z[k] = b*(v[k] - v[k+1]) + z[k+b] downward.  Implemented as a reversed
    cumulative sum over the length-b residue classes of k rather than a
    Python loop.
    """
    v = np.asarray(v, dtype=np.float64)
    if n < 2:
        raise ValueError("frame must span at least 2 MAS blocks")
    nb = n * b
    if v.shape != (nb,):
        raise ValueError(f"expected {nb} MAS deltas, got {v.shape}")
    if np.any(v[:b] != 0.0):
        raise ValueError("first b MAS deltas must be zero")

    tail = v[nb - 1]
    # d[k] = b*(v[k] - v[k+1]) for k < nb-1; the k = nb-1 slot starts the
    # recursion from the pinned tail value.
    d = np.empty(nb)
    d[: nb - 1] = b * (v[: nb - 1] - v[1:])
    d[nb - 1] = 0.0
    # z[k] = d[k] + d[k+b] + d[k+2b] + ... + tail: accumulate each residue
    # class bottom-up with a reversed cumsum down the n rows.
    rows = d.reshape(n, b)[::-1]
    z_rows = (np.cumsum(rows, axis=0) + tail)[::-1]
    return np.concatenate((z_rows.ravel(), np.full(b - 1, tail)))


def apply_variation(samples: np.ndarray, offset: int, z: np.ndarray) -> np.ndarray:
    """Return a copy of samples with z added starting at offset."""
    if offset < 0 or offset + len(z) > len(samples):
        raise ValueError("variation range exceeds signal bounds")
    out = np.array(samples, dtype=np.float64)
    out[offset : offset + len(z)] += z
    return out
