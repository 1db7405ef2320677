"""Watermark embed and extract pipelines.

Layout
------
A payload of L bits is embedded repeatedly.  Each repetition is a sync
block (one mean-QIM bit per 2b samples) followed by L message frames:

    [ sync: 2b * len(sync_bits) samples ][ frame 0 ][ frame 1 ] ...

A frame covers n*b MAS values.  Consecutive frames start n*b samples
apart but each one's sample span runs to n*b + b - 1, so neighbours
overlap by b - 1 samples; the first b MAS values of every frame are held
fixed during embedding, which exactly absorbs the overlap from the frame
before it.  Repetitions are laid end to end from sample 0 until a full
repetition no longer fits.

Embedding a frame: take the DCT of its MAS values past the fixed head,
quantize the largest-magnitude coefficient onto the payload bit's dither
lattice, pull any nearly-as-large coefficients below it, and solve for
the sample deltas realizing the changed MAS.  Extraction redoes the
analysis and reads which lattice the winning coefficient sits on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import mas, qim, spectral
from .audio_io import AudioClip
from .metrics import zero_crossings

DEFAULT_SYNC_HEX = "B714"


def sync_bits_from_hex(hex_code: str) -> tuple[int, ...]:
    """Expand a hex string to a +-1 bit tuple, most significant bit first."""
    code = hex_code.strip().lower().removeprefix("0x")
    if not code:
        raise ValueError("empty sync code")
    value = int(code, 16)
    width = 4 * len(code)
    return tuple(1 if (value >> (width - 1 - i)) & 1 else -1 for i in range(width))


def random_payload(length: int, seed: int) -> np.ndarray:
    """A seeded +-1 payload for tests and demos."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return np.where(rng.random(length) < 0.5, -1, 1).astype(np.int64)


@dataclass(frozen=True)
class EmbedParams:
    """Full embedding configuration.

    b is the MAS window, n the frame length in MAS blocks, S the QIM step
    for message bits, L the payload length in bits.  S_sync defaults to S.
    """

    b: int = 60
    n: int = 10
    S: float = 0.18
    L: int = 128
    sync_bits: tuple[int, ...] = field(default_factory=lambda: sync_bits_from_hex(DEFAULT_SYNC_HEX))
    S_sync: float | None = None

    def __post_init__(self):
        if self.b < 2 or self.n < 2:
            raise ValueError("need b >= 2 and n >= 2")
        if self.S <= 0:
            raise ValueError("strength S must be positive")
        if self.L < 1:
            raise ValueError("payload length must be at least 1")
        if len(self.sync_bits) == 0:
            raise ValueError("sync code must be nonempty")
        if any(w not in (-1, 1) for w in self.sync_bits):
            raise ValueError("sync bits must be -1 or +1")
        if self.S_sync is None:
            object.__setattr__(self, "S_sync", self.S)
        elif self.S_sync <= 0:
            raise ValueError("sync strength must be positive")

    @property
    def frame_stride(self) -> int:
        """Sample distance between consecutive frame starts."""
        return self.n * self.b

    @property
    def frame_span(self) -> int:
        """Samples one frame touches: n*b MAS values need n*b + b - 1."""
        return self.n * self.b + self.b - 1

    @property
    def sync_span(self) -> int:
        return 2 * self.b * len(self.sync_bits)

    @property
    def repetition_span(self) -> int:
        return self.sync_span + self.L * self.frame_stride + self.b - 1

    def capacity_bps(self, sample_rate: int) -> float:
        return sample_rate / self.frame_stride

    @property
    def qim_message(self) -> qim.QimConfig:
        return qim.QimConfig(self.S)

    @property
    def qim_sync(self) -> qim.QimConfig:
        return qim.QimConfig(self.S_sync)


@dataclass
class ExtractionReport:
    """What extraction found: per-repetition candidates and their vote."""

    payload: np.ndarray | None
    candidates: list[np.ndarray]
    sync_positions: list[int]

    @property
    def detected_count(self) -> int:
        return len(self.sync_positions)


def select_block_length(clip: AudioClip) -> int:
    """Suggest a MAS window from the zero-crossing density of M_10.

    The average samples-per-crossing of the 10-point moving average is a
    proxy for the dominant period; the window is set a little under it,
    clamped to [20, 100].
    """
    if len(clip.samples) < 1000:
        raise ValueError("need at least 1000 samples to estimate a block length")
    m10 = mas.sliding_means(clip.samples, 10)
    crossings = zero_crossings(m10)
    if crossings == 0:
        raise ValueError("no zero crossings in M_10; choose b manually")
    num = len(clip.samples) / crossings
    return min(100, max(20, math.floor(0.9 * num)))


# ---------------------------------------------------------------- frames

def _embed_frame_inplace(x: np.ndarray, start: int, bit: int, p: EmbedParams) -> None:
    segment = x[start : start + p.frame_span]
    means = mas.sliding_means(segment, p.b)
    coeffs = spectral.dct(means[p.b :])
    idx, t = spectral.max_abs_coefficient(coeffs)
    t_prime = qim.embed_bit_in_coefficient(t, bit, p.qim_message)
    coeffs[idx] = t_prime
    coeffs = qim.suppress_competing_coefficients(coeffs, idx, t_prime, p.qim_message)
    v = np.zeros(p.frame_stride)
    v[p.b :] = spectral.idct(coeffs) - means[p.b :]
    x[start : start + p.frame_span] += mas.solve_sample_variation(v, p.b, p.n)


def embed_frame(samples: np.ndarray, frame_start: int, bit: int, p: EmbedParams) -> np.ndarray:
    """One message bit into one frame; returns a modified copy."""
    if frame_start < 0 or frame_start + p.frame_span > len(samples):
        raise ValueError("frame exceeds signal bounds")
    out = np.array(samples, dtype=np.float64)
    _embed_frame_inplace(out, frame_start, bit, p)
    return out


def extract_frame(samples: np.ndarray, frame_start: int, p: EmbedParams) -> int:
    """Decode the bit carried by the frame at frame_start."""
    if frame_start < 0 or frame_start + p.frame_span > len(samples):
        raise ValueError("frame exceeds signal bounds")
    means = mas.sliding_means(samples[frame_start : frame_start + p.frame_span], p.b)
    coeffs = spectral.dct(means[p.b :])
    _, t_star = spectral.max_abs_coefficient(coeffs)
    return qim.extract_bit_from_coefficient(t_star, p.qim_message)


# ------------------------------------------------------------------ sync

def _embed_sync_inplace(x: np.ndarray, offset: int, p: EmbedParams) -> None:
    cfg = p.qim_sync
    width = 2 * p.b
    for j, w in enumerate(p.sync_bits):
        block = x[offset + j * width : offset + (j + 1) * width]
        shift = qim.embed_bit_in_coefficient(float(block.mean()), w, cfg) - block.mean()
        block += shift


def embed_sync(samples: np.ndarray, offset: int, p: EmbedParams) -> np.ndarray:
    """Mean-QIM the sync code into consecutive 2b-sample blocks (a copy)."""
    if offset < 0 or offset + p.sync_span > len(samples):
        raise ValueError("sync block exceeds signal bounds")
    out = np.array(samples, dtype=np.float64)
    _embed_sync_inplace(out, offset, p)
    return out


def _prefix_sums(x: np.ndarray) -> np.ndarray:
    return np.concatenate(([0.0], np.cumsum(x)))


def _sync_block_means(prefix: np.ndarray, offsets: np.ndarray, p: EmbedParams) -> np.ndarray:
    """Block means for every candidate offset: shape (len(offsets), n_sync)."""
    width = 2 * p.b
    starts = offsets[:, None] + np.arange(len(p.sync_bits))[None, :] * width
    return (prefix[starts + width] - prefix[starts]) / width


def _sync_mismatches(prefix: np.ndarray, offsets: np.ndarray, p: EmbedParams) -> np.ndarray:
    means = _sync_block_means(prefix, offsets, p)
    bits = qim.decode_bits(means, p.qim_sync)
    return np.count_nonzero(bits != np.asarray(p.sync_bits), axis=1)


def _sync_residues(prefix: np.ndarray, offsets: np.ndarray, p: EmbedParams) -> np.ndarray:
    """Total absolute distance of block means from their expected lattices.

    Near zero at (and only at) a correctly aligned, intact sync block;
    about S_sync/4 per bit on unrelated content.
    """
    means = _sync_block_means(prefix, offsets, p)
    cfg = p.qim_sync
    dither = np.where(np.asarray(p.sync_bits) > 0, cfg.d_pos, cfg.d_neg)
    y = (means + dither[None, :]) / cfg.S
    return cfg.S * np.abs(y - np.round(y)).sum(axis=1)


_SCAN_CHUNK = 1 << 16


def _first_trigger(prefix: np.ndarray, start: int, bound: int, p: EmbedParams,
                   tolerance: int) -> int | None:
    """First offset in [start, bound] decoding within `tolerance` of the code."""
    at = start
    while at <= bound:
        stop = min(at + _SCAN_CHUNK, bound + 1)
        offsets = np.arange(at, stop)
        hits = np.nonzero(_sync_mismatches(prefix, offsets, p) <= tolerance)[0]
        if len(hits):
            return at + int(hits[0])
        at = stop
    return None


def _refine(prefix: np.ndarray, trigger: int, bound: int, p: EmbedParams) -> int:
    """Snap a trigger to the best-aligned offset in the window after it.

    The mismatch test fires a little before exact alignment (a partial
    overlap already decodes well enough), so the true position is located
    as the residue minimum over one sync-bit span ahead; ties go to the
    earliest offset.
    """
    window = p.b * len(p.sync_bits)
    offsets = np.arange(trigger, min(trigger + window, bound) + 1)
    return int(offsets[np.argmin(_sync_residues(prefix, offsets, p))])


def detect_sync(samples: np.ndarray, search_start: int, p: EmbedParams,
                tolerance: int = 1) -> int | None:
    """Locate the next sync code at or after search_start, or None.

    Scans one sample at a time for an offset whose decoded bits differ
    from the sync code in at most `tolerance` positions, then refines to
    the exact alignment.
    """
    bound = len(samples) - p.sync_span
    if search_start < 0 or search_start > bound:
        return None
    prefix = _prefix_sums(samples)
    trigger = _first_trigger(prefix, search_start, bound, p, tolerance)
    if trigger is None:
        return None
    return _refine(prefix, trigger, bound, p)


# ------------------------------------------------------------- pipelines

def embed(clip: AudioClip, payload: np.ndarray, p: EmbedParams) -> AudioClip:
    """Embed the payload into every repetition slot the clip can hold."""
    payload = np.asarray(payload)
    if payload.shape != (p.L,):
        raise ValueError(f"payload must hold exactly {p.L} bits")
    if not np.all(np.isin(payload, (-1, 1))):
        raise ValueError("payload bits must be -1 or +1")
    repetitions = len(clip.samples) // p.repetition_span
    if repetitions == 0:
        raise ValueError(
            f"clip too short: a repetition needs {p.repetition_span} samples, "
            f"got {len(clip.samples)}"
        )
    x = clip.samples.copy()
    for r in range(repetitions):
        base = r * p.repetition_span
        _embed_sync_inplace(x, base, p)
        frames = base + p.sync_span
        for i, bit in enumerate(payload):
            _embed_frame_inplace(x, frames + i * p.frame_stride, int(bit), p)
    return AudioClip(x, clip.sample_rate)


def majority_vote(candidates: list[np.ndarray]) -> np.ndarray:
    """Per-bit sign of the candidate sum; a tied bit resolves to +1."""
    if not candidates:
        raise ValueError("majority vote needs at least one candidate")
    stack = np.vstack(candidates)
    if stack.ndim != 2:
        raise ValueError("candidates must share one length")
    return np.where(stack.sum(axis=0) >= 0, 1, -1).astype(np.int64)


# fractional alignments tried per repetition, integer-exact first so it
# wins ties; eighth-sample steps out to +-5/8 cover a refine that landed
# one sample off either way
_ALIGN_PHIS = (0.0, 0.125, -0.125, 0.25, -0.25, 0.375, -0.375, 0.5, -0.5, 0.625, -0.625)


def _frame_coeff_rows(x: np.ndarray, frames: int, p: EmbedParams) -> np.ndarray:
    rows = np.empty((p.L, p.frame_stride - p.b))
    for i in range(p.L):
        start = frames + i * p.frame_stride
        means = mas.sliding_means(x[start : start + p.frame_span], p.b)
        rows[i] = spectral.dct(means[p.b :])
    return rows


def _decode_frames(x: np.ndarray, frames: int, p: EmbedParams) -> np.ndarray:
    """Decode the L bits of one repetition, absorbing sub-sample delay.

    An IIR filtering attack delays the signal by a fractional number of
    samples; sync refinement returns the nearest integer, and the leftover
    half-sample shift moves a winning coefficient by up to |t|*pi*k/(2N),
    past the S/4 margin for a strong low-bin winner.  Sampling the frame
    at a fractional offset is, to first order, a linear interpolation of
    the coefficients of the two adjacent integer alignments (MAS and DCT
    are linear), so the decoder blends those and keeps the alignment whose
    winners sit closest to their QIM lattices.  Exact integer alignment
    scores maximal and is tried first, which makes the clean path the
    identical decode it always was.
    """
    cfg = p.qim_message
    c0 = _frame_coeff_rows(x, frames, p)
    back = _frame_coeff_rows(x, frames - 1, p) if frames >= 1 else None
    last_end = frames + (p.L - 1) * p.frame_stride + p.frame_span
    ahead = _frame_coeff_rows(x, frames + 1, p) if last_end + 1 <= len(x) else None

    best_score = -1.0
    best: np.ndarray | None = None
    for phi in _ALIGN_PHIS:
        if phi > 0 and ahead is not None:
            c = (1.0 - phi) * c0 + phi * ahead
        elif phi < 0 and back is not None:
            c = (1.0 + phi) * c0 - phi * back
        elif phi == 0.0:
            c = c0
        else:
            continue
        t = np.take_along_axis(c, np.argmax(np.abs(c), axis=1)[:, None], axis=1)[:, 0]
        r = t - np.floor(t / cfg.S) * cfg.S
        score = float(np.minimum(np.abs(r - cfg.S / 2), np.minimum(r, cfg.S - r)).sum())
        if score > best_score:
            best_score = score
            best = t
    return qim.decode_bits(best, cfg)


def extract(clip: AudioClip, p: EmbedParams, tolerance: int = 1) -> ExtractionReport:
    """Find every repetition, decode its bits, and vote.

    A sync hit is accepted only if, at the refined offset, the decoded
    bits still pass the mismatch tolerance and the total lattice residue
    is at most len(sync_bits) * S_sync / 16.  Random content that happens
    to decode near the code fails the residue bar, which is what keeps
    unmarked audio at zero detections; an intact sync sits far below it
    even after heavy filtering.  A rejected trigger resumes the scan one
    sample on; an accepted one skips ahead by almost a full repetition
    (b samples short, so the refine window can catch the next sync even
    if the accepted position sat a little late).
    """
    x = clip.samples
    bound = len(x) - p.repetition_span
    positions: list[int] = []
    candidates: list[np.ndarray] = []
    if bound >= 0:
        prefix = _prefix_sums(x)
        threshold = len(p.sync_bits) * p.S_sync / 16.0
        cursor = 0
        while cursor <= bound:
            trigger = _first_trigger(prefix, cursor, bound, p, tolerance)
            if trigger is None:
                break
            pos = _refine(prefix, trigger, bound, p)
            at = np.array([pos])
            if (_sync_mismatches(prefix, at, p)[0] <= tolerance
                    and _sync_residues(prefix, at, p)[0] <= threshold):
                positions.append(pos)
                candidates.append(_decode_frames(x, pos + p.sync_span, p))
                cursor = pos + p.repetition_span - p.b
            else:
                cursor = trigger + 1
    voted = majority_vote(candidates) if candidates else None
    return ExtractionReport(voted, candidates, positions)
