"""Stage 1: per-block bounds reduction and integer quantization.

Each particle coordinate p on an axis with block minimum lo becomes a bin
index q = floor((p - lo) / (2 eb)), and the bin splits into a segment id
and an in-segment offset:

    seg_id = q >> log2(m)        offset = q & (m - 1)

with m a power-of-two segment size, so the modulo is a bit mask.  The
per-axis ids and offsets are then linearized into a single (seg_id,
offset) pair per particle.  Reconstruction returns the bin midpoint
lo + (q + 0.5) * 2 eb, which bounds the error by eb.

The bin width used internally is fractionally narrower than 2 eb: the
midpoint rule puts a particle sitting exactly on a bin edge (every block
minimum does) at exactly eb from its reconstruction, so any outward
rounding in the float chain, or in the cast back to float32 output, would
breach the bound.  The guard margin absorbs both.  It is derived only
from the stored block bounds, the bound itself and the output precision,
so compressor and decompressor agree on it bit for bit.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import CorruptData, DomainError, WidthOverflow
from .model import BlockGeometry, Precision, QuantizedBlock

__all__ = [
    "block_bounds",
    "effective_bound",
    "axis_bin_count",
    "derive_geometry",
    "quantize_block",
    "dequantize_block",
]

# Relative guard per output precision: half an ulp for the float32 cast
# plus generous headroom for the float64 arithmetic chain.
_GUARD_EPS = {
    Precision.F32: 2.0 ** -24 + 2.0 ** -48,
    Precision.F64: 2.0 ** -48,
}

_LINEAR_LIMIT = 1 << 64


def block_bounds(block_axes: list[np.ndarray]) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Exact componentwise min and max of one block's coordinates."""
    if not block_axes or block_axes[0].size == 0:
        raise DomainError("block bounds of an empty block are undefined")
    mins = tuple(float(a.min()) for a in block_axes)
    maxs = tuple(float(a.max()) for a in block_axes)
    return mins, maxs


def effective_bound(eb_abs: float, lo: float, hi: float, precision: Precision) -> float:
    """Internal bin half-width for one axis: eb_abs minus the guard margin."""
    scale = max(abs(lo), abs(hi)) + 2.0 * eb_abs
    margin = scale * _GUARD_EPS[precision]
    if margin >= 0.5 * eb_abs:
        # Bound at or below the representable resolution; keep half of it
        # so geometry stays finite.  See the error-bound notes in README.
        return 0.5 * eb_abs
    return eb_abs - margin


def axis_bin_count(lo: float, hi: float, eb_abs: float, precision: Precision) -> int:
    """Q = floor(range / (2 eb)) + 1 bins; 1 on a degenerate axis.

    Deterministic in (lo, hi, eb_abs, precision) only, so a decoder
    recomputes the identical value from stored header fields.
    """
    span = hi - lo
    if span <= 0.0:
        return 1
    eb_int = effective_bound(eb_abs, lo, hi, precision)
    ratio = span / (2.0 * eb_int)
    if not ratio < float(_LINEAR_LIMIT):
        raise WidthOverflow(
            f"axis range {span:g} over bound {eb_abs:g} exceeds 64-bit bin indices"
        )
    return int(math.floor(ratio)) + 1


def derive_geometry(
    mins: tuple[float, ...],
    maxs: tuple[float, ...],
    eb_abs: float,
    target_segs_per_axis: int,
    precision: Precision,
) -> BlockGeometry:
    """Per-axis bin and segment counts for the given bounds and bound.

    The segment size is the smallest power of two covering
    bin_count / target_segs_per_axis segments per axis.  A degenerate
    axis collapses to a single one-bin segment.
    """
    if not eb_abs > 0:
        raise DomainError(f"absolute bound must be positive, got {eb_abs}")
    bin_counts: list[int] = []
    seg_sizes: list[int] = []
    seg_counts: list[int] = []
    for lo, hi in zip(mins, maxs):
        q_bins = axis_bin_count(lo, hi, eb_abs, precision)
        per_seg = -(-q_bins // target_segs_per_axis)  # ceil
        m = 1 << (per_seg - 1).bit_length()
        n = -(-q_bins // m)
        bin_counts.append(q_bins)
        seg_sizes.append(m)
        seg_counts.append(n)

    total_segs = math.prod(seg_counts)
    total_offs = math.prod(seg_sizes)
    if total_segs > _LINEAR_LIMIT or total_offs > _LINEAR_LIMIT:
        raise WidthOverflow(
            f"geometry needs {total_segs} segments x {total_offs} offsets, "
            "beyond the 64-bit linearization range"
        )
    return BlockGeometry(
        mins=tuple(mins),
        maxs=tuple(maxs),
        bin_counts=tuple(bin_counts),
        seg_sizes=tuple(seg_sizes),
        seg_counts=tuple(seg_counts),
    )


def _axis_reconstruction(
    q: np.ndarray, lo: float, eb_int: float, precision: Precision
) -> np.ndarray:
    """Bin midpoints as the decompressor will emit them, in float64."""
    v = lo + (q.astype(np.float64) + 0.5) * (2.0 * eb_int)
    if precision is Precision.F32:
        v = v.astype(np.float32).astype(np.float64)
    return v


def _quantize_axis(
    values: np.ndarray,
    lo: float,
    hi: float,
    q_bins: int,
    eb_abs: float,
    precision: Precision,
) -> np.ndarray:
    x = values.astype(np.float64, copy=False)
    eb_int = effective_bound(eb_abs, lo, hi, precision)
    q = np.floor((x - lo) / (2.0 * eb_int))
    np.clip(q, 0.0, float(q_bins - 1), out=q)
    q = q.astype(np.uint64)

    # Snap edge cases: where the emitted reconstruction would land beyond
    # eb_abs of the input (rounding at a bin boundary), move to whichever
    # neighbouring bin reconstructs closer.
    recon = _axis_reconstruction(q, lo, eb_int, precision)
    err = np.abs(recon - x)
    bad = err > eb_abs
    # Beyond 2**62 bins float64 cannot address individual bins anyway.
    if bad.any() and q_bins <= 1 << 62:
        idx = np.flatnonzero(bad)
        q_bad = q[idx]
        step = np.where(recon[idx] > x[idx], -1, 1).astype(np.int64)
        candidate = q_bad.astype(np.int64) + step
        np.clip(candidate, 0, q_bins - 1, out=candidate)
        candidate = candidate.astype(np.uint64)
        cand_err = np.abs(_axis_reconstruction(candidate, lo, eb_int, precision) - x[idx])
        better = cand_err < err[idx]
        q[idx[better]] = candidate[better]
    return q


def _split_and_linearize(per_axis_q: list[np.ndarray], geom: BlockGeometry):
    """(seg, offset) per axis from bin indices, then one linear pair each."""
    bits = geom.offset_bits
    seg = np.zeros_like(per_axis_q[0])
    offset = np.zeros_like(per_axis_q[0])
    seg_stride = 1
    off_shift = 0
    for a, q in enumerate(per_axis_q):
        m = geom.seg_sizes[a]
        seg_a = q >> np.uint64(bits[a])
        off_a = q & np.uint64(m - 1)
        seg += seg_a * np.uint64(seg_stride)
        offset |= off_a << np.uint64(off_shift)
        seg_stride *= geom.seg_counts[a]
        off_shift += bits[a]
    return seg, offset


def _delinearize(
    seg: np.ndarray, offset: np.ndarray, geom: BlockGeometry
) -> list[np.ndarray]:
    """Per-axis bin indices back from linear (seg_id, offset) pairs."""
    bits = geom.offset_bits
    per_axis_q: list[np.ndarray] = []
    seg_rest = seg.copy()
    off_shift = 0
    for a in range(geom.dims):
        n = np.uint64(geom.seg_counts[a])
        m = geom.seg_sizes[a]
        if a + 1 < geom.dims:
            seg_a = seg_rest % n
            seg_rest //= n
        else:
            seg_a = seg_rest
        off_a = (offset >> np.uint64(off_shift)) & np.uint64(m - 1)
        per_axis_q.append((seg_a << np.uint64(bits[a])) | off_a)
        off_shift += bits[a]
    return per_axis_q


def _narrowest(arr: np.ndarray, upper: int) -> np.ndarray:
    # 32-bit intermediates wherever the value range permits.
    if upper <= 1 << 32:
        return arr.astype(np.uint32)
    return arr


def quantize_block(
    block_axes: list[np.ndarray],
    geom: BlockGeometry,
    eb_abs: float,
    preserve_order: bool = False,
) -> QuantizedBlock:
    """Convert one block's coordinates into linearized (seg_id, offset) pairs."""
    for i, axis in enumerate(block_axes):
        if axis.size and not np.isfinite(axis).all():
            raise DomainError(f"axis {i} contains non-finite coordinates")
    precision = Precision.from_dtype(block_axes[0].dtype)
    per_axis_q = [
        _quantize_axis(axis, geom.mins[a], geom.maxs[a], geom.bin_counts[a], eb_abs, precision)
        for a, axis in enumerate(block_axes)
    ]
    seg, offset = _split_and_linearize(per_axis_q, geom)
    ranks = None
    if preserve_order:
        ranks = np.arange(seg.size, dtype=np.uint32)
    return QuantizedBlock(
        geometry=geom,
        seg_ids=_narrowest(seg, geom.total_segments),
        offsets=_narrowest(offset, geom.total_offsets),
        ranks=ranks,
    )


def dequantize_block(
    qb: QuantizedBlock, eb_abs: float, precision: Precision
) -> list[np.ndarray]:
    """Reconstruct one block's coordinates from its quantized pairs.

    Guarantees |p' - p| <= eb_abs for the particle that produced each
    pair, provided eb_abs resolves in the output precision.
    """
    geom = qb.geometry
    seg = qb.seg_ids.astype(np.uint64, copy=False)
    offset = qb.offsets.astype(np.uint64, copy=False)
    if seg.size:
        if int(seg.max()) >= geom.total_segments:
            raise CorruptData("segment id outside the block geometry")
        if int(offset.max()) >= geom.total_offsets:
            raise CorruptData("segment offset outside the block geometry")
    out: list[np.ndarray] = []
    for a, q in enumerate(_delinearize(seg, offset, geom)):
        lo, hi = geom.mins[a], geom.maxs[a]
        eb_int = effective_bound(eb_abs, lo, hi, precision)
        v = _axis_reconstruction(q, lo, eb_int, precision)
        out.append(v.astype(precision.dtype))
    return out
