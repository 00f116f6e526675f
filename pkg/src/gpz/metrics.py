"""Rate-distortion evaluation and error-bound verification.

Intra-block particle order is not preserved by default, so original and
reconstructed particles are matched block by block: both sides are
quantized with the original block's geometry and sorted by (seg_id,
offset, tie index), then paired positionally.  Reconstructions of equal
codes are identical, which makes every metric below well defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quantizer
from .errors import DomainError
from .model import CompressConfig, Dataset, resolve_absolute_bound
from .pipeline import iter_block_slices

__all__ = [
    "compression_ratio",
    "bitrate",
    "pair_blocks",
    "nrmse",
    "aggregate_psnr",
    "verify_bound",
    "BoundReport",
    "RateDistortionRow",
    "evaluate",
    "CSV_HEADER",
]


def compression_ratio(original_bytes: int, compressed_bytes: int) -> float:
    if compressed_bytes == 0:
        raise DomainError("compressed size of zero bytes")
    return original_bytes / compressed_bytes


def bitrate(compressed_bytes: int, particle_count: int) -> float:
    """Average compressed bits per particle."""
    if particle_count == 0:
        raise DomainError("bitrate of zero particles")
    return 8.0 * compressed_bytes / particle_count


def _block_order(axes: list[np.ndarray], geom, eb_abs: float) -> np.ndarray:
    qb = quantizer.quantize_block(axes, geom, eb_abs)
    return np.lexsort((np.arange(qb.count), qb.offsets, qb.seg_ids))


def pair_blocks(
    original: Dataset,
    reconstructed: Dataset,
    cfg: CompressConfig,
    eb_abs: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays pairing original and reconstructed particles.

    Both datasets must share block boundaries; each block is quantized
    with the original's bounds so equal values land on equal codes.
    """
    if original.count != reconstructed.count or original.dims != reconstructed.dims:
        raise DomainError("datasets differ in shape, cannot pair")
    if eb_abs is None:
        eb_abs = resolve_absolute_bound(original, cfg)
    orig_idx = np.empty(original.count, dtype=np.int64)
    rec_idx = np.empty(original.count, dtype=np.int64)
    for sl in iter_block_slices(original.count, cfg.block_size):
        orig_axes = [a[sl] for a in original.axes]
        rec_axes = [a[sl].astype(original.precision.dtype) for a in reconstructed.axes]
        mins, maxs = quantizer.block_bounds(orig_axes)
        geom = quantizer.derive_geometry(
            mins, maxs, eb_abs, cfg.target_segs_per_axis, original.precision
        )
        base = sl.start
        orig_idx[sl] = base + _block_order(orig_axes, geom, eb_abs)
        rec_idx[sl] = base + _block_order(rec_axes, geom, eb_abs)
    return orig_idx, rec_idx


def nrmse(
    field_original: np.ndarray,
    field_reconstructed: np.ndarray,
    pairing: tuple[np.ndarray, np.ndarray] | None = None,
) -> float:
    """Root-mean-square error normalized by the original field's range."""
    orig = np.asarray(field_original, dtype=np.float64)
    rec = np.asarray(field_reconstructed, dtype=np.float64)
    if pairing is not None:
        orig = orig[pairing[0]]
        rec = rec[pairing[1]]
    if orig.size == 0:
        return 0.0
    rmse = math.sqrt(float(np.mean((orig - rec) ** 2)))
    span = float(orig.max() - orig.min())
    if span <= 0.0:
        if rmse == 0.0:
            return 0.0
        raise DomainError("degenerate field range with nonzero error")
    return rmse / span


def aggregate_psnr(nrmse_values) -> float:
    """-20 log10 of the root mean square of the per-field NRMSE values.

    Returns +inf when every NRMSE is zero (distortion-free fields).
    """
    values = [float(v) for v in nrmse_values]
    if not values:
        raise DomainError("aggregate PSNR of no fields")
    mean_sq = sum(v * v for v in values) / len(values)
    if mean_sq == 0.0:
        return math.inf
    return -20.0 * math.log10(math.sqrt(mean_sq))


@dataclass(frozen=True)
class BoundReport:
    max_err: float
    violations: list[tuple[int, int, float]]  # (axis, original index, |error|)
    checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_bound(
    original: Dataset,
    reconstructed: Dataset,
    eb_abs: float,
    cfg: CompressConfig,
) -> BoundReport:
    """Check |p' - p| <= eb_abs per axis under block-multiset pairing."""
    orig_idx, rec_idx = pair_blocks(original, reconstructed, cfg, eb_abs)
    max_err = 0.0
    violations: list[tuple[int, int, float]] = []
    for axis in range(original.dims):
        diffs = np.abs(
            original.axes[axis].astype(np.float64)[orig_idx]
            - reconstructed.axes[axis].astype(np.float64)[rec_idx]
        )
        if diffs.size:
            max_err = max(max_err, float(diffs.max()))
        over = np.flatnonzero(diffs > eb_abs)
        violations.extend(
            (axis, int(orig_idx[i]), float(diffs[i])) for i in over
        )
    return BoundReport(max_err=max_err, violations=violations, checked=original.count * original.dims)


CSV_HEADER = "eb,eb_abs,cr,bitrate,nrmse,psnr,max_err"


@dataclass(frozen=True)
class RateDistortionRow:
    eb: float
    eb_abs: float
    cr: float
    bitrate: float
    nrmse_per_axis: tuple[float, ...]
    psnr: float
    max_err: float

    def to_csv(self) -> str:
        nrmse_field = ";".join(f"{v:.6e}" for v in self.nrmse_per_axis)
        psnr = "inf" if math.isinf(self.psnr) else f"{self.psnr:.4f}"
        return (
            f"{self.eb:g},{self.eb_abs:.12e},{self.cr:.4f},{self.bitrate:.4f},"
            f"{nrmse_field},{psnr},{self.max_err:.6e}"
        )


def evaluate(
    original: Dataset,
    reconstructed: Dataset,
    compressed_bytes: int,
    eb: float,
    eb_abs: float,
    cfg: CompressConfig,
) -> RateDistortionRow:
    """One rate-distortion table row for a (dataset, bound) pair."""
    pairing = pair_blocks(original, reconstructed, cfg, eb_abs)
    per_axis = tuple(
        nrmse(original.axes[a], reconstructed.axes[a], pairing)
        for a in range(original.dims)
    )
    report = verify_bound(original, reconstructed, eb_abs, cfg)
    return RateDistortionRow(
        eb=eb,
        eb_abs=eb_abs,
        cr=compression_ratio(original.nbytes, compressed_bytes),
        bitrate=bitrate(compressed_bytes, original.count),
        nrmse_per_axis=per_axis,
        psnr=aggregate_psnr(per_axis),
        max_err=report.max_err,
    )
