"""Core domain types shared by all compressor stages.

A dataset is a set of discrete points given as one contiguous coordinate
array per axis plus an element precision tag.  Coordinates are compressed
under a user-supplied error bound that is either absolute or relative to
the joint value range of all axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError

__all__ = [
    "Precision",
    "EbMode",
    "Dataset",
    "CompressConfig",
    "BlockGeometry",
    "QuantizedBlock",
    "resolve_absolute_bound",
]


class Precision(Enum):
    F32 = 0
    F64 = 1

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float32) if self is Precision.F32 else np.dtype(np.float64)

    @property
    def itemsize(self) -> int:
        return 4 if self is Precision.F32 else 8

    @classmethod
    def from_dtype(cls, dtype: np.dtype) -> "Precision":
        dtype = np.dtype(dtype)
        if dtype == np.float32:
            return cls.F32
        if dtype == np.float64:
            return cls.F64
        raise DomainError(f"unsupported coordinate dtype {dtype}")


class EbMode(Enum):
    ABSOLUTE = 0
    RANGE_RELATIVE = 1


@dataclass(frozen=True)
class Dataset:
    """d-dimensional particle coordinates, one contiguous array per axis.

    Invariants checked at construction: 1 <= dims <= 3, all axis arrays
    share the same length and dtype, and every coordinate is finite.
    """

    axes: tuple[np.ndarray, ...]
    precision: Precision

    def __post_init__(self) -> None:
        if not 1 <= len(self.axes) <= 3:
            raise DomainError(f"dims must be 1, 2 or 3, got {len(self.axes)}")
        dtype = self.precision.dtype
        axes = tuple(np.ascontiguousarray(a, dtype=dtype) for a in self.axes)
        counts = {a.shape for a in axes}
        if len(counts) != 1 or axes[0].ndim != 1:
            raise DomainError("all axes must be 1-D arrays of identical length")
        for i, a in enumerate(axes):
            if a.size and not np.isfinite(a).all():
                raise DomainError(f"axis {i} contains non-finite coordinates")
        object.__setattr__(self, "axes", axes)

    @property
    def dims(self) -> int:
        return len(self.axes)

    @property
    def count(self) -> int:
        return int(self.axes[0].size)

    @property
    def nbytes(self) -> int:
        return self.count * self.dims * self.precision.itemsize

    @classmethod
    def from_axes(cls, axes, precision: Precision | None = None) -> "Dataset":
        arrays = [np.asarray(a) for a in axes]
        if not arrays:
            raise DomainError("a dataset needs at least one axis")
        if precision is None:
            precision = Precision.from_dtype(arrays[0].dtype)
        return cls(axes=tuple(arrays), precision=precision)


@dataclass(frozen=True)
class CompressConfig:
    """Compression parameters.

    block_size mirrors the 32-lane x 32-points layout of the reference
    pipeline, hence must be a positive multiple of 32.
    """

    error_bound: float
    eb_mode: EbMode = EbMode.RANGE_RELATIVE
    block_size: int = 1024
    target_segs_per_axis: int = 32
    preserve_order: bool = False

    def __post_init__(self) -> None:
        if not (self.error_bound > 0 and np.isfinite(self.error_bound)):
            raise DomainError(f"error_bound must be a positive finite real, got {self.error_bound}")
        if self.block_size <= 0 or self.block_size % 32 != 0:
            raise DomainError(f"block_size must be a positive multiple of 32, got {self.block_size}")
        t = self.target_segs_per_axis
        if t < 1 or t & (t - 1):
            raise DomainError(f"target_segs_per_axis must be a power of two >= 1, got {t}")


@dataclass(frozen=True)
class BlockGeometry:
    """Per-axis segment geometry of one block.

    For each axis a: the occupied interval [mins[a], maxs[a]], the number
    of quantization bins Q_a = bin_counts[a], the power-of-two segment
    size m_a = seg_sizes[a] covering offset_bits[a] = log2(m_a) bits, and
    the segment count N_a = seg_counts[a] = ceil(Q_a / m_a).
    """

    mins: tuple[float, ...]
    maxs: tuple[float, ...]
    bin_counts: tuple[int, ...]
    seg_sizes: tuple[int, ...]
    seg_counts: tuple[int, ...]

    @property
    def dims(self) -> int:
        return len(self.mins)

    @property
    def offset_bits(self) -> tuple[int, ...]:
        return tuple(m.bit_length() - 1 for m in self.seg_sizes)

    @property
    def total_segments(self) -> int:
        out = 1
        for n in self.seg_counts:
            out *= n
        return out

    @property
    def total_offsets(self) -> int:
        out = 1
        for m in self.seg_sizes:
            out *= m
        return out


@dataclass(frozen=True)
class QuantizedBlock:
    """Linearized (segment id, offset) pairs for the particles of one block.

    After the sort stage seg_ids is nondecreasing.  ranks carries the
    original intra-block index of each pair when order preservation is on.
    """

    geometry: BlockGeometry
    seg_ids: np.ndarray
    offsets: np.ndarray
    ranks: np.ndarray | None = None

    @property
    def count(self) -> int:
        return int(self.seg_ids.size)


def resolve_absolute_bound(ds: Dataset, cfg: CompressConfig) -> float:
    """Turn the configured bound into an absolute per-coordinate bound.

    Absolute mode passes the bound through.  Range-relative mode scales it
    by the joint value range over all axes (a single scalar bound for the
    whole position field); a degenerate range counts as 1.
    """
    if cfg.eb_mode is EbMode.ABSOLUTE:
        return float(cfg.error_bound)
    if ds.count == 0:
        raise DomainError("range-relative bound is undefined for an empty dataset")
    lo = min(float(a.min()) for a in ds.axes)
    hi = max(float(a.max()) for a in ds.axes)
    span = hi - lo
    if span <= 0.0:
        span = 1.0
    return float(cfg.error_bound) * span
