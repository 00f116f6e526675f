"""End-to-end orchestration: quantize, sort, encode, compact, and back.

The dataset splits into fixed-size blocks by storage order; every block
runs stages 1-3 independently, then a single prefix-sum barrier places
the variable-length payloads in the contiguous output.  Decompression is
the reverse without the sort.  Output bytes are identical for any worker
count because each block's payload depends only on its own slice.
"""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from typing import Iterator

import numpy as np

from . import blocksort, codec, container, quantizer
from .errors import CorruptData, DomainError, GpzError, WidthOverflow
from .model import (
    BlockGeometry,
    CompressConfig,
    Dataset,
    Precision,
    QuantizedBlock,
    resolve_absolute_bound,
)

__all__ = ["compress", "decompress", "iter_block_slices", "iter_decompressed_blocks"]


def iter_block_slices(count: int, block_size: int) -> Iterator[slice]:
    """Storage-order block boundaries; the last block may be partial."""
    for start in range(0, count, block_size):
        yield slice(start, min(start + block_size, count))


def _encode_block(
    block_axes: list[np.ndarray], eb_abs: float, cfg: CompressConfig, precision: Precision
) -> bytes:
    mins, maxs = quantizer.block_bounds(block_axes)
    geom = quantizer.derive_geometry(mins, maxs, eb_abs, cfg.target_segs_per_axis, precision)
    qb = quantizer.quantize_block(block_axes, geom, eb_abs, cfg.preserve_order)
    qb = blocksort.sort_block(qb)

    rle = codec.rle_encode(qb.seg_ids)
    deltas = codec.delta_encode(rle.unique_ids)
    streams = container.BlockStreams(
        deltas=codec.pack_fixed(deltas, codec.width_for(deltas)),
        counts=codec.pack_fixed(rle.counts, codec.width_for(rle.counts)),
        offsets=codec.pack_fixed(qb.offsets, codec.width_for(qb.offsets)),
        ranks=(
            codec.pack_fixed(qb.ranks, codec.width_for(qb.ranks))
            if cfg.preserve_order
            else None
        ),
    )
    header = container.BlockHeader(
        particle_count=qb.count,
        unique_count=int(rle.unique_ids.size),
        mins=geom.mins,
        maxs=geom.maxs,
        offset_bits=geom.offset_bits,
        seg_counts=geom.seg_counts,
        w_delta=streams.deltas.width,
        w_count=streams.counts.width,
        w_offset=streams.offsets.width,
        w_rank=streams.ranks.width if streams.ranks is not None else None,
    )
    return container.serialize_block(header, streams, precision)


def compress(ds: Dataset, cfg: CompressConfig, workers: int = 1) -> bytes:
    """Compress a dataset into container bytes, deterministically."""
    eb_abs = resolve_absolute_bound(ds, cfg) if ds.count else float(cfg.error_bound)
    slices = list(iter_block_slices(ds.count, cfg.block_size))

    def encode(index_slice) -> bytes:
        index, sl = index_slice
        try:
            return _encode_block([a[sl] for a in ds.axes], eb_abs, cfg, ds.precision)
        except (DomainError, WidthOverflow) as exc:
            raise type(exc)(f"block {index}: {exc}") from None

    if workers > 1 and len(slices) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            payloads = list(pool.map(encode, enumerate(slices)))
    else:
        payloads = [encode(item) for item in enumerate(slices)]

    offsets, blob = container.compact(payloads)
    header = container.GlobalHeader(
        dims=ds.dims,
        precision=ds.precision,
        eb_mode=cfg.eb_mode,
        eb=float(cfg.error_bound),
        eb_abs=eb_abs,
        block_size=cfg.block_size,
        particle_count=ds.count,
        block_count=len(payloads),
        preserve_order=cfg.preserve_order,
    )
    return container.container_to_bytes(header, offsets, blob)


def _decode_block(
    payload: bytes, gh: container.GlobalHeader
) -> list[np.ndarray]:
    header, streams = container.parse_block(
        payload, gh.dims, gh.precision, gh.preserve_order
    )
    deltas = codec.unpack_fixed(streams.deltas)
    counts = codec.unpack_fixed(streams.counts)
    offsets = codec.unpack_fixed(streams.offsets)
    unique_ids = codec.delta_decode(deltas)
    if unique_ids.size and np.any(unique_ids[1:] <= unique_ids[:-1]):
        raise CorruptData("decoded unique ids are not strictly increasing")
    if counts.size and int(counts.min()) < 1:
        raise CorruptData("decoded run length of zero")
    if int(counts.sum()) != header.particle_count:
        raise CorruptData(
            f"run lengths cover {int(counts.sum())} particles, header says {header.particle_count}"
        )
    seg_ids = codec.rle_decode(codec.RleResult(unique_ids, counts))

    # Stored segment counts must reproduce from the stored bounds: this
    # catches bit flips in N, log2(m), and any significant bit of the
    # bounds or of the absolute bound itself.
    seg_sizes = tuple(1 << b for b in header.offset_bits)
    bin_counts = []
    for a in range(gh.dims):
        q = quantizer.axis_bin_count(header.mins[a], header.maxs[a], gh.eb_abs, gh.precision)
        if header.particle_count and -(-q // seg_sizes[a]) != header.seg_counts[a]:
            raise CorruptData(
                f"axis {a}: {header.seg_counts[a]} segments inconsistent with "
                f"{q} bins of size {seg_sizes[a]}"
            )
        bin_counts.append(q)
    geom = BlockGeometry(
        mins=header.mins,
        maxs=header.maxs,
        bin_counts=tuple(bin_counts),
        seg_sizes=seg_sizes,
        seg_counts=header.seg_counts,
    )
    qb = QuantizedBlock(geometry=geom, seg_ids=seg_ids, offsets=offsets, ranks=None)
    axes = quantizer.dequantize_block(qb, gh.eb_abs, gh.precision)

    if gh.preserve_order:
        ranks = codec.unpack_fixed(streams.ranks)
        order = np.empty(header.particle_count, dtype=np.int64)
        if ranks.size and (int(ranks.max()) >= header.particle_count
                           or np.bincount(ranks.astype(np.int64)).max(initial=0) > 1):
            raise CorruptData("rank stream is not a permutation")
        order[ranks.astype(np.int64)] = np.arange(header.particle_count)
        axes = [a[order] for a in axes]
    return axes


def decompress(data: bytes, workers: int = 1) -> Dataset:
    """Reconstruct a dataset from container bytes.

    Particles come back in sorted intra-block order unless the container
    preserves order; block boundaries always match the original.
    """
    parsed = container.read_container(io.BytesIO(data))
    gh = parsed.header

    def decode(index: int) -> list[np.ndarray]:
        try:
            axes = _decode_block(parsed.block_payload(index), gh)
            # block boundaries are fixed by storage order: every block is
            # full except possibly the last
            if index + 1 < gh.block_count:
                expected = gh.block_size
            else:
                expected = gh.particle_count - gh.block_size * (gh.block_count - 1)
            if axes[0].size != expected:
                raise CorruptData(
                    f"{axes[0].size} particles where the boundary math needs {expected}"
                )
            return axes
        except GpzError as exc:
            raise CorruptData(f"block {index}: {exc}") from None

    indices = range(gh.block_count)
    if workers > 1 and gh.block_count > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(decode, indices))
    else:
        blocks = [decode(i) for i in indices]

    dtype = gh.precision.dtype
    axes = []
    for a in range(gh.dims):
        if blocks:
            axes.append(np.concatenate([b[a] for b in blocks]))
        else:
            axes.append(np.empty(0, dtype=dtype))
    ds = Dataset(axes=tuple(axes), precision=gh.precision)
    if ds.count != gh.particle_count:
        raise CorruptData(
            f"blocks decode to {ds.count} particles, header says {gh.particle_count}"
        )
    return ds


def iter_decompressed_blocks(data: bytes) -> Iterator[list[np.ndarray]]:
    """Stream per-block reconstructed axes without materializing the dataset."""
    parsed = container.read_container(io.BytesIO(data))
    for index in range(parsed.header.block_count):
        try:
            yield _decode_block(parsed.block_payload(index), parsed.header)
        except GpzError as exc:
            raise CorruptData(f"block {index}: {exc}") from None
