"""Stage 3: lossless integer coding and its exact inverses.

Three codecs chained over the sorted pairs of a block:

* run-length coding of the sorted segment ids into unique ids + counts,
  built data-parallel: per-element transition flags, a prefix sum over
  the flags as the pointer array, then an independent scatter of each
  flagged id into its output slot;
* delta coding of the (strictly increasing) unique ids, first id raw;
* fixed-width bit packing of every integer stream, removing the shared
  leading-zero bits.

Bit layout of a packed stream (normative for the container format):
each value occupies exactly `width` bits, values are consecutive with no
padding between them, bits fill each byte LSB-first, and the stream is
zero-padded to a byte boundary, so len(bits) == ceil(count * width / 8).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CorruptData, DomainError

__all__ = [
    "RleResult",
    "PackedStream",
    "rle_encode",
    "rle_decode",
    "delta_encode",
    "delta_decode",
    "width_for",
    "pack_fixed",
    "unpack_fixed",
]


@dataclass(frozen=True)
class RleResult:
    unique_ids: np.ndarray  # strictly increasing
    counts: np.ndarray  # run lengths >= 1, same length


@dataclass(frozen=True)
class PackedStream:
    width: int  # bits per value, 0..64
    count: int  # number of packed values
    bits: bytes  # ceil(count * width / 8) bytes


def rle_encode(sorted_ids: np.ndarray) -> RleResult:
    """Run-length factorization of a nondecreasing id sequence.

    Transition flags mark the first element of each run, their prefix sum
    yields the output slot of every run, and the flagged ids scatter into
    those slots in parallel.
    """
    ids = np.asarray(sorted_ids)
    n = ids.size
    if n == 0:
        return RleResult(ids[:0].copy(), np.empty(0, dtype=np.int64))
    if np.any(ids[1:] < ids[:-1]):
        raise DomainError("run-length input must be nondecreasing (sort stage defect)")

    flags = np.empty(n, dtype=bool)
    flags[0] = True
    np.not_equal(ids[1:], ids[:-1], out=flags[1:])
    pointers = np.cumsum(flags) - 1  # output slot per position
    run_count = int(pointers[-1]) + 1

    unique = np.empty(run_count, dtype=ids.dtype)
    starts = np.empty(run_count, dtype=np.int64)
    sel = np.flatnonzero(flags)
    unique[pointers[sel]] = ids[sel]
    starts[pointers[sel]] = sel
    counts = np.diff(starts, append=n)
    return RleResult(unique, counts)


def rle_decode(result: RleResult) -> np.ndarray:
    counts = np.asarray(result.counts)
    if counts.size == 0:
        return np.asarray(result.unique_ids)[:0].copy()
    if int(counts.min()) < 1:
        raise CorruptData("run length of zero")
    if int(counts.max()) >= 1 << 63:
        raise CorruptData("run length beyond any block size")
    return np.repeat(result.unique_ids, counts.astype(np.int64))


def delta_encode(unique_ids: np.ndarray) -> np.ndarray:
    """First id stored raw, then differences between adjacent ids."""
    ids = np.asarray(unique_ids)
    if ids.size and np.any(ids[1:] <= ids[:-1]):
        raise DomainError("delta input must be strictly increasing")
    out = ids.copy()
    out[1:] = ids[1:] - ids[:-1]
    return out


def delta_decode(deltas: np.ndarray) -> np.ndarray:
    return np.cumsum(np.asarray(deltas), dtype=np.uint64)


def width_for(values: np.ndarray) -> int:
    """Uniform bit width: 0 for empty/all-zero input, else bits of the max."""
    values = np.asarray(values)
    if values.size == 0:
        return 0
    return int(values.max()).bit_length()


def pack_fixed(values: np.ndarray, width: int) -> PackedStream:
    if not 0 <= width <= 64:
        raise DomainError(f"bit width must be in 0..64, got {width}")
    vals = np.ascontiguousarray(values, dtype=np.uint64)
    n = int(vals.size)
    if width == 0:
        if n and int(vals.max()) != 0:
            raise DomainError("nonzero value in a zero-width stream")
        return PackedStream(0, n, b"")
    if width < 64 and n and int(vals.max()) >> width:
        raise DomainError(f"value exceeds {width} bits")
    shifts = np.arange(width, dtype=np.uint64)
    bits = ((vals[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)
    packed = np.packbits(bits.ravel(), bitorder="little")
    return PackedStream(width, n, packed.tobytes())


def unpack_fixed(stream: PackedStream) -> np.ndarray:
    width, n = stream.width, stream.count
    if not 0 <= width <= 64:
        raise CorruptData(f"bit width must be in 0..64, got {width}")
    if width == 0 or n == 0:
        if len(stream.bits) != 0 and width == 0:
            raise CorruptData("zero-width stream carries payload bytes")
        if n == 0 and len(stream.bits) != 0:
            raise CorruptData("empty stream carries payload bytes")
        return np.zeros(n, dtype=np.uint64)
    expected = (n * width + 7) // 8
    if len(stream.bits) != expected:
        raise CorruptData(f"packed stream is {len(stream.bits)} bytes, expected {expected}")
    raw = np.frombuffer(stream.bits, dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")
    if bits[n * width:].any():
        raise CorruptData("nonzero padding bits in packed stream")
    bits = bits[: n * width].reshape(n, width).astype(np.uint64)
    shifts = np.arange(width, dtype=np.uint64)
    return (bits << shifts).sum(axis=1, dtype=np.uint64)
