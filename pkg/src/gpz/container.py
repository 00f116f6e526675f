"""Stage 4: block payload serialization and the contiguous container format.

Every multi-byte integer is little-endian.  The file layout is:

    FILE   := GLOBAL OFFSETS PAYLOADS
    GLOBAL := magic "GPZ1" | version u16 | dims u8 | precision u8
              | flags u8 (bit 0: preserve_order) | eb_mode u8
              | eb f64 (as configured) | eb_abs f64 (resolved)
              | block_size u32 | particle_count u64 | block_count u64
    OFFSETS := (block_count + 1) x u64, prefix sums of payload sizes,
               offsets[0] == 0, offsets[-1] == len(PAYLOADS)
    PAYLOADS := concatenation of per-block payloads in block order

    BLOCK  := particle_count u32 | unique_count u32
              | per axis: min prec | max prec | log2(m) u8 | N u32
              | w_delta u8 | w_count u8 | w_offset u8 | [w_rank u8]
              | delta bits | count bits | offset bits | [rank bits]

The per-axis minima and maxima ride in each block header; everything
else a decoder needs (bin widths, stream lengths) derives from them.
Stream byte lengths are implied: ceil(values * width / 8) with the value
counts taken from the header, so a parsed block must consume its payload
exactly.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass

import numpy as np

from .codec import PackedStream
from .errors import CorruptData
from .model import EbMode, Precision

__all__ = [
    "MAGIC",
    "VERSION",
    "GLOBAL_HEADER_SIZE",
    "BlockHeader",
    "GlobalHeader",
    "BlockStreams",
    "serialize_block",
    "parse_block",
    "compact",
    "write_container",
    "read_container",
    "container_to_bytes",
    "ParsedContainer",
]

MAGIC = b"GPZ1"
VERSION = 1

_GLOBAL_FMT = "<4sHBBBBddIQQ"
GLOBAL_HEADER_SIZE = struct.calcsize(_GLOBAL_FMT)
_GLOBAL_SIZE = GLOBAL_HEADER_SIZE


@dataclass(frozen=True)
class BlockHeader:
    particle_count: int
    unique_count: int
    mins: tuple[float, ...]
    maxs: tuple[float, ...]
    offset_bits: tuple[int, ...]  # log2(m) per axis
    seg_counts: tuple[int, ...]  # N per axis
    w_delta: int
    w_count: int
    w_offset: int
    w_rank: int | None = None  # present only when order is preserved


@dataclass(frozen=True)
class BlockStreams:
    deltas: PackedStream
    counts: PackedStream
    offsets: PackedStream
    ranks: PackedStream | None = None


@dataclass(frozen=True)
class GlobalHeader:
    dims: int
    precision: Precision
    eb_mode: EbMode
    eb: float
    eb_abs: float
    block_size: int
    particle_count: int
    block_count: int
    preserve_order: bool
    version: int = VERSION


def _axis_fmt(precision: Precision) -> str:
    return "ffBI" if precision is Precision.F32 else "ddBI"


def _header_fmt(dims: int, precision: Precision, preserve_order: bool) -> str:
    widths = "BBBB" if preserve_order else "BBB"
    return "<II" + _axis_fmt(precision) * dims + widths


def serialize_block(header: BlockHeader, streams: BlockStreams, precision: Precision) -> bytes:
    dims = len(header.mins)
    preserve = header.w_rank is not None
    fields: list = [header.particle_count, header.unique_count]
    for a in range(dims):
        fields += [header.mins[a], header.maxs[a], header.offset_bits[a], header.seg_counts[a]]
    fields += [header.w_delta, header.w_count, header.w_offset]
    if preserve:
        fields.append(header.w_rank)
    out = struct.pack(_header_fmt(dims, precision, preserve), *fields)
    out += streams.deltas.bits + streams.counts.bits + streams.offsets.bits
    if preserve:
        assert streams.ranks is not None
        out += streams.ranks.bits
    return out


def _stream_bytes(count: int, width: int) -> int:
    return (count * width + 7) // 8


def parse_block(
    data: bytes, dims: int, precision: Precision, preserve_order: bool
) -> tuple[BlockHeader, BlockStreams]:
    fmt = _header_fmt(dims, precision, preserve_order)
    head_size = struct.calcsize(fmt)
    if len(data) < head_size:
        raise CorruptData(f"block payload of {len(data)} bytes, header needs {head_size}")
    fields = struct.unpack_from(fmt, data)
    particle_count, unique_count = fields[0], fields[1]
    mins, maxs, offset_bits, seg_counts = [], [], [], []
    pos = 2
    for _ in range(dims):
        lo, hi, log2m, n = fields[pos : pos + 4]
        mins.append(float(lo))
        maxs.append(float(hi))
        offset_bits.append(int(log2m))
        seg_counts.append(int(n))
        pos += 4
    widths = [int(w) for w in fields[pos:]]
    w_delta, w_count, w_offset = widths[:3]
    w_rank = widths[3] if preserve_order else None

    if unique_count > particle_count:
        raise CorruptData(f"{unique_count} unique ids for {particle_count} particles")
    for w in widths:
        if w > 64:
            raise CorruptData(f"stream width {w} exceeds 64 bits")
    for a in range(dims):
        if seg_counts[a] < 1 and particle_count > 0:
            raise CorruptData(f"axis {a} has no segments")
        if offset_bits[a] > 63:
            raise CorruptData(f"axis {a} offset width {offset_bits[a]} exceeds 63 bits")
        if not (np.isfinite(mins[a]) and np.isfinite(maxs[a]) and mins[a] <= maxs[a]):
            raise CorruptData(f"axis {a} bounds [{mins[a]}, {maxs[a]}] are invalid")

    header = BlockHeader(
        particle_count=particle_count,
        unique_count=unique_count,
        mins=tuple(mins),
        maxs=tuple(maxs),
        offset_bits=tuple(offset_bits),
        seg_counts=tuple(seg_counts),
        w_delta=w_delta,
        w_count=w_count,
        w_offset=w_offset,
        w_rank=w_rank,
    )

    sizes = [
        (unique_count, w_delta),
        (unique_count, w_count),
        (particle_count, w_offset),
    ]
    if preserve_order:
        sizes.append((particle_count, w_rank))
    cursor = head_size
    chunks: list[PackedStream] = []
    for count, width in sizes:
        nbytes = _stream_bytes(count, width)
        chunk = data[cursor : cursor + nbytes]
        if len(chunk) != nbytes:
            raise CorruptData(f"block truncated at byte {cursor}")
        chunks.append(PackedStream(width, count, bytes(chunk)))
        cursor += nbytes
    if cursor != len(data):
        raise CorruptData(f"{len(data) - cursor} trailing bytes after block streams")
    streams = BlockStreams(
        deltas=chunks[0],
        counts=chunks[1],
        offsets=chunks[2],
        ranks=chunks[3] if preserve_order else None,
    )
    return header, streams


def compact(payloads: list[bytes]) -> tuple[np.ndarray, bytes]:
    """Offset table (prefix sums of sizes) plus the concatenated payloads."""
    sizes = np.fromiter((len(p) for p in payloads), dtype=np.uint64, count=len(payloads))
    offsets = np.zeros(len(payloads) + 1, dtype=np.uint64)
    np.cumsum(sizes, out=offsets[1:])
    return offsets, b"".join(payloads)


def write_container(header: GlobalHeader, offsets: np.ndarray, payload: bytes, sink) -> None:
    flags = 1 if header.preserve_order else 0
    sink.write(
        struct.pack(
            _GLOBAL_FMT,
            MAGIC,
            header.version,
            header.dims,
            header.precision.value,
            flags,
            header.eb_mode.value,
            header.eb,
            header.eb_abs,
            header.block_size,
            header.particle_count,
            header.block_count,
        )
    )
    sink.write(np.ascontiguousarray(offsets, dtype="<u8").tobytes())
    sink.write(payload)


@dataclass(frozen=True)
class ParsedContainer:
    header: GlobalHeader
    offsets: np.ndarray
    payload: bytes

    def block_payload(self, index: int) -> bytes:
        lo = int(self.offsets[index])
        hi = int(self.offsets[index + 1])
        return self.payload[lo:hi]


def read_container(source) -> ParsedContainer:
    data = source.read()
    if len(data) < _GLOBAL_SIZE:
        raise CorruptData(f"container of {len(data)} bytes, global header needs {_GLOBAL_SIZE}")
    (
        magic,
        version,
        dims,
        precision_code,
        flags,
        eb_mode_code,
        eb,
        eb_abs,
        block_size,
        particle_count,
        block_count,
    ) = struct.unpack_from(_GLOBAL_FMT, data)
    if magic != MAGIC:
        raise CorruptData(f"bad magic {magic!r} at byte 0")
    if version != VERSION:
        raise CorruptData(f"unsupported container version {version}")
    if not 1 <= dims <= 3:
        raise CorruptData(f"dims {dims} outside 1..3")
    try:
        precision = Precision(precision_code)
        eb_mode = EbMode(eb_mode_code)
    except ValueError as exc:
        raise CorruptData(str(exc)) from None
    if not (np.isfinite(eb_abs) and eb_abs > 0):
        raise CorruptData(f"absolute bound {eb_abs} is not a positive real")
    if flags & ~1:
        raise CorruptData(f"unknown flag bits 0x{flags:02x}")

    table_end = _GLOBAL_SIZE + (block_count + 1) * 8
    if len(data) < table_end:
        raise CorruptData(f"container truncated inside the offset table at byte {len(data)}")
    offsets = np.frombuffer(data, dtype="<u8", count=block_count + 1, offset=_GLOBAL_SIZE)
    if offsets[0] != 0:
        raise CorruptData("offset table must start at 0")
    if np.any(offsets[1:] < offsets[:-1]):
        raise CorruptData("offset table is not nondecreasing")
    payload = data[table_end:]
    if int(offsets[-1]) != len(payload):
        raise CorruptData(
            f"offset table ends at {int(offsets[-1])} but payload holds {len(payload)} bytes"
        )
    header = GlobalHeader(
        dims=dims,
        precision=precision,
        eb_mode=eb_mode,
        eb=eb,
        eb_abs=eb_abs,
        block_size=block_size,
        particle_count=particle_count,
        block_count=block_count,
        preserve_order=bool(flags & 1),
        version=version,
    )
    return ParsedContainer(header=header, offsets=offsets, payload=payload)


def container_to_bytes(header: GlobalHeader, offsets: np.ndarray, payload: bytes) -> bytes:
    buf = io.BytesIO()
    write_container(header, offsets, payload, buf)
    return buf.getvalue()
