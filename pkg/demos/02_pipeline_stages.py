"""The four stages on one tiny block, every intermediate value printed.

Stage 1 quantizes coordinates to (segment id, offset) pairs, stage 2
sorts the pairs by segment id, stage 3 run-length + delta + bit-packs
the streams, stage 4 compacts per-block payloads behind an offset table.
"""

import numpy as np

from gpz import blocksort, codec, container, quantizer
from gpz.model import Precision

eb = 0.5
x = np.array([3.7, 0.2, 7.9, 3.4, 5.1, 0.6])
print(f"input axis: {x.tolist()} with absolute bound {eb}")

# Stage 1: bounds, geometry, quantization -------------------------------
mins, maxs = quantizer.block_bounds([x])
geom = quantizer.derive_geometry(mins, maxs, eb, target_segs_per_axis=4,
                                 precision=Precision.F64)
print(f"\nstage 1: bounds [{mins[0]}, {maxs[0]}]")
print(f"  {geom.bin_counts[0]} bins of width {2 * eb}, "
      f"segment size {geom.seg_sizes[0]} -> {geom.seg_counts[0]} segments")

qb = quantizer.quantize_block([x], geom, eb)
pairs = list(zip(qb.seg_ids.tolist(), qb.offsets.tolist()))
print(f"  (seg_id, offset) pairs: {pairs}")

# Stage 2: per-block sort by segment id ---------------------------------
qb = blocksort.sort_block(qb)
pairs = list(zip(qb.seg_ids.tolist(), qb.offsets.tolist()))
print(f"\nstage 2: sorted pairs:   {pairs}")

# Stage 3: run-length, delta, fixed-width packing -----------------------
rle = codec.rle_encode(qb.seg_ids)
print(f"\nstage 3: unique ids {rle.unique_ids.tolist()} x counts {rle.counts.tolist()}")
deltas = codec.delta_encode(rle.unique_ids)
print(f"  id deltas (first raw): {deltas.tolist()}")
for name, values in (("deltas", deltas), ("counts", rle.counts), ("offsets", qb.offsets)):
    w = codec.width_for(np.asarray(values, dtype=np.uint64))
    stream = codec.pack_fixed(np.asarray(values, dtype=np.uint64), w)
    print(f"  {name}: width {w} bits -> bytes {[f'{b:08b}' for b in stream.bits]}")

# Stage 4: serialize and compact ----------------------------------------
streams = container.BlockStreams(
    deltas=codec.pack_fixed(deltas, codec.width_for(deltas)),
    counts=codec.pack_fixed(np.asarray(rle.counts, np.uint64), codec.width_for(rle.counts)),
    offsets=codec.pack_fixed(qb.offsets, codec.width_for(qb.offsets)),
)
header = container.BlockHeader(
    particle_count=qb.count,
    unique_count=int(rle.unique_ids.size),
    mins=geom.mins, maxs=geom.maxs,
    offset_bits=geom.offset_bits, seg_counts=geom.seg_counts,
    w_delta=streams.deltas.width, w_count=streams.counts.width,
    w_offset=streams.offsets.width,
)
payload = container.serialize_block(header, streams, Precision.F64)
offsets, blob = container.compact([payload])
print(f"\nstage 4: payload {len(payload)} bytes, offset table {offsets.tolist()}")

# And back: decode the payload, reconstruct midpoints -------------------
header2, streams2 = container.parse_block(payload, 1, Precision.F64, False)
ids = codec.rle_decode(codec.RleResult(codec.delta_decode(codec.unpack_fixed(streams2.deltas)),
                                       codec.unpack_fixed(streams2.counts)))
from gpz.model import QuantizedBlock

back = QuantizedBlock(geometry=geom, seg_ids=ids,
                      offsets=codec.unpack_fixed(streams2.offsets))
(rec,) = quantizer.dequantize_block(back, eb, Precision.F64)
print(f"reconstruction: {[round(v, 6) for v in rec.tolist()]}")
print(f"original sorted: {sorted(x.tolist())}")
print(f"max |error| = {np.abs(rec - np.sort(x)).max():.6f} <= {eb}")
