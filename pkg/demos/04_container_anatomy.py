"""Inside a .gpz container: global header, offset table, random access.

The offset table at the front makes any block reachable without touching
the others, so decompression parallelizes and partial reads are cheap.
"""

import io

import numpy as np

import gpz
from gpz import container

ds = gpz.generate(gpz.GenSpec(kind=gpz.GenKind.JITTERED_LATTICE, count=50_000,
                              dims=3, seed=3, pitch=0.05, jitter=0.005))
cfg = gpz.CompressConfig(error_bound=1e-3)
blob = gpz.compress(ds, cfg)

parsed = container.read_container(io.BytesIO(blob))
gh = parsed.header
print(f"magic GPZ1 v{gh.version}: {gh.dims}D {gh.precision.name}, "
      f"{gh.particle_count} particles in {gh.block_count} blocks of {gh.block_size}")
print(f"bound: {gh.eb:g} ({gh.eb_mode.name}) -> {gh.eb_abs:.6e} absolute")

sizes = np.diff(parsed.offsets)
print(f"\noffset table: {parsed.offsets[:5].tolist()} ... {parsed.offsets[-1]}")
print(f"block payload bytes: min {sizes.min()}, median {int(np.median(sizes))}, "
      f"max {sizes.max()}")

# Random access: decode only block 17 and inspect its header.
payload = parsed.block_payload(17)
bh, streams = container.parse_block(payload, gh.dims, gh.precision, gh.preserve_order)
print(f"\nblock 17: {bh.particle_count} particles, {bh.unique_count} unique segment ids")
for a in range(gh.dims):
    print(f"  axis {a}: [{bh.mins[a]:.5f}, {bh.maxs[a]:.5f}], "
          f"2^{bh.offset_bits[a]} bins/segment x {bh.seg_counts[a]} segments")
print(f"  stream widths: delta {bh.w_delta}, count {bh.w_count}, offset {bh.w_offset} bits")

# The streaming iterator decodes block by block without a full dataset.
total = 0
for axes in gpz.iter_decompressed_blocks(blob):
    total += axes[0].size
print(f"\nstreamed {total} particles block by block")
