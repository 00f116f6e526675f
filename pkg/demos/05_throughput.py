"""End-to-end throughput: the benchmark harness and its CSV report.

Timing wraps the whole compress/decompress calls, internal allocations
included, and reports the median over repetitions.  Ratios come from the
same run, so the CSV is self-consistent.
"""

import gpz
from gpz.bench import bench_csv, run_bench

spec = gpz.GenSpec(
    kind=gpz.GenKind.GAUSSIAN_CLUSTERS,
    count=1_000_000,
    dims=3,
    seed=42,
    clusters=32,
    sigma=0.01,
)
cfg = gpz.CompressConfig(error_bound=1e-3)

rows = run_bench(spec, eb_list=[1e-2, 1e-3, 1e-4], cfg=cfg, repetitions=3)
print(bench_csv(rows), end="")

best = max(rows, key=lambda r: r.comp_gbps)
print(f"\npeak here: {best.comp_gbps:.2f} GB/s compress, "
      f"{best.decomp_gbps:.2f} GB/s decompress at eb {best.eb:g} (single worker)")
