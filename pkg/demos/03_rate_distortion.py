"""Rate-distortion sweep: the CSV table behind ratio-versus-quality plots.

Tighter bounds cost bits and buy fidelity; the table prints one row per
bound with compression ratio, bitrate, per-axis NRMSE, and aggregate
PSNR, plus the verified maximum reconstruction error.
"""

import gpz
from gpz.metrics import CSV_HEADER

ds = gpz.generate(gpz.GenSpec(
    kind=gpz.GenKind.GAUSSIAN_CLUSTERS,
    count=300_000,
    dims=3,
    seed=11,
    clusters=32,
    sigma=0.01,
))

print(CSV_HEADER)
for eb in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5):
    cfg = gpz.CompressConfig(error_bound=eb)
    blob = gpz.compress(ds, cfg)
    rec = gpz.decompress(blob)
    eb_abs = gpz.resolve_absolute_bound(ds, cfg)
    row = gpz.evaluate(ds, rec, len(blob), eb, eb_abs, cfg)
    print(row.to_csv())
