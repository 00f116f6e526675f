import math
from decimal import Decimal, getcontext

import numpy as np
import pytest

from gpz.errors import DomainError
from gpz.metrics import (
    aggregate_psnr,
    bitrate,
    compression_ratio,
    evaluate,
    nrmse,
    pair_blocks,
    verify_bound,
)
from gpz.model import CompressConfig, Dataset, EbMode, resolve_absolute_bound
from gpz.pipeline import compress, decompress


def nrmse_decimal_oracle(orig, rec, digits=50):
    """NRMSE recomputed in 50-digit decimal arithmetic."""
    getcontext().prec = digits
    total = Decimal(0)
    for a, b in zip(orig, rec):
        d = Decimal(float(a)) - Decimal(float(b))
        total += d * d
    mean = total / Decimal(len(orig))
    span = Decimal(float(max(orig))) - Decimal(float(min(orig)))
    return mean.sqrt() / span


def test_compression_ratio():
    assert compression_ratio(1200, 100) == pytest.approx(12.0)
    assert compression_ratio(100, 100) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        compression_ratio(10, 0)


def test_bitrate():
    assert bitrate(1000, 1000) == pytest.approx(8.0)
    with pytest.raises(DomainError):
        bitrate(10, 0)


def test_nrmse_identical_fields_zero():
    x = np.linspace(0, 1, 100)
    assert nrmse(x, x) == 0.0


def test_nrmse_constant_shift_closed_form():
    rng = np.random.default_rng(12)
    x = rng.uniform(0, 5, 1000)
    delta = 0.125
    span = float(x.max() - x.min())
    assert nrmse(x, x + delta) == pytest.approx(delta / span, rel=1e-12)


def test_nrmse_degenerate_range():
    x = np.full(10, 2.0)
    assert nrmse(x, x) == 0.0
    with pytest.raises(DomainError):
        nrmse(x, x + 1.0)


def test_nrmse_matches_extended_precision_oracle():
    rng = np.random.default_rng(13)
    for case in range(100):
        n = int(rng.integers(2, 200))
        orig = rng.uniform(-10, 10, n)
        rec = orig + rng.normal(0, 1e-3, n)
        got = nrmse(orig, rec)
        want = float(nrmse_decimal_oracle(orig.tolist(), rec.tolist()))
        assert got == pytest.approx(want, rel=1e-12), f"case {case}"


def test_nrmse_invariant_under_simultaneous_affine_rescale():
    rng = np.random.default_rng(14)
    orig = rng.uniform(0, 1, 500)
    rec = orig + rng.normal(0, 1e-2, 500)
    base = nrmse(orig, rec)
    for scale, shift in ((4.0, 0.0), (0.25, 3.0), (8.0, -1.5)):
        again = nrmse(scale * orig + shift, scale * rec + shift)
        assert again == pytest.approx(base, rel=1e-9)


def test_aggregate_psnr_formula_values():
    assert aggregate_psnr([0.01, 0.01]) == pytest.approx(40.0, abs=1e-9)
    assert aggregate_psnr([0.1]) == pytest.approx(20.0, abs=1e-9)
    assert aggregate_psnr([0.0, 0.0]) == math.inf
    with pytest.raises(DomainError):
        aggregate_psnr([])


def test_aggregate_psnr_strictly_decreasing_in_each_component():
    base = aggregate_psnr([0.01, 0.02, 0.005])
    assert aggregate_psnr([0.011, 0.02, 0.005]) < base
    assert aggregate_psnr([0.01, 0.021, 0.005]) < base
    assert aggregate_psnr([0.01, 0.02, 0.0051]) < base


def test_aggregate_psnr_matches_high_precision_evaluation():
    getcontext().prec = 50
    values = [0.037, 0.0021, 0.11]
    mean_sq = sum(Decimal(v) ** 2 for v in values) / Decimal(3)
    want = float(Decimal(-20) * mean_sq.sqrt().log10())
    assert aggregate_psnr(values) == pytest.approx(want, rel=1e-12)


def _round_trip(seed=20, count=8000, dims=3, eb=1e-3):
    rng = np.random.default_rng(seed)
    ds = Dataset.from_axes([rng.uniform(-2, 2, count).astype(np.float32) for _ in range(dims)])
    cfg = CompressConfig(error_bound=eb)
    blob = compress(ds, cfg)
    return ds, decompress(blob), cfg, resolve_absolute_bound(ds, cfg), blob


def test_verify_bound_zero_violations_through_pipeline():
    ds, rec, cfg, eb_abs, _ = _round_trip()
    report = verify_bound(ds, rec, eb_abs, cfg)
    assert report.ok and report.max_err <= eb_abs
    assert report.checked == ds.count * ds.dims


def test_verify_bound_identical_datasets_max_err_zero():
    ds, _, cfg, eb_abs, _ = _round_trip(seed=21, count=1000)
    report = verify_bound(ds, ds, eb_abs, cfg)
    assert report.max_err == 0.0 and report.ok


def test_verify_bound_flags_exactly_one_constructed_violation():
    ds, rec, cfg, eb_abs, _ = _round_trip(seed=22, count=2000, dims=1)
    axis = rec.axes[0].copy()
    # push the largest value of the first block out by 3 eb: it stays the
    # block's sort maximum, so the pairing cannot shift around it
    j = int(np.argmax(axis[: cfg.block_size]))
    axis[j] += np.float32(3.0 * eb_abs)
    bad = Dataset.from_axes([axis])
    report = verify_bound(ds, bad, eb_abs, cfg)
    assert len(report.violations) == 1
    ax, idx, err = report.violations[0]
    assert ax == 0
    assert err > eb_abs
    assert report.max_err == pytest.approx(err)


def test_pair_blocks_is_positional_within_sorted_codes():
    ds, rec, cfg, eb_abs, _ = _round_trip(seed=23, count=3000, dims=2)
    oi, ri = pair_blocks(ds, rec, cfg, eb_abs)
    assert sorted(oi.tolist()) == list(range(ds.count))
    assert sorted(ri.tolist()) == list(range(ds.count))
    for a in range(2):
        d = np.abs(ds.axes[a].astype(np.float64)[oi] - rec.axes[a].astype(np.float64)[ri])
        assert float(d.max()) <= eb_abs


def test_pair_blocks_shape_mismatch_rejected():
    ds, _, cfg, _, _ = _round_trip(seed=24, count=500, dims=1)
    other = Dataset.from_axes([np.zeros(499, np.float32)])
    with pytest.raises(DomainError):
        pair_blocks(ds, other, cfg)


def test_evaluate_produces_consistent_row():
    ds, rec, cfg, eb_abs, blob = _round_trip(seed=25)
    row = evaluate(ds, rec, len(blob), cfg.error_bound, eb_abs, cfg)
    assert row.cr == pytest.approx(ds.nbytes / len(blob))
    assert row.bitrate == pytest.approx(8.0 * len(blob) / ds.count)
    assert len(row.nrmse_per_axis) == ds.dims
    assert row.max_err <= eb_abs
    assert math.isfinite(row.psnr)
    csv = row.to_csv()
    assert csv.count(",") == 6
    header_cols = "eb,eb_abs,cr,bitrate,nrmse,psnr,max_err".split(",")
    assert len(csv.split(",")) == len(header_cols)
