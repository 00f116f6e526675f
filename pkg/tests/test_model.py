import numpy as np
import pytest

from gpz.errors import DomainError
from gpz.model import (
    CompressConfig,
    Dataset,
    EbMode,
    Precision,
    resolve_absolute_bound,
)


def _ds(values, dt=np.float32):
    return Dataset.from_axes([np.asarray(v, dtype=dt) for v in values])


def test_relative_bound_scales_by_joint_range():
    ds = _ds([[0.0, 10.0, 4.0]])
    cfg = CompressConfig(error_bound=1e-2, eb_mode=EbMode.RANGE_RELATIVE)
    assert resolve_absolute_bound(ds, cfg) == pytest.approx(0.1)


def test_absolute_bound_is_identity():
    ds = _ds([[1.0, 2.0], [3.0, 4.0]])
    cfg = CompressConfig(error_bound=0.5, eb_mode=EbMode.ABSOLUTE)
    assert resolve_absolute_bound(ds, cfg) == 0.5


def test_degenerate_range_counts_as_one():
    ds = _ds([[3.0, 3.0, 3.0]])
    cfg = CompressConfig(error_bound=1e-3, eb_mode=EbMode.RANGE_RELATIVE)
    assert resolve_absolute_bound(ds, cfg) == pytest.approx(1e-3)


def test_relative_bound_uses_range_over_all_axes_jointly():
    ds = _ds([[0.0, 1.0], [5.0, 9.0]])
    cfg = CompressConfig(error_bound=0.1, eb_mode=EbMode.RANGE_RELATIVE)
    # joint range is max(9) - min(0)
    assert resolve_absolute_bound(ds, cfg) == pytest.approx(0.9)


def test_relative_bound_scale_covariant():
    rng = np.random.default_rng(5)
    base = rng.uniform(-3, 7, 100)
    cfg = CompressConfig(error_bound=1e-3, eb_mode=EbMode.RANGE_RELATIVE)
    eb0 = resolve_absolute_bound(_ds([base], np.float64), cfg)
    for s in (2.0, 0.5, 8.0):  # powers of two keep the scaling exact
        ebs = resolve_absolute_bound(_ds([base * s], np.float64), cfg)
        assert ebs == eb0 * s


def test_bound_strictly_positive_for_valid_configs():
    rng = np.random.default_rng(6)
    for seed in range(20):
        vals = rng.normal(0, 10, 50)
        for mode in EbMode:
            cfg = CompressConfig(error_bound=10.0 ** rng.uniform(-8, 2), eb_mode=mode)
            assert resolve_absolute_bound(_ds([vals], np.float64), cfg) > 0


def test_empty_dataset_relative_mode_rejected():
    ds = _ds([[]])
    cfg = CompressConfig(error_bound=1e-2, eb_mode=EbMode.RANGE_RELATIVE)
    with pytest.raises(DomainError):
        resolve_absolute_bound(ds, cfg)


def test_dataset_rejects_non_finite_coordinates():
    with pytest.raises(DomainError):
        _ds([[1.0, np.nan]])
    with pytest.raises(DomainError):
        _ds([[np.inf, 0.0]])


def test_dataset_rejects_mismatched_axis_lengths():
    with pytest.raises(DomainError):
        Dataset.from_axes([np.zeros(3, np.float32), np.zeros(4, np.float32)])


def test_dataset_rejects_bad_dims():
    with pytest.raises(DomainError):
        Dataset.from_axes([np.zeros(2, np.float32)] * 4)
    with pytest.raises(DomainError):
        Dataset(axes=(), precision=Precision.F32)


def test_config_validation():
    with pytest.raises(DomainError):
        CompressConfig(error_bound=0.0)
    with pytest.raises(DomainError):
        CompressConfig(error_bound=-1e-3)
    with pytest.raises(DomainError):
        CompressConfig(error_bound=1e-3, block_size=100)  # not a multiple of 32
    with pytest.raises(DomainError):
        CompressConfig(error_bound=1e-3, block_size=0)
    with pytest.raises(DomainError):
        CompressConfig(error_bound=1e-3, target_segs_per_axis=24)  # not a power of two


def test_precision_round_trip():
    assert Precision.from_dtype(np.float32) is Precision.F32
    assert Precision.from_dtype(np.float64) is Precision.F64
    assert Precision.F32.itemsize == 4 and Precision.F64.itemsize == 8
    with pytest.raises(DomainError):
        Precision.from_dtype(np.int32)
