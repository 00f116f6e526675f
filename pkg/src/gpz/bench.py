"""Synthetic particle datasets and the end-to-end throughput harness.

Three generator kinds cover the storage-order locality patterns seen in
real dumps: uniform boxes (worst case for coding), Gaussian clusters
written cluster by cluster (the locality that makes run-length coding
effective), and jittered lattices (solid-material style grids).  A fixed
seed fixes the output exactly.

Timing is end to end: the clock wraps the whole compress or decompress
call, so every internal allocation is inside the measured window.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import metrics, pipeline
from .errors import DomainError
from .model import CompressConfig, Dataset, Precision, resolve_absolute_bound

__all__ = ["GenKind", "GenSpec", "generate", "run_bench", "BENCH_CSV_HEADER"]


class GenKind(Enum):
    UNIFORM_BOX = "uniform"
    GAUSSIAN_CLUSTERS = "clusters"
    JITTERED_LATTICE = "lattice"


@dataclass(frozen=True)
class GenSpec:
    kind: GenKind
    count: int
    dims: int = 3
    seed: int = 0
    precision: Precision = Precision.F32
    extent: float = 1.0  # box edge length, origin-anchored
    clusters: int = 32
    sigma: float = 0.01  # cluster std dev, same units as extent
    pitch: float = 0.05  # lattice spacing
    jitter: float = 0.01  # max lattice displacement per axis

    def __post_init__(self) -> None:
        if self.count <= 0:
            raise DomainError(f"count must be positive, got {self.count}")
        if not 1 <= self.dims <= 3:
            raise DomainError(f"dims must be 1, 2 or 3, got {self.dims}")


def _uniform_box(rng: np.random.Generator, spec: GenSpec) -> list[np.ndarray]:
    return [rng.uniform(0.0, spec.extent, spec.count) for _ in range(spec.dims)]


def _gaussian_clusters(rng: np.random.Generator, spec: GenSpec):
    """Cluster-contiguous points; also returns centers and assignments."""
    centers = rng.uniform(0.0, spec.extent, size=(spec.clusters, spec.dims))
    base, extra = divmod(spec.count, spec.clusters)
    sizes = np.full(spec.clusters, base, dtype=np.int64)
    sizes[:extra] += 1
    assignment = np.repeat(np.arange(spec.clusters), sizes)
    noise = rng.normal(0.0, spec.sigma, size=(spec.count, spec.dims))
    points = centers[assignment] + noise
    axes = [points[:, a] for a in range(spec.dims)]
    return axes, centers, assignment


def _jittered_lattice(rng: np.random.Generator, spec: GenSpec) -> list[np.ndarray]:
    side = max(1, round(spec.count ** (1.0 / spec.dims)))
    while side**spec.dims < spec.count:
        side += 1
    grids = np.meshgrid(*[np.arange(side, dtype=np.float64)] * spec.dims, indexing="ij")
    axes = []
    for g in grids:
        flat = g.reshape(-1)[: spec.count] * spec.pitch
        flat = flat + rng.uniform(-spec.jitter, spec.jitter, spec.count)
        axes.append(flat)
    return axes


def generate(spec: GenSpec) -> Dataset:
    rng = np.random.default_rng(spec.seed)
    if spec.kind is GenKind.UNIFORM_BOX:
        axes = _uniform_box(rng, spec)
    elif spec.kind is GenKind.GAUSSIAN_CLUSTERS:
        axes, _, _ = _gaussian_clusters(rng, spec)
    else:
        axes = _jittered_lattice(rng, spec)
    return Dataset(axes=tuple(axes), precision=spec.precision)


BENCH_CSV_HEADER = "kind,count,dims,seed,eb,cr,bitrate,psnr,comp_gbps,decomp_gbps"


@dataclass(frozen=True)
class BenchRow:
    spec: GenSpec
    eb: float
    cr: float
    bitrate: float
    psnr: float
    comp_gbps: float
    decomp_gbps: float

    def to_csv(self) -> str:
        psnr = "inf" if math.isinf(self.psnr) else f"{self.psnr:.4f}"
        return (
            f"{self.spec.kind.value},{self.spec.count},{self.spec.dims},{self.spec.seed},"
            f"{self.eb:g},{self.cr:.4f},{self.bitrate:.4f},{psnr},"
            f"{self.comp_gbps:.4f},{self.decomp_gbps:.4f}"
        )


def _timed(fn, repetitions: int):
    """Median wall-clock seconds over repetitions; result from the last run."""
    samples = []
    result = None
    for _ in range(repetitions):
        start = time.perf_counter()
        result = fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples), result


def run_bench(
    spec: GenSpec,
    eb_list,
    cfg: CompressConfig,
    repetitions: int = 3,
    workers: int = 1,
) -> list[BenchRow]:
    if repetitions < 1:
        raise DomainError("repetitions must be at least 1")
    ds = generate(spec)
    gb = ds.nbytes / 1e9
    rows = []
    for eb in eb_list:
        run_cfg = replace(cfg, error_bound=float(eb))
        comp_s, blob = _timed(lambda: pipeline.compress(ds, run_cfg, workers=workers), repetitions)
        decomp_s, rec = _timed(lambda: pipeline.decompress(blob, workers=workers), repetitions)
        eb_abs = resolve_absolute_bound(ds, run_cfg)
        row = metrics.evaluate(ds, rec, len(blob), float(eb), eb_abs, run_cfg)
        rows.append(
            BenchRow(
                spec=spec,
                eb=float(eb),
                cr=row.cr,
                bitrate=row.bitrate,
                psnr=row.psnr,
                comp_gbps=gb / comp_s if comp_s > 0 else float("inf"),
                decomp_gbps=gb / decomp_s if decomp_s > 0 else float("inf"),
            )
        )
    return rows


def bench_csv(rows: list[BenchRow]) -> str:
    return "\n".join([BENCH_CSV_HEADER, *(r.to_csv() for r in rows)]) + "\n"
