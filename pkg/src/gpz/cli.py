"""Command-line front end over raw little-endian binary particle files.

Subcommands: compress, decompress, verify, stats, gen, bench.
Exit codes: 0 success, 1 verification violations, 2 bad arguments,
3 I/O failure, 4 domain or data error (message names the block).
"""

from __future__ import annotations

import argparse
import io
import sys
import time

import numpy as np

from . import bench, container, metrics, pipeline
from .errors import CorruptData, DomainError, WidthOverflow
from .model import CompressConfig, Dataset, EbMode, Precision, resolve_absolute_bound

_AXIS_NAMES = ("x", "y", "z")


def _precision(name: str) -> Precision:
    return Precision.F32 if name == "f32" else Precision.F64


def _read_axes(paths: list[str], interleaved: bool, dims: int, precision: Precision) -> Dataset:
    dtype = np.dtype("<f4") if precision is Precision.F32 else np.dtype("<f8")
    if interleaved:
        if len(paths) != 1:
            raise DomainError("interleaved input takes exactly one file")
        flat = np.fromfile(paths[0], dtype=dtype)
        if flat.size % dims:
            raise DomainError(f"{flat.size} values do not interleave into {dims} axes")
        grid = flat.reshape(-1, dims)
        axes = tuple(np.ascontiguousarray(grid[:, a]) for a in range(dims))
    else:
        if len(paths) != dims:
            raise DomainError(f"expected {dims} axis files, got {len(paths)}")
        axes = tuple(np.fromfile(p, dtype=dtype) for p in paths)
    return Dataset(axes=axes, precision=precision)


def _config(args) -> CompressConfig:
    return CompressConfig(
        error_bound=args.eb,
        eb_mode=EbMode.ABSOLUTE if args.eb_mode == "abs" else EbMode.RANGE_RELATIVE,
        block_size=args.block_size,
        target_segs_per_axis=args.segs_per_axis,
        preserve_order=args.preserve_order,
    )


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", nargs="+", required=True, metavar="FILE",
                   help="one raw binary file per axis, or a single interleaved file")
    p.add_argument("--interleaved", action="store_true",
                   help="treat the single input file as interleaved xyzxyz...")
    p.add_argument("--precision", choices=("f32", "f64"), default="f32")
    p.add_argument("--dims", type=int, choices=(1, 2, 3), default=3)


def _add_bound_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eb", type=float, required=True, help="error bound")
    p.add_argument("--eb-mode", choices=("abs", "rel"), default="rel",
                   help="absolute, or relative to the joint value range (default)")
    p.add_argument("--block-size", type=int, default=1024)
    p.add_argument("--segs-per-axis", type=int, default=32)
    p.add_argument("--preserve-order", action="store_true",
                   help="spend extra bits to restore intra-block particle order")


def cmd_compress(args) -> int:
    try:
        cfg = _config(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    ds = _read_axes(args.input, args.interleaved, args.dims, _precision(args.precision))
    start = time.perf_counter()
    blob = pipeline.compress(ds, cfg, workers=args.threads)
    elapsed = time.perf_counter() - start
    with open(args.output, "wb") as f:
        f.write(blob)
    if ds.count:
        cr = metrics.compression_ratio(ds.nbytes, len(blob))
        rate = metrics.bitrate(len(blob), ds.count)
        print(f"cr={cr:.4f} bitrate={rate:.4f} bits/particle time={elapsed:.3f}s",
              file=sys.stderr)
    else:
        print(f"empty dataset, wrote header-only container in {elapsed:.3f}s", file=sys.stderr)
    return 0


def cmd_decompress(args) -> int:
    with open(args.input, "rb") as f:
        blob = f.read()
    ds = pipeline.decompress(blob, workers=args.threads)
    for a in range(ds.dims):
        path = f"{args.output_prefix}.{_AXIS_NAMES[a]}"
        ds.axes[a].astype(ds.precision.dtype.newbyteorder("<")).tofile(path)
    print(f"wrote {ds.dims} axis file(s) of {ds.count} particles", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    with open(args.container, "rb") as f:
        blob = f.read()
    parsed = container.read_container(io.BytesIO(blob))
    gh = parsed.header
    original = _read_axes(args.input, args.interleaved, gh.dims, gh.precision)
    reconstructed = pipeline.decompress(blob, workers=args.threads)
    cfg = CompressConfig(
        error_bound=gh.eb,
        eb_mode=gh.eb_mode,
        block_size=gh.block_size,
        target_segs_per_axis=args.segs_per_axis,
        preserve_order=gh.preserve_order,
    )
    report = metrics.verify_bound(original, reconstructed, gh.eb_abs, cfg)
    pairing = metrics.pair_blocks(original, reconstructed, cfg, gh.eb_abs)
    per_axis = [
        metrics.nrmse(original.axes[a], reconstructed.axes[a], pairing)
        for a in range(original.dims)
    ]
    psnr = metrics.aggregate_psnr(per_axis)
    print(f"max_err={report.max_err:.6e} eb_abs={gh.eb_abs:.6e} "
          f"violations={len(report.violations)} psnr={psnr:.4f}")
    return 1 if report.violations else 0


def cmd_stats(args) -> int:
    with open(args.input, "rb") as f:
        parsed = container.read_container(f)
    gh = parsed.header
    sizes = np.diff(parsed.offsets).astype(np.int64)
    print(f"magic=GPZ1 version={gh.version} dims={gh.dims} precision={gh.precision.name}")
    print(f"eb={gh.eb:g} mode={gh.eb_mode.name} eb_abs={gh.eb_abs:.6e}")
    print(f"particles={gh.particle_count} blocks={gh.block_count} block_size={gh.block_size} "
          f"preserve_order={gh.preserve_order}")
    total = len(parsed.payload) + len(parsed.offsets) * 8 + container.GLOBAL_HEADER_SIZE
    if gh.particle_count:
        print(f"bits/particle={8 * total / gh.particle_count:.4f}")
    if sizes.size:
        print(f"block payload bytes: min={sizes.min()} median={int(np.median(sizes))} "
              f"max={sizes.max()}")
        edges = np.linspace(sizes.min(), sizes.max() + 1, num=9)
        hist, _ = np.histogram(sizes, bins=edges)
        for i, h in enumerate(hist):
            print(f"  [{edges[i]:8.0f}, {edges[i + 1]:8.0f}): {h}")
    return 0


def cmd_gen(args) -> int:
    spec = bench.GenSpec(
        kind=bench.GenKind(args.kind),
        count=args.count,
        dims=args.dims,
        seed=args.seed,
        precision=_precision(args.precision),
        extent=args.extent,
        clusters=args.clusters,
        sigma=args.sigma,
        pitch=args.pitch,
        jitter=args.jitter,
    )
    ds = bench.generate(spec)
    for a in range(ds.dims):
        path = f"{args.output_prefix}.{_AXIS_NAMES[a]}"
        ds.axes[a].astype(ds.precision.dtype.newbyteorder("<")).tofile(path)
    print(f"wrote {ds.dims} axis file(s) of {ds.count} particles", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    spec = bench.GenSpec(
        kind=bench.GenKind(args.kind),
        count=args.count,
        dims=args.dims,
        seed=args.seed,
        precision=_precision(args.precision),
        extent=args.extent,
        clusters=args.clusters,
        sigma=args.sigma,
        pitch=args.pitch,
        jitter=args.jitter,
    )
    try:
        cfg = CompressConfig(
            error_bound=args.eb[0],
            eb_mode=EbMode.ABSOLUTE if args.eb_mode == "abs" else EbMode.RANGE_RELATIVE,
            block_size=args.block_size,
            target_segs_per_axis=args.segs_per_axis,
            preserve_order=args.preserve_order,
        )
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rows = bench.run_bench(spec, args.eb, cfg, repetitions=args.repetitions,
                           workers=args.threads)
    csv = bench.bench_csv(rows)
    if args.output:
        with open(args.output, "w") as f:
            f.write(csv)
    else:
        sys.stdout.write(csv)
    return 0


def _add_gen_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=[k.value for k in bench.GenKind], default="clusters")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--dims", type=int, choices=(1, 2, 3), default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--precision", choices=("f32", "f64"), default="f32")
    p.add_argument("--extent", type=float, default=1.0)
    p.add_argument("--clusters", type=int, default=32)
    p.add_argument("--sigma", type=float, default=0.01)
    p.add_argument("--pitch", type=float, default=0.05)
    p.add_argument("--jitter", type=float, default=0.01)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gpz",
                                     description="error-bounded particle position compressor")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker count; output bytes do not depend on it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="raw binary axes to .gpz container")
    _add_input_flags(p)
    _add_bound_flags(p)
    p.add_argument("--output", required=True, metavar="FILE.gpz")
    p.set_defaults(fn=cmd_compress)

    p = sub.add_parser("decompress", help=".gpz container to raw binary axes")
    p.add_argument("--input", required=True, metavar="FILE.gpz")
    p.add_argument("--output-prefix", required=True,
                   help="writes PREFIX.x [PREFIX.y PREFIX.z] in stored precision")
    p.set_defaults(fn=cmd_decompress)

    p = sub.add_parser("verify", help="check a container against its original input")
    _add_input_flags(p)
    p.add_argument("--container", required=True, metavar="FILE.gpz")
    p.add_argument("--segs-per-axis", type=int, default=32)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("stats", help="container header summary and size histogram")
    p.add_argument("--input", required=True, metavar="FILE.gpz")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("gen", help="write synthetic raw binary axis files")
    _add_gen_flags(p)
    p.add_argument("--output-prefix", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("bench", help="end-to-end throughput and ratio report")
    _add_gen_flags(p)
    p.add_argument("--eb", type=float, nargs="+", required=True)
    p.add_argument("--eb-mode", choices=("abs", "rel"), default="rel")
    p.add_argument("--block-size", type=int, default=1024)
    p.add_argument("--segs-per-axis", type=int, default=32)
    p.add_argument("--preserve-order", action="store_true")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--output", help="CSV path; stdout when omitted")
    p.set_defaults(fn=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DomainError, WidthOverflow, CorruptData) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
