import numpy as np
import pytest

from gpz.cli import main


def _write_axes(tmp_path, seed=0, count=6000, dims=3, dt="<f4", prefix="in"):
    rng = np.random.default_rng(seed)
    paths = []
    data = []
    for a in range(dims):
        arr = rng.uniform(-1, 1, count).astype(dt)
        p = tmp_path / f"{prefix}.{'xyz'[a]}"
        arr.tofile(p)
        paths.append(str(p))
        data.append(arr)
    return paths, data


def test_compress_decompress_verify_round_trip(tmp_path, capsys):
    paths, data = _write_axes(tmp_path)
    out = tmp_path / "out.gpz"
    rc = main(["compress", "--input", *paths, "--dims", "3", "--precision", "f32",
               "--eb", "1e-3", "--output", str(out)])
    assert rc == 0
    assert out.exists()
    err = capsys.readouterr().err
    assert "cr=" in err and "bitrate=" in err and "time=" in err

    rc = main(["decompress", "--input", str(out), "--output-prefix", str(tmp_path / "rec")])
    assert rc == 0
    rec = np.fromfile(tmp_path / "rec.x", dtype="<f4")
    assert rec.size == data[0].size

    rc = main(["verify", "--input", *paths, "--dims", "3", "--precision", "f32",
               "--container", str(out)])
    assert rc == 0
    assert "violations=0" in capsys.readouterr().out


def test_verify_detects_mismatched_original(tmp_path, capsys):
    paths, _ = _write_axes(tmp_path, seed=1, dims=1, count=4096)
    out = tmp_path / "a.gpz"
    assert main(["compress", "--input", *paths, "--dims", "1", "--eb", "1e-4",
                 "--output", str(out)]) == 0
    # shift the original beyond the bound and verify against it
    arr = np.fromfile(paths[0], dtype="<f4") + np.float32(0.5)
    arr.tofile(paths[0])
    rc = main(["verify", "--input", *paths, "--dims", "1", "--container", str(out)])
    assert rc == 1


def test_interleaved_and_per_axis_inputs_match(tmp_path):
    paths, data = _write_axes(tmp_path, seed=2, dims=3, count=4000)
    inter = tmp_path / "inter.bin"
    np.stack(data, axis=1).astype("<f4").tofile(inter)
    a = tmp_path / "a.gpz"
    b = tmp_path / "b.gpz"
    args = ["--dims", "3", "--precision", "f32", "--eb", "1e-3"]
    assert main(["compress", "--input", *paths, *args, "--output", str(a)]) == 0
    assert main(["compress", "--input", str(inter), "--interleaved", *args,
                 "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_missing_input_exits_3(tmp_path):
    rc = main(["compress", "--input", str(tmp_path / "absent.bin"), "--dims", "1",
               "--eb", "1e-3", "--output", str(tmp_path / "x.gpz")])
    assert rc == 3


def test_nonpositive_eb_exits_2(tmp_path):
    paths, _ = _write_axes(tmp_path, dims=1, count=64)
    rc = main(["compress", "--input", *paths, "--dims", "1", "--eb", "-1",
               "--output", str(tmp_path / "x.gpz")])
    assert rc == 2


def test_bad_arguments_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["compress", "--eb", "1e-3"])  # --input and --output missing
    assert exc.value.code == 2


def test_corrupt_container_exits_4(tmp_path):
    paths, _ = _write_axes(tmp_path, dims=1, count=512)
    out = tmp_path / "c.gpz"
    assert main(["compress", "--input", *paths, "--dims", "1", "--eb", "1e-3",
                 "--output", str(out)]) == 0
    blob = bytearray(out.read_bytes())
    blob[0] ^= 0xFF
    out.write_bytes(bytes(blob))
    rc = main(["decompress", "--input", str(out), "--output-prefix", str(tmp_path / "r")])
    assert rc == 4


def test_wrong_axis_file_count_exits_4(tmp_path):
    paths, _ = _write_axes(tmp_path, dims=2, count=128)
    rc = main(["compress", "--input", paths[0], "--dims", "2", "--eb", "1e-3",
               "--output", str(tmp_path / "x.gpz")])
    assert rc == 4


def test_stats_prints_summary(tmp_path, capsys):
    paths, _ = _write_axes(tmp_path, dims=2, count=5000)
    out = tmp_path / "s.gpz"
    assert main(["compress", "--input", *paths, "--dims", "2", "--eb", "1e-3",
                 "--output", str(out)]) == 0
    capsys.readouterr()
    assert main(["stats", "--input", str(out)]) == 0
    text = capsys.readouterr().out
    assert "magic=GPZ1" in text
    assert "particles=5000" in text
    assert "bits/particle=" in text
    assert "block payload bytes" in text


def test_gen_then_compress_via_files(tmp_path, capsys):
    prefix = tmp_path / "gen"
    rc = main(["gen", "--kind", "clusters", "--count", "4096", "--dims", "2",
               "--seed", "3", "--output-prefix", str(prefix)])
    assert rc == 0
    rc = main(["compress", "--input", str(tmp_path / "gen.x"), str(tmp_path / "gen.y"),
               "--dims", "2", "--eb", "1e-3", "--output", str(tmp_path / "g.gpz")])
    assert rc == 0
    rc = main(["verify", "--input", str(tmp_path / "gen.x"), str(tmp_path / "gen.y"),
               "--dims", "2", "--container", str(tmp_path / "g.gpz")])
    assert rc == 0


def test_threads_flag_keeps_bytes_identical(tmp_path):
    paths, _ = _write_axes(tmp_path, seed=4, dims=3, count=9000)
    args = ["--dims", "3", "--eb", "1e-3"]
    a = tmp_path / "t1.gpz"
    b = tmp_path / "t4.gpz"
    assert main(["compress", "--input", *paths, *args, "--output", str(a)]) == 0
    assert main(["--threads", "4", "compress", "--input", *paths, *args,
                 "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bench_writes_csv(tmp_path):
    csv_path = tmp_path / "bench.csv"
    rc = main(["bench", "--kind", "uniform", "--count", "4096", "--dims", "2",
               "--eb", "1e-2", "1e-3", "--repetitions", "1",
               "--output", str(csv_path)])
    assert rc == 0
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "kind,count,dims,seed,eb,cr,bitrate,psnr,comp_gbps,decomp_gbps"
    assert len(lines) == 3
