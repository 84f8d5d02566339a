import hashlib
import json

import numpy as np
import pytest

from camrng.cli import main
from camrng.extractor import load_matrix


def sha(path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run(*argv) -> int:
    return main([str(a) for a in argv])


def test_simulate_writes_pgm_frames(tmp_path, capsys):
    out = tmp_path / "frames"
    rc = run(
        "simulate", "--preset", "nokia-n9", "--nbar", "410", "--frames", "3",
        "--width", "32", "--height", "16", "--seed", "4", "--out", out,
    )
    assert rc == 0
    files = sorted(p.name for p in out.glob("*.pgm"))
    assert files == ["frame_0000.pgm", "frame_0001.pgm", "frame_0002.pgm"]
    assert "predicted_fano" in capsys.readouterr().out


def test_simulate_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run(
            "simulate", "--preset", "nokia-n9", "--nbar", "100", "--frames", "2",
            "--width", "16", "--height", "16", "--seed", "9", "--out", out,
        ) == 0
    for name in ("frame_0000.pgm", "frame_0001.pgm"):
        assert sha(a / name) == sha(b / name)


def test_simulate_raw_format_with_sidecar(tmp_path):
    out = tmp_path / "raw"
    rc = run(
        "simulate", "--preset", "atik383l", "--nbar", "500", "--frames", "4",
        "--width", "8", "--height", "8", "--seed", "1", "--out", out,
        "--format", "raw16le",
    )
    assert rc == 0
    assert (out / "frames.raw").exists()
    sidecar = json.loads((out / "frames.raw.json").read_text())
    assert sidecar["header"]["frame_count"] == 4
    assert sidecar["n_bar"] == 500.0


def test_simulate_requires_intensity_and_out(tmp_path):
    assert run("simulate", "--preset", "nokia-n9", "--out", tmp_path / "x") == 2
    assert run("simulate", "--preset", "nokia-n9", "--nbar", "10") == 2


def test_simulate_rejects_zero_frames(tmp_path, capsys):
    rc = run(
        "simulate", "--preset", "nokia-n9", "--nbar", "10", "--frames", "0",
        "--out", tmp_path / "x",
    )
    assert rc == 2
    capsys.readouterr()


def test_entropy_json(capsys):
    assert run("entropy", "--nbar", "410", "--bits", "10", "--json") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["h_quantum_bits"] == pytest.approx(6.3865, abs=1e-3)
    assert doc["s_bits_per_raw_bit"] == pytest.approx(0.6387, abs=1e-3)
    assert doc["method"] == "exact-series"


def test_plan_evaluates_worked_example(capsys):
    assert run(
        "plan", "--s", "0.64", "--l", "2000", "--k", "500", "--json"
    ) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["log2_epsilon"] == "-390"
    assert doc["log2_epsilon_float"] == -390.0
    assert doc["compression_factor"] == 4.0


def test_plan_from_intensity(capsys):
    assert run(
        "plan", "--nbar", "410", "--bits", "10", "--l", "2000",
        "--target", "-100", "--json",
    ) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["k"] == 1077
    assert float(doc["log2_epsilon_float"]) <= -100.0


def test_plan_flag_validation(capsys):
    assert run("plan", "--s", "0.5", "--l", "100") == 2
    assert run("plan", "--s", "0.5", "--l", "100", "--k", "10", "--target", "-5") == 2
    assert run("plan", "--l", "100", "--k", "10") == 2  # no way to get s
    capsys.readouterr()


def _simulate_small(tmp_path, n_frames=10, capsys=None):
    out = tmp_path / "frames"
    assert run(
        "simulate", "--preset", "nokia-n9", "--nbar", "410",
        "--frames", str(n_frames), "--width", "64", "--height", "64",
        "--seed", "3", "--out", out,
    ) == 0
    if capsys is not None:
        capsys.readouterr()  # drop the simulate text before JSON commands
    return sorted(out.glob("*.pgm"))


def test_extract_then_battery_passes(tmp_path, capsys):
    frames = _simulate_small(tmp_path, capsys=capsys)
    out_bin = tmp_path / "out.bin"
    rc = run(
        "extract", "--preset", "nokia-n9", *frames,
        "--l", "2000", "--k", "500", "--out", out_bin, "--json",
    )
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["raw_bits"] == 10 * 64 * 64 * 10
    assert doc["blocks_processed"] == doc["raw_bits"] // 2000
    assert doc["output_bits"] == doc["blocks_processed"] * 500
    assert doc["log2_epsilon"] < -380
    assert out_bin.stat().st_size == doc["output_bytes"]

    rc = run("test", out_bin, "--bits", str(doc["output_bits"]), "--json")
    report = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert report["all_passed"] is True


def test_extract_deterministic(tmp_path):
    frames = _simulate_small(tmp_path, n_frames=3)
    outs = []
    for name in ("x.bin", "y.bin"):
        out = tmp_path / name
        assert run(
            "extract", "--preset", "nokia-n9", *frames,
            "--l", "400", "--k", "100", "--out", out,
        ) == 0
        outs.append(sha(out))
    assert outs[0] == outs[1]


def test_extract_refuses_violated_margin(tmp_path, capsys):
    frames = _simulate_small(tmp_path, n_frames=2)
    rc = run(
        "extract", "--preset", "nokia-n9", *frames,
        "--l", "2000", "--k", "1900", "--out", tmp_path / "no.bin",
    )
    assert rc == 2
    err = capsys.readouterr().err
    assert "margin" in err and "--force" in err
    assert not (tmp_path / "no.bin").exists()


def test_extract_force_overrides_margin(tmp_path, capsys):
    frames = _simulate_small(tmp_path, n_frames=2, capsys=capsys)
    out = tmp_path / "forced.bin"
    rc = run(
        "extract", "--preset", "nokia-n9", *frames,
        "--l", "2000", "--k", "1900", "--out", out, "--force", "--json",
    )
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["forced"] is True
    assert doc["log2_epsilon"] is None
    assert out.exists()


def test_extract_matrix_save_and_reuse(tmp_path, capsys):
    frames = _simulate_small(tmp_path, n_frames=2)
    mat_path = tmp_path / "m.qm"
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    assert run(
        "extract", "--preset", "nokia-n9", *frames, "--l", "300", "--k", "60",
        "--out", a, "--save-matrix", mat_path,
    ) == 0
    assert load_matrix(mat_path).l == 300
    assert run(
        "extract", "--preset", "nokia-n9", *frames, "--matrix", mat_path,
        "--out", b,
    ) == 0
    assert sha(a) == sha(b)
    # declared geometry must match a loaded matrix
    rc = run(
        "extract", "--preset", "nokia-n9", *frames, "--matrix", mat_path,
        "--l", "301", "--out", tmp_path / "c.bin",
    )
    assert rc == 2
    capsys.readouterr()


def test_battery_failure_exit_code(tmp_path, capsys):
    bad = tmp_path / "zeros.bin"
    bad.write_bytes(b"\x00" * 20_000)
    assert run("test", bad) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_test_export_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    src = tmp_path / "in.bin"
    src.write_bytes(rng.integers(0, 256, 15_000, dtype=np.uint8).tobytes())
    exported = tmp_path / "again.bin"
    run("test", src, "--export", exported)
    assert src.read_bytes() == exported.read_bytes()


def test_characterize_stack_report(tmp_path, capsys):
    frames = _simulate_small(tmp_path, n_frames=12, capsys=capsys)
    out = tmp_path / "char"
    assert run(
        "characterize", "--preset", "nokia-n9", *frames, "--out", out, "--json"
    ) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["fano"]["fano"] == pytest.approx(1.03, abs=0.15)
    assert (out / "report.json").exists()
    assert (out / "mask.json").exists()


def test_characterize_identical_frames_reports_cleanly(tmp_path, capsys):
    frames = _simulate_small(tmp_path, n_frames=2, capsys=capsys)
    dup = tmp_path / "dup.pgm"
    dup.write_bytes(frames[0].read_bytes())
    out = tmp_path / "char2"
    rc = run(
        "characterize", "--preset", "nokia-n9", frames[0], dup, "--out", out,
        "--json",
    )
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["fano"] is None
    assert "variance" in doc["fano_error"]


def test_characterize_sweep_manifest(tmp_path, capsys):
    sweep_dir = tmp_path / "sweep"
    assert run(
        "simulate", "--preset", "atik383l", "--sweep", "200,600,1800",
        "--frames", "6", "--width", "48", "--height", "48", "--seed", "2",
        "--out", sweep_dir,
    ) == 0
    capsys.readouterr()
    out = tmp_path / "charsweep"
    assert run(
        "characterize", "--preset", "atik383l",
        "--manifest", sweep_dir / "manifest.json", "--out", out, "--json",
    ) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["fitted_zeta"] == pytest.approx(2.3, rel=0.1)
    assert (out / "fano.csv").exists()
    assert len(doc["fano_points"]) == 3


def test_unknown_subcommand_and_preset(capsys):
    assert run("frobnicate") == 2
    assert run("simulate", "--preset", "bogus", "--nbar", "1", "--out", "x") == 2
    capsys.readouterr()
