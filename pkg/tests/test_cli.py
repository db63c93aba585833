import json

import pytest

from paracyl import cli, verify


def run(argv):
    return cli.main([str(a) for a in argv])


def test_brjuno_writes_csv(tmp_path, capsys):
    assert run(["--out", tmp_path, "brjuno"]) == 0
    lines = (tmp_path / "brjuno.csv").read_text().strip().splitlines()
    assert lines[0] == "nu,omega,partial_sum"
    assert len(lines) == 13  # header + 12 levels
    out = capsys.readouterr().out
    assert "verdict:" in out


def test_brjuno_rational_truncates(tmp_path):
    conf = tmp_path / "run.ini"
    conf.write_text(f"[rotation]\nphi = {1.0 / 3.0!r}\n")
    out_dir = tmp_path / "out"
    assert run(["--config", conf, "--out", out_dir, "brjuno"]) == 0
    lines = (out_dir / "brjuno.csv").read_text().strip().splitlines()
    # a small divisor vanishes at the second dyadic level; output truncates
    assert len(lines) < 13
    assert lines[-1].endswith(",inf")


def test_config_missing_phi_is_config_error(tmp_path):
    conf = tmp_path / "bad.ini"
    conf.write_text("[rotation]\ncf = oops\n")
    assert run(["--config", conf, "brjuno"]) == 2


def test_bad_tol_is_config_error(tmp_path):
    assert run(["--out", tmp_path, "--tol", "0", "brjuno"]) == 2


def test_orbit(tmp_path):
    assert run(["--out", tmp_path, "--n", "50", "orbit"]) == 0
    lines = (tmp_path / "orbit.csv").read_text().strip().splitlines()
    assert lines[0] == "n,re_x,im_x,re_y,im_y,re_U,im_U"
    assert len(lines) == 52  # header + initial point + 50 steps


def test_coords(tmp_path):
    assert run(["--out", tmp_path, "--tol", "1e-6", "coords",
                "--x0", "1.0", "--y0", "0.05"]) == 0
    report = json.loads((tmp_path / "coords.json").read_text())
    assert set(report) == {"point", "c", "psi", "sigma", "tau"}
    assert abs(report["c"][0] - 0.75) < 1e-2


def test_basin(tmp_path):
    assert run(["--out", tmp_path, "basin", "--family", "model"]) == 0
    report = json.loads((tmp_path / "basin.json").read_text())
    assert report["family"] == "model"
    assert report["r0"] > 0
    assert report["invariance"]["one_step_ok"] is True


def test_render_determinism_and_header(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run(["--out", out1, "render", "--family", "model"]) == 0
    assert run(["--out", out2, "render", "--family", "model"]) == 0
    data1 = (out1 / "render_band.ppm").read_bytes()
    assert data1.startswith(b"P6\n400 300\n255\n")
    assert len(data1) == 15 + 400 * 300 * 3
    assert data1 == (out2 / "render_band.ppm").read_bytes()
    assert (out1 / "render_angles.ppm").read_bytes() == (
        out2 / "render_angles.ppm"
    ).read_bytes()


def test_render_rejects_bad_slice(tmp_path):
    assert run(["--out", tmp_path, "render", "--slice", "-0.5"]) == 2


def test_render_tiny_grid(tmp_path):
    assert run(["--out", tmp_path, "render", "--family", "model",
                "--width", "1", "--height", "1"]) == 0
    data = (tmp_path / "render_band.ppm").read_bytes()
    assert data.startswith(b"P6\n1 1\n255\n")
    assert len(data) == len(b"P6\n1 1\n255\n") + 3


def test_verify_failure_exit_code(tmp_path, monkeypatch, capsys):
    stub = {
        "criteria": {"c01_stub": {"pass": True}, "c02_stub": {"pass": False}},
        "failing": ["c02_stub"],
        "all_pass": False,
    }
    monkeypatch.setattr(verify, "run_acceptance_twice", lambda cfg: stub)
    assert run(["--out", tmp_path, "verify"]) == 3
    captured = capsys.readouterr()
    assert "c01_stub: pass" in captured.out
    assert "c02_stub: FAIL" in captured.out
    assert "c02_stub" in captured.err
    assert (tmp_path / "verify.json").exists()
