import json

import numpy as np
import pytest

from boundary_ising import cli
from boundary_ising.export import read_csv


def run(*argv):
    return cli.main([str(a) for a in argv])


def _json(path):
    with open(path) as fh:
        return json.load(fh)


def test_spectrum_with_oracle(tmp_path):
    assert run("spectrum", "--h", 0.3, "--gamma", 0.2, "--n", 5, "--oracle", "--out", tmp_path, "--quiet") == 0
    rep = _json(tmp_path / "segments.json")
    assert rep["schema"] == "boundary-ising/1"
    assert rep["oracle_pairing_error"] < 1e-7
    assert rep["segment_count"] == 3 == rep["analytic_segments"]
    meta, rows = read_csv(tmp_path / "rapidity.csv")
    assert meta["kind"] == "rapidity" and len(rows) == 20
    _, lam = read_csv(tmp_path / "liouvillian.csv")
    assert len(lam) == 4 ** 5


def test_spectrum_nine_segments(tmp_path):
    run("spectrum", "--h", 3, "--gamma", 8, "--n", 6, "--out", tmp_path, "--quiet")
    assert _json(tmp_path / "segments.json")["segment_count"] == 9


def test_spectrum_unitary_limit(tmp_path):
    run("spectrum", "--h", 1, "--gamma", 0, "--n", 4, "--out", tmp_path, "--quiet")
    _, lam = read_csv(tmp_path / "liouvillian.csv")
    assert max(abs(float(r["re"])) for r in lam) < 1e-12


def test_spectrum_limit_suggests_rapidity_mode(tmp_path, capsys):
    assert run("spectrum", "--h", 1, "--gamma", 1, "--n", 12, "--out", tmp_path) == 2
    assert "--rapidity-only" in capsys.readouterr().err
    assert run("spectrum", "--h", 1, "--gamma", 1, "--n", 12, "--rapidity-only", "--out", tmp_path, "--quiet") == 0


def test_json_format(tmp_path):
    run("spectrum", "--h", 0.3, "--gamma", 0.2, "--n", 3, "--format", "json", "--out", tmp_path, "--quiet")
    doc = _json(tmp_path / "rapidity.json")
    assert doc["kind"] == "rapidity" and len(doc["rows"]) == 12


def test_phase_diagram_single_point(tmp_path):
    run("phase-diagram", "--h", 3, "--gamma", 8, "--numeric", 40, "--out", tmp_path, "--quiet")
    _, rows = read_csv(tmp_path / "phase_diagram.csv")
    assert len(rows) == 1
    assert rows[0]["segment_count"] == "9" and rows[0]["agree"] == "1"


def test_phase_diagram_default_grid_regions(tmp_path):
    run("phase-diagram", "--out", tmp_path, "--quiet")
    _, rows = read_csv(tmp_path / "phase_diagram.csv")
    assert len(rows) == 400
    assert {r["segment_count"] for r in rows} == {"1", "3", "5", "9"}


def test_threads_do_not_change_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["phase-diagram", "--h", "0.1:10:6", "--gamma", "0.1:10:6", "--numeric", 30, "--quiet"]
    run(*args, "--out", a, "--threads", 1)
    run(*args, "--out", b, "--threads", 3)
    assert (a / "phase_diagram.csv").read_bytes() == (b / "phase_diagram.csv").read_bytes()


def test_gap_table(tmp_path):
    run("gap", "--h", 1, "--gamma", "0,1,0.01", "--n", "32,64", "--out", tmp_path, "--quiet")
    _, rows = read_csv(tmp_path / "gap.csv")
    undefined = [r for r in rows if r["gamma"] == "0.0"]
    assert undefined and all(r["delta_g"] == "" and "undefined" in r["method"] for r in undefined)
    self_dual = [r for r in rows if r["gamma"] == "1.0"]
    assert all(float(r["mismatch"]) == 0.0 for r in self_dual)


def test_gap_n_scan_prints_slope(tmp_path, capsys):
    run("gap", "--h", 1, "--gamma", 0.01, "--n", "32,64,128,256", "--out", tmp_path)
    out = capsys.readouterr().out
    slope = float(out.split("slope in N =")[1].split()[0])
    assert slope == pytest.approx(-3, abs=0.1)


def test_dynamics_with_oracle_and_dual(tmp_path):
    run("dynamics", "--h", 0.3, "--gamma", 0.2, "--n", 4, "--t-max", 20, "--dt", 0.5,
        "--oracle", "--dual", "--out", tmp_path, "--quiet")
    _, rows = read_csv(tmp_path / "dynamics.csv")
    first = [r for r in rows if r["t"] == "0.0" and r["source"] == "lyapunov"]
    assert float(first[0]["m_z"]) == pytest.approx(1.0)
    rep = _json(tmp_path / "dynamics_report.json")
    assert rep["oracle_max_deviation_gamma_0.2"] < 1e-6
    assert "duality_gamma_0.2" in rep


def test_disorder_zero_width_equals_clean(tmp_path):
    run("disorder", "--h", 3, "--gamma", 5, "--n", 4, "--delta", 0, "--configs", 2, "--out", tmp_path / "d",
        "--quiet")
    run("spectrum", "--h", 3, "--gamma", 5, "--n", 4, "--out", tmp_path / "s", "--quiet")
    _, scat = read_csv(tmp_path / "d" / "disorder_scatter.csv")
    _, lam = read_csv(tmp_path / "s" / "liouvillian.csv")
    a = np.array([complex(float(r["re"]), float(r["im"])) for r in scat if r["config"] == "0"])
    b = np.array([complex(float(r["re"]), float(r["im"])) for r in lam])
    assert np.array_equal(a, b)
    _, segs = read_csv(tmp_path / "d" / "disorder_segments.csv")
    assert all(float(r["ed_pairing_error"]) < 1e-7 for r in segs)


def test_disorder_reproducible(tmp_path):
    for d in ("a", "b"):
        run("disorder", "--h", 3, "--gamma", 5, "--n", 6, "--configs", 5, "--seed", 3, "--out", tmp_path / d,
            "--quiet")
    for f in ("disorder_scatter.csv", "disorder_segments.csv", "disorder_summary.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_disorder_structure_at_five_segment_point(tmp_path):
    run("disorder", "--h", 3, "--gamma", 5, "--n", 6, "--configs", 50, "--out", tmp_path, "--quiet")
    assert _json(tmp_path / "disorder_summary.json")["preserved_fraction"] >= 0.9


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("h = 3\ngamma = 8\nn = 6\n")
    run("spectrum", "--config", cfg, "--out", tmp_path / "a", "--quiet")
    assert _json(tmp_path / "a" / "segments.json")["segment_count"] == 9
    run("spectrum", "--config", cfg, "--gamma", 5, "--out", tmp_path / "b", "--quiet")
    assert _json(tmp_path / "b" / "segments.json")["segment_count"] == 5


def test_config_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("colour = blue\n")
    with pytest.raises(SystemExit):
        run("spectrum", "--config", cfg)


def test_invalid_parameters_exit_code(tmp_path, capsys):
    assert run("spectrum", "--h", 1, "--gamma", -1, "--n", 3, "--out", tmp_path) == 2
    assert "error" in capsys.readouterr().err


def test_validate_subset_passes(capsys):
    assert run("validate", "--quick", "--only", "3,5,12") == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3


def test_validate_reports_failure(monkeypatch, capsys):
    from boundary_ising import tmatrix

    orig = tmatrix.build_t

    def corrupted(params, parity):
        t = orig(params, parity)
        t.matrix[0, 0] = -t.matrix[0, 0]
        return t

    monkeypatch.setattr(tmatrix, "build_t", corrupted)
    assert run("validate", "--quick", "--only", "12") == 1
    assert "[FAIL] criterion 12" in capsys.readouterr().out
