import csv
import io
import json
import subprocess
import sys

import pytest

from plasmonbus import __version__, cli


def _run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv(text):
    lines = text.splitlines()
    header = [ln for ln in lines if ln.startswith("#")]
    rows = list(csv.reader(ln for ln in lines if not ln.startswith("#")))
    return header, rows[0], rows[1:]


def test_coupling_json(capsys):
    code, out, _ = _run(["coupling"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["header"]["version"] == __version__
    assert data["header"]["config"]["geometry"]["R_nm"] == 20.0
    assert data["g_meV"] == pytest.approx(0.51550696870924573, rel=1e-10)
    assert data["mode_cutoff"][0] == {"m": 0, "propagating": True}


def test_dispersion_csv(capsys):
    code, out, _ = _run(["dispersion", "--set", "sweep.kR_points=5", "--set",
                         "sweep.m_list=0, 1"], capsys)
    assert code == 0
    header, cols, rows = _csv(out)
    assert header[0] == f"# plasmonbus {__version__}"
    assert "# sweep.kR_points = 5" in header
    assert cols == ["kR", "omega_over_omega_p", "omega_over_omega_p_m1"]
    assert len(rows) == 5
    vals = [float(r[1]) for r in rows]
    assert vals == sorted(vals)


def test_coupling_map_csv(capsys):
    code, out, _ = _run(["coupling-map", "--set", "sweep.R_nm_list=20, 40",
                         "--set", "sweep.d_nm_list=0, 30"], capsys)
    assert code == 0
    _, cols, rows = _csv(out)
    assert cols == ["R_nm", "d_nm", "g_meV"]
    table = {(float(r[0]), float(r[1])): float(r[2]) for r in rows}
    assert table[(20.0, 30.0)] == pytest.approx(0.51550696870924573, rel=1e-10)
    assert table[(20.0, 0.0)] > table[(40.0, 0.0)]


def test_gn_curve_csv(capsys):
    code, out, _ = _run(["gn-curve", "--set", "qd.d_nm=0", "--set",
                         "sweep.gn_R_nm_list=20, 40, 80"], capsys)
    assert code == 0
    _, cols, rows = _csv(out)
    assert cols == ["R_nm", "gN"]
    assert [float(r[1]) for r in rows] == pytest.approx([1.0, 0.5, 0.25], rel=1e-10)


def test_gate_json(capsys):
    code, out, _ = _run(["gate"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["phase_quadrature"] == pytest.approx(3.141592653589793, abs=1e-6)
    assert abs(data["theta_over_pi"] - 1) < 0.05
    assert 0 < data["fidelity"] <= 1


def test_optimize_and_sweep_agree(capsys, tmp_path):
    common = ["--set", "gate.coarse_points=3, 3", "--set", "gate.Gamma_per_ps=0.01",
              "--set", "gate.Q=1000"]
    code, out, _ = _run(["optimize"] + common, capsys)
    assert code == 0
    opt = json.loads(out)
    target = tmp_path / "sweep.csv"
    code, _, err = _run(["sweep", "-o", str(target), "--set", "sweep.Gamma_list=0.01",
                         "--set", "sweep.Q_list=1000"] + common, capsys)
    assert code == 0
    assert "monotonicity" in err
    _, cols, rows = _csv(target.read_text())
    assert cols == ["Gamma_per_ps", "Q", "fidelity", "deltaL_meV", "Delta_meV"]
    assert float(rows[0][2]) == opt["fidelity"]
    assert float(rows[0][3]) == opt["deltaL_meV"]


def test_nonlocal_cnot(capsys):
    code, out, _ = _run(["nonlocal-cnot", "--forced", "1,0", "--set", "seed=4"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "pass"
    assert [m["result"] for m in data["transcript"]["measurements"]] == [1, 0]
    code, _, err = _run(["nonlocal-cnot", "--forced", "1"], capsys)
    assert code == 2


def test_selftest(capsys):
    code, out, _ = _run(["selftest"], capsys)
    assert code == 0
    assert out.count("PASS") == 8


def test_usage_errors(capsys):
    assert _run([], capsys)[0] == 2
    assert _run(["frobnicate"], capsys)[0] == 2
    code, _, err = _run(["coupling", "--set", "qd.f=-1"], capsys)
    assert code == 2 and "qd.f" in err
    code, _, err = _run(["coupling", "--set", "qd.ff=3"], capsys)
    assert code == 2 and "qd.ff" in err
    assert _run(["sweep", "--threads", "0"], capsys)[0] == 2
    assert _run(["coupling", "--config", "/nonexistent.cfg"], capsys)[0] == 2


def test_computational_failure_exit_code(capsys):
    # a mode energy above the surface-plasmon asymptote has no bound mode
    code, _, err = _run(["coupling", "--set", "qd.delta_pl_meV=-3000"], capsys)
    assert code == 1 and err.startswith("error:")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "plasmonbus.cli", "--version"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert __version__ in proc.stdout


def test_help_lists_columns(capsys):
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["sweep", "--help"])
    assert "Gamma_per_ps, Q, fidelity, deltaL_meV, Delta_meV" in capsys.readouterr().out
