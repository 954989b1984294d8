import json
import math
import shutil
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biosc import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(capsys, *argv, fmt="csv"):
    code, out, _ = run(capsys, *argv, "--format", fmt)
    assert code == 0
    return cli.parse_table(out, fmt)


# ---------------------------------------------------------------- parsing helpers

@pytest.mark.parametrize("text, value", [("2.5", 2.5), ("pi/4", math.pi / 4), ("sqrt(pi)/2", math.sqrt(math.pi) / 2),
                                         ("-3", -3.0), ("1e6", 1e6), ("2**3 - 1", 7.0)])
def test_parse_number(text, value):
    assert cli.parse_number(text) == value


@pytest.mark.parametrize("text", ["__import__('os')", "x + 1", "sqrt", "open(1)", ""])
def test_parse_number_rejects(text):
    with pytest.raises(ValueError):
        cli.parse_number(text)


def test_parse_list():
    assert cli.parse_list("0.5, -3 ,-5") == (0.5, -3.0, -5.0)
    assert cli.parse_list("") == ()


finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.lists(st.lists(finite, min_size=3, max_size=3), min_size=1, max_size=6), st.sampled_from(cli.FORMATS))
def test_table_round_trip_bit_exact(rows, fmt):
    text = cli.format_table(["a", "b", "c"], rows, {"k": 0.1}, fmt)
    cols, back, meta = cli.parse_table(text, fmt)
    assert cols == ["a", "b", "c"] and meta == {"k": "0.1"}
    assert np.array_equal(np.array(back), np.array(rows))


# ---------------------------------------------------------------- potential

@pytest.mark.parametrize("fmt", cli.FORMATS)
def test_potential_fig5a(capsys, fmt):
    cols, rows, meta = table(capsys, "potential", "--preset", "fig5a", fmt=fmt)
    assert cols == ["x", "ReV", "ImV", "x2"]
    data = np.array(rows)
    assert data.shape == (2001, 4)
    assert np.max(np.abs(data[:, 2] + data[::-1, 2])) < 1e-12
    assert float(meta["zero_area_residual"]) < 1e-8
    assert float(meta["zero_endpoint_residual"]) < 1e-10
    assert np.array_equal(data[:, 3], data[:, 0] ** 2)


def test_potential_file_round_trip(capsys, tmp_path):
    out = tmp_path / "v.csv"
    assert cli.main(["potential", "--preset", "fig5b", "--out", str(out)]) == 0
    _, rows, _ = cli.parse_table(out.read_text(), "csv")
    from biosc.model import on_grid
    cfg = cli.load_configs(preset="fig5b")[0]
    V = on_grid(cfg.model, cfg.grid).V
    data = np.array(rows)
    assert np.array_equal(data[:, 1], V.real) and np.array_equal(data[:, 2], V.imag)


def test_potential_hermitian_zero_imaginary(capsys):
    _, rows, _ = table(capsys, "potential", "--preset", "hermitian", fmt="json")
    assert not np.any(np.array(rows)[:, 2])


@pytest.mark.parametrize("preset", ["fig1b", "fig1e"])
def test_potential_eps_minus3_finite(capsys, preset):
    _, rows, meta = table(capsys, "potential", "--preset", preset)
    assert np.all(np.isfinite(np.array(rows))) and meta["eps"] == "-3.0"


def test_potential_multi_section_config(capsys, tmp_path):
    cfg = tmp_path / "two.ini"
    cfg.write_text("[DEFAULT]\na = pi/4\nc = 1\nb = 0\nlam = sqrt(pi)/2\n"
                   "x_min = -8\nx_max = 8\nn_points = 801\n\n[one]\neps = -1\n\n[two]\neps = -3\n")
    cols, rows, meta = table(capsys, "potential", "--config", str(cfg))
    assert cols == ["x", "ReV:one", "ImV:one", "ReV:two", "ImV:two", "x2"]
    assert len(rows) == 801 and meta["preset"] == "one,two"


# ---------------------------------------------------------------- coherent

def test_coherent_natural_anchors(capsys):
    cols, rows, _ = table(capsys, "coherent", "--preset", "fig3")
    assert cols == ["r", "dXdP[eps=0.5]", "dXdP[eps=-3.0]", "dXdP[eps=-5.0]"]
    assert rows[0] == [0.0, 0.625, 12.0, 24.0]
    data = np.array(rows)
    assert np.all(data[:, 1] < data[:, 2]) and np.all(data[:, 2] < data[:, 3])


def test_coherent_distorted_anchors(capsys):
    cols, rows, _ = table(capsys, "coherent", "--preset", "fig4", "--family", "distorted")
    data = np.array(rows)
    ws = [0.1, 0.5, 1.0, 2.0, 3.0]
    assert np.allclose(data[0, 1:], np.array(ws) / 2, rtol=0, atol=1e-15)
    col = cols.index("dXdP[w=1.0]")
    assert np.max(np.abs(data[:, col] - 0.5)) < 1e-12


def test_coherent_distorted_skips_w0(capsys):
    code, out, _ = run(capsys, "coherent", "--preset", "fig1a", "--family", "distorted", "--r-points", "3")
    cols, _, meta = cli.parse_table(out, "csv")
    assert code == 0 and meta["skipped_w"] == "0.0" and "dXdP[w=0.1]" in cols


# ---------------------------------------------------------------- limits

def test_limits(capsys):
    cols, rows, meta = table(capsys, "limits", "--gamma", "2,20,1e6")
    assert cols[-1] == "status" and [r[-1] for r in rows] == ["ok"] * 3
    dev = np.array([r[1:6] for r in rows], dtype=float)
    assert np.all(dev[2] < 1e-5)
    assert np.all(dev[1] < dev[0])
    assert meta["monotone_decrease"] == "true"


def test_limits_singular_row(capsys):
    _, rows, _ = table(capsys, "limits", "--gamma", "0.5,20")
    assert rows[0][-1] == "singular" and all(math.isnan(v) for v in rows[0][1:6])
    assert rows[1][-1] == "ok"


# ---------------------------------------------------------------- verify and exit codes

def test_verify_algebra(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "algebra")
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert {"Acomm1", "Acomm2", "Acomm3", "Acomm4", "quad1", "rcom2", "dist2", "aosc"} <= set(rep["results"])
    assert all(float(r["residual"]) < 1e-9 for r in rep["results"].values())


def test_verify_biorthogonality(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "biorthogonality", "--preset", "fig5a")
    res = json.loads(out)["results"]
    assert code == 0
    assert float(res["ortho1"]["residual"]) < 1e-6
    assert float(res["zero"]["residual"]) < 1e-8
    assert float(res["pot2a"]["residual"]) < 1e-8


def test_verify_failure_exit_1(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "algebra", "--tolerance-scale", "1e-9")
    assert code == 1 and json.loads(out)["passed"] is False


def test_broken_params_exit_2(capsys, tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[broken]\neps = -1\na = 1\nb = 2\nc = 3\n\nlam = 0.5\n")
    code, out, err = run(capsys, "verify", "--config", str(cfg))
    assert code == 2 and out == ""
    assert f"{cfg}:7: field 'lam'" in err


def test_eps_out_of_range_names_line(capsys, tmp_path):
    cfg = tmp_path / "eps.ini"
    cfg.write_text("[s]\neps = 2\na = 1\nc = 1\nb = 0\n")
    code, _, err = run(capsys, "potential", "--config", str(cfg))
    assert code == 2 and f"{cfg}:2:" in err and "eps" in err


def test_singular_params_exit_2(capsys, tmp_path):
    cfg = tmp_path / "node.ini"
    cfg.write_text("[s]\neps = -1\na = 1\nb = 4\nc = 4\nlam = 0\n")
    assert run(capsys, "potential", "--config", str(cfg))[0] == 2


@pytest.mark.parametrize("argv", [["potential", "--preset", "nope"], ["potential", "--jobs", "0"],
                                  ["bogus"], ["verify", "--suite", "nope"],
                                  ["potential", "--config", "/nonexistent.ini"],
                                  ["verify", "--tolerance-scale", "-1"]])
def test_config_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_preset_dir_override(capsys, tmp_path, monkeypatch):
    (tmp_path / "presets.ini").write_text("[only]\neps = -1\na = 1\nb = 0\nc = 0\nlam = 0\n"
                                          "x_min = -4\nx_max = 4\nn_points = 81\n")
    monkeypatch.setenv("BIOSC_PRESET_DIR", str(tmp_path))
    _, rows, meta = table(capsys, "potential", "--preset", "only")
    assert len(rows) == 81 and meta["preset"] == "only"
    assert run(capsys, "potential")[0] == 2  # fig5a is not in the override


def test_all_presets_load():
    names = [c.name for c in cli.load_configs(cli.preset_path())]
    assert {"fig1a", "fig1b", "fig1c", "fig1d", "fig1e", "fig1f", "fig3", "fig4", "fig5a", "fig5b"} <= set(names)


def test_jobs_deterministic(capsys):
    a = run(capsys, "coherent", "--preset", "fig3", "--r-points", "7", "--jobs", "1")[1]
    b = run(capsys, "coherent", "--preset", "fig3", "--r-points", "7", "--jobs", "3")[1]
    assert a == b


def test_console_script():
    exe = shutil.which("biosc")
    cmd = [exe] if exe else [sys.executable, "-m", "biosc.cli"]
    proc = subprocess.run(cmd + ["coherent", "--preset", "fig3", "--r-points", "2", "--format", "json"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][0] == ["0.0", "0.625", "12.0", "24.0"]
