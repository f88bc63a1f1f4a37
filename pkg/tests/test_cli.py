import json

import numpy as np
import pytest

from photonwigner import cli, io

SMALL = {"grid": {"n": 6, "dk": 0.6}, "packet": {"k0": [0.0, 0.0, 1.2], "sigma": 0.6, "weights": [1, [0, 0.4]]},
         "x_counts": 8}


@pytest.fixture
def config(tmp_path):
    p = tmp_path / "run.json"
    p.write_text(json.dumps(SMALL))
    return str(p)


def run(*argv):
    return cli.main([str(a) for a in argv])


def triad_rows(tmp_path, *ks):
    out = tmp_path / "t.csv"
    argv = ["triad", "--out-file", out]
    for k in ks:
        argv += ["--k", k]
    code = run(*argv)
    header, data = io.read_csv(out)
    return code, header, data


def test_triad_example(tmp_path):
    code, header, data = triad_rows(tmp_path, "0,0,1")
    assert code == 0
    row = dict(zip(header, data[0]))
    s = 1 / np.sqrt(2)
    assert row["e1_re"] == pytest.approx(s, abs=1e-15)
    assert row["e2_im"] == pytest.approx(s, abs=1e-15)
    for name in ("e1_im", "e2_re", "e3_re", "e3_im"):
        assert abs(row[name]) < 1e-15
    for name in ("eigen", "norm", "isotropic", "transverse", "orthonormal", "handedness"):
        assert row[name] < 1e-12


def test_triad_antipode_is_conjugate(tmp_path):
    _, header, data = triad_rows(tmp_path, "0,0,1", "0,0,-1")
    up, down = (dict(zip(header, r)) for r in data)
    for j in (1, 2, 3):
        assert down[f"e{j}_re"] == pytest.approx(up[f"e{j}_re"], abs=1e-12)
        assert down[f"e{j}_im"] == pytest.approx(-up[f"e{j}_im"], abs=1e-12)


def test_triad_zero_row_is_recorded(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert run("triad", "--k", "0,0,0", "--k", "1,0,0", "--out-file", out) == 1
    lines = out.read_text().splitlines()
    assert "nonzero" in lines[1]
    assert lines[2].split(",")[-1] == ""


def test_triad_empty_input_writes_header(capsys):
    assert run("triad") == 0
    assert capsys.readouterr().out == ",".join(cli.TRIAD_HEADER) + "\n"


def test_triad_from_file(tmp_path):
    src = io.write_csv(tmp_path / "k.csv", ["k1", "k2", "k3"], [(1.0, 2.0, 3.0), (0.0, -1.0, 0.5)])
    out = tmp_path / "t.csv"
    assert run("triad", "--file", src, "--out-file", out) == 0
    _, data = io.read_csv(out)
    assert data.shape == (2, len(cli.TRIAD_HEADER))


def test_bad_vector_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run("triad", "--k", "1,2")
    assert exc.value.code == 2


def test_grid_verify(tmp_path, capsys):
    assert run("grid", "verify", "--out", tmp_path) == 0
    assert "81/81" in capsys.readouterr().out
    report = io.read_json(tmp_path / "grid_report.json")
    assert report["passed"] and report["result"]["matched"] == 81


def test_grid_table(tmp_path):
    assert run("grid", "table", "--out", tmp_path) == 0
    header, data = io.read_csv(tmp_path / "boxtimes_table.csv")
    assert header[:3] == ["k", "l", "position"]
    assert int(data[:, -1].sum()) == 5


def test_check_algebra(tmp_path, capsys):
    assert run("check", "--suite", "algebra", "--out", tmp_path) == 0
    report = io.read_json(tmp_path / "check_report.json")
    (suite,) = report["suites"]
    assert suite["passed"]
    assert max(c["value"] for c in suite["checks"]) < 1e-12
    assert "PASS algebra." in capsys.readouterr().out


def test_wigner_normalization_report(tmp_path, config):
    assert run("wigner", "--config", config, "--kernel", "weyl67", "--slice", "x=0", "--out", tmp_path) == 0
    report = io.read_json(tmp_path / "wigner_report.json")
    norm = next(c for c in report["checks"] if c["name"] == "normalization")
    assert norm["value"] < 1e-3 and norm["passed"]
    header, data = io.read_csv(tmp_path / "wigner.csv")
    assert header == io.FIELD_HEADER
    assert len(data) == 6**3 * 9
    assert np.all(data[:, 3:6] == 0.0)


def test_wigner_csv_is_deterministic(tmp_path, config):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("wigner", "--config", config, "--kernel", "cos69", "--slice", "x=0.1,0,0.2", "--out", out) == 0
    assert (a / "wigner.csv").read_bytes() == (b / "wigner.csv").read_bytes()


def test_packet_writes_state(tmp_path, config):
    assert run("packet", "--config", config, "--out", tmp_path) == 0
    s = io.read_state(tmp_path / "packet")
    assert s.grid.shape == (6, 6, 6)
    assert io.read_json(tmp_path / "packet_report.json")["bb_norm"] == pytest.approx(1.0, abs=1e-12)


def test_marginals(tmp_path, config):
    assert run("marginals", "--config", config, "--out", tmp_path) == 0
    for name in ("momentum_marginal.csv", "position_marginal.csv", "grid_weights.csv", "marginals_report.json"):
        assert (tmp_path / name).exists()
    _, w = io.read_csv(tmp_path / "grid_weights.csv")
    assert w[:, 1].sum() == pytest.approx(1.0, abs=1e-3)


def test_evolve(tmp_path, config):
    assert run("evolve", "--config", config, "--t", "0.25", "--out", tmp_path) == 0
    assert io.read_state(tmp_path / "evolved").t == 0.25
    assert io.read_json(tmp_path / "evolve_report.json")["passed"]


def test_units_flags_are_honoured(tmp_path, config):
    assert run("packet", "--config", config, "--hbar", "2", "--c", "3", "--out", tmp_path / "u") == 0
    assert run("packet", "--config", config, "--out", tmp_path / "n") == 0
    ru = io.read_json(tmp_path / "u" / "packet_report.json")
    rn = io.read_json(tmp_path / "n" / "packet_report.json")
    assert ru["config"]["units"] == {"hbar": 2.0, "c": 3.0}
    assert ru["energy"] == pytest.approx(6.0 * rn["energy"], rel=1e-12)


def test_unknown_kernel_exits_2(tmp_path, config, capsys):
    assert run("wigner", "--config", config, "--kernel", "gauss", "--out", tmp_path) == 2
    err = capsys.readouterr().err
    assert "gauss" in err and "weyl67" in err


def test_bad_config_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "grid": {"n": 5}\n}')
    assert run("packet", "--config", p, "--out", tmp_path) == 2
    assert "bad.json:2:" in capsys.readouterr().err


def test_failed_gate_exits_1(tmp_path, capsys):
    p = tmp_path / "strict.json"
    p.write_text(json.dumps({**SMALL, "tolerances": {"normalization": 1e-30}}))
    assert run("wigner", "--config", p, "--out", tmp_path) == 1
    assert "FAILED: normalization" in capsys.readouterr().err
    assert not io.read_json(tmp_path / "wigner_report.json")["passed"]
