import json
import math

import pytest

from pwsync.cli import main

DIVERGING_INI = """
[scenario]
name = runaway
mode = thm4

[topology]
source = ring
n = 4

[nodes]
family = kuramoto
omega_scale = 10
seed = 0

[coupling]
variant = nonlinear
c = 0
eta = sin
e_max = 1.0

[init]
kind = zero

[sim]
dt = 0.01
t_end = 20
divergence_threshold = 100
"""


def test_certify_writes_reports_and_exits_zero(tmp_path):
    out = tmp_path / "cert"
    rc = main(["certify", "--scenario", "contraction3", "--out", str(out)])
    assert rc == 0
    assert (out / "report.txt").exists()
    payload = json.loads((out / "report.json").read_text())
    assert payload["report"]["certified"] is True
    assert payload["report"]["mode"] == "thm1"
    assert payload["scenario"]["scenario"] == "contraction3"


def test_certify_below_threshold_exits_two(tmp_path):
    out = tmp_path / "cert"
    rc = main(["certify", "--scenario", "relay5", "--c", "10", "--out", str(out)])
    assert rc == 2
    payload = json.loads((out / "report.json").read_text())
    assert payload["report"]["certified"] is False
    assert payload["report"]["c"] == 10.0


def test_certify_hypothesis_violation_exits_two(tmp_path, capsys):
    ini = tmp_path / "partial.ini"
    ini.write_text("""
[scenario]
mode = cor1

[topology]
source = complete
n = 4

[nodes]
family = chua

[coupling]
variant = linear
c = 10
gamma = 1,0,1
""")
    rc = main(["certify", "--scenario", str(ini), "--out", str(tmp_path / "o")])
    assert rc == 2
    err = capsys.readouterr().err
    assert "certification failed" in err


def test_unknown_scenario_exits_one(tmp_path, capsys):
    rc = main(["certify", "--scenario", "missing", "--out", str(tmp_path)])
    assert rc == 1
    assert "unknown scenario" in capsys.readouterr().err


def test_simulate_writes_outputs(tmp_path):
    out = tmp_path / "sim"
    rc = main([
        "simulate", "--scenario", "kuramoto4", "--t-end", "10", "--out", str(out),
    ])
    assert rc == 0
    summary = (out / "summary.txt").read_text()
    assert "eps_hat = " in summary
    assert "eps_bar = " in summary
    assert "eps_hat <= eps_bar = yes" in summary
    assert (out / "trajectory.csv").exists()
    assert (out / "errors.csv").exists()


def test_simulate_reruns_are_byte_identical(tmp_path):
    first = tmp_path / "a"
    second = tmp_path / "b"
    for out in (first, second):
        rc = main([
            "simulate", "--scenario", "contraction3", "--t-end", "2",
            "--seed", "1", "--out", str(out),
        ])
        assert rc == 0
    for name in ("trajectory.csv", "errors.csv", "summary.txt"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_simulate_divergence_exits_three(tmp_path):
    ini = tmp_path / "runaway.ini"
    ini.write_text(DIVERGING_INI)
    out = tmp_path / "sim"
    rc = main(["simulate", "--scenario", str(ini), "--out", str(out)])
    assert rc == 3
    summary = (out / "summary.txt").read_text()
    assert "diverged = yes" in summary
    assert "eps_hat = inf" in summary


def test_sweep_writes_sorted_grid(tmp_path):
    out = tmp_path / "sweep"
    rc = main([
        "sweep", "--scenario", "contraction3", "--c-min", "0.5", "--c-max", "2",
        "--points", "3", "--t-end", "1", "--out", str(out),
    ])
    assert rc == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    data = [l for l in lines if l and not l.startswith("#") and not l.startswith("c,")]
    assert len(data) == 3
    cs = [float(l.split(",")[0]) for l in data]
    assert cs == sorted(cs)
    assert cs[0] == 0.5 and cs[-1] == 2.0


def test_sweep_log_grid(tmp_path):
    out = tmp_path / "sweep"
    rc = main([
        "sweep", "--scenario", "contraction3", "--c-min", "0.25", "--c-max", "4",
        "--points", "3", "--grid", "log", "--t-end", "1", "--out", str(out),
    ])
    assert rc == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    data = [l for l in lines if l and not l.startswith("#") and not l.startswith("c,")]
    cs = [float(l.split(",")[0]) for l in data]
    assert cs == pytest.approx([0.25, 1.0, 4.0], rel=1e-12)


def test_sweep_argument_validation(tmp_path, capsys):
    rc = main([
        "sweep", "--scenario", "contraction3", "--c-min", "2", "--c-max", "1",
        "--out", str(tmp_path),
    ])
    assert rc == 1
    rc = main([
        "sweep", "--scenario", "contraction3", "--c-min", "0", "--c-max", "1",
        "--grid", "log", "--out", str(tmp_path),
    ])
    assert rc == 1
    rc = main([
        "sweep", "--scenario", "contraction3", "--c-min", "0", "--c-max", "1",
        "--points", "1", "--out", str(tmp_path),
    ])
    assert rc == 1


def test_certify_gain_override_matches_scenario_math(tmp_path):
    out = tmp_path / "cert"
    rc = main(["certify", "--scenario", "kuramoto4", "--out", str(out)])
    assert rc == 0
    payload = json.loads((out / "report.json").read_text())
    assert payload["report"]["c_tilde"] == pytest.approx(1.264 / math.sqrt(3.0), rel=1e-6)
    assert payload["report"]["eps_bar"] == pytest.approx(
        0.632 * math.pi / (2.25 * math.sqrt(3.0)), rel=1e-6
    )
