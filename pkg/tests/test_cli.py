"""End-to-end tests of the command-line front end."""
import json
import os

import numpy as np
import pytest

from twofluid.cli import main

BASE = """
[potential]
gamma1 = 2.0
gamma2 = 1.4
a = 0.2

[closures]
k = 0.5
kappa = 0.3

[grid]
n = 32

[initial]
rho1 = 1.0 + 0.05*sin(2*pi*x)
rho2 = 0.8
u1 = 0.1
u2 = 0.05

[run]
t_end = 0.05
report_interval = 0.05
"""


def write_config(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestSimulate:
    def test_zero_end_time_single_snapshot(self, tmp_path):
        cfgp = write_config(tmp_path, BASE.replace("t_end = 0.05",
                                                   "t_end = 0.0"))
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfgp, "--out", str(out)]) == 0
        snaps = sorted(p for p in os.listdir(out) if p.startswith("snapshot"))
        assert snaps == ["snapshot_0000.csv"]
        assert (out / "run.json").exists()
        assert (out / "timeseries.csv").exists()

    def test_snapshot_schema(self, tmp_path):
        cfgp = write_config(tmp_path, BASE)
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfgp, "--out", str(out)]) == 0
        header = (out / "snapshot_0000.csv").read_text().splitlines()[0]
        assert header == ("x,rho1,rho2,u1,u2,s1,s2,K1,K2,theta1,theta2")
        body = (out / "snapshot_0000.csv").read_text().splitlines()[1:]
        assert len(body) == 32

    def test_non_hyperbolic_exit_2_with_diagnostics(self, tmp_path):
        bad = BASE.replace("a = 0.2", "a = 1.0").replace(
            "u1 = 0.1", "u1 = -1.0").replace("u2 = 0.05", "u2 = 1.5")
        cfgp = write_config(tmp_path, bad)
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfgp, "--out", str(out)]) == 2
        diag = json.loads((out / "diagnostics.json").read_text())
        assert diag["error"] == "NonHyperbolicError"
        assert "cell" in diag and "time" in diag


class TestHyperbolicityMap:
    def test_row_count_matches_grid(self, tmp_path):
        cfgp = write_config(tmp_path, BASE)
        out = tmp_path / "out"
        assert main(["hyperbolicity-map", "--config", cfgp,
                     "--out", str(out)]) == 0
        lines = (out / "map.csv").read_text().splitlines()
        assert len(lines) == 1 + 10 * 10 * 10


class TestVerifyGibbs:
    def test_outputs_and_determinism(self, tmp_path):
        cfgp = write_config(tmp_path, BASE)
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        for out in (out1, out2):
            assert main(["verify-gibbs", "--config", cfgp,
                         "--out", str(out), "--seed", "7"]) == 0
        assert ((out1 / "residuals.csv").read_bytes()
                == (out2 / "residuals.csv").read_bytes())
        assert ((out1 / "convergence.csv").read_bytes()
                == (out2 / "convergence.csv").read_bytes())

    def test_seed_changes_output(self, tmp_path):
        cfgp = write_config(tmp_path, BASE)
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        main(["verify-gibbs", "--config", cfgp, "--out", str(out1),
              "--seed", "7"])
        main(["verify-gibbs", "--config", cfgp, "--out", str(out2),
              "--seed", "8"])
        assert ((out1 / "residuals.csv").read_bytes()
                != (out2 / "residuals.csv").read_bytes())


class TestFickRelax:
    def test_residual_series(self, tmp_path):
        text = """
[potential]
gamma1 = 2.0
gamma2 = 2.0

[closures]
k = 200.0
kappa = 5.0

[grid]
n = 64

[initial]
rho1 = 1.0 + 0.02*sin(2*pi*x)
rho2 = sqrt(2.0 - (1.0 + 0.02*sin(2*pi*x))**2)

[fick]
sample_times = 0.15,0.3
"""
        cfgp = write_config(tmp_path, text)
        out = tmp_path / "out"
        assert main(["fick-relax", "--config", cfgp, "--out", str(out)]) == 0
        lines = (out / "fick.csv").read_text().splitlines()
        assert lines[0] == "t,rel_residual,max_w"
        rels = [float(l.split(",")[1]) for l in lines[1:]]
        assert rels[-1] < rels[0] < 0.05


class TestReduceCheck:
    def test_requires_identical_phases(self, tmp_path):
        cfgp = write_config(tmp_path, BASE)
        out = tmp_path / "out"
        assert main(["reduce-check", "--config", cfgp,
                     "--out", str(out)]) == 1

    def test_comparison_table(self, tmp_path):
        text = """
[potential]
gamma1 = 1.4
gamma2 = 1.4

[grid]
n = 32

[initial]
rho1 = 1.0 + 0.1*exp(-100*(x-0.5)**2)
u1 = 0.05*exp(-100*(x-0.5)**2)

[run]
t_end = 0.1

[reduce]
n_values = 100,200
ref_factor = 8
"""
        cfgp = write_config(tmp_path, text)
        out = tmp_path / "out"
        assert main(["reduce-check", "--config", cfgp,
                     "--out", str(out)]) == 0
        lines = (out / "reduce.csv").read_text().splitlines()
        assert lines[0] == "n,l1_rho,l1_u,order_rho"
        assert len(lines) == 3
        order = float(lines[2].split(",")[3])
        assert order > 0.7


class TestErrorPaths:
    def test_bad_config_exit_1(self, tmp_path):
        cfgp = write_config(tmp_path,
                            BASE.replace("gamma1 = 2.0", "gamma1 = 0.5"))
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfgp, "--out", str(out)]) == 1

    def test_missing_config_exit_1(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "nope.ini"),
                     "--out", str(tmp_path / "out")]) == 1
