"""Command-line front end: scenario orchestration and deterministic output.

Subcommands::

    twofluid simulate          --config run.ini --out outdir
    twofluid hyperbolicity-map --config run.ini --out outdir
    twofluid verify-gibbs      --config run.ini --out outdir [--seed 7]
    twofluid fick-relax        --config run.ini --out outdir
    twofluid reduce-check      --config run.ini --out outdir

Every run writes the CSVs of its owning scenario plus a run.json manifest
echoing the resolved configuration.  All floats are written with 17
significant digits and all randomness is seeded, so identical config and
seed reproduce byte-identical files.  Exit codes: 0 success, 1 config
validation error, 2 numerical failure (with diagnostics.json).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile
import time
from typing import Dict, Iterable, List, Sequence

import numpy as np

from . import __version__
from .config import (ConfigError, ScenarioConfig, build_closures, build_model,
                     build_simulation, initial_profiles, parse_config)
from .hyperbolicity import map_hyperbolic_region
from .potential import AdmissibilityError, evaluate
from .solver import StepError, evolved_from_primitive_profiles, integrate
from .state import ConvergenceError, evolved_to_primitive
from .verify import (balance_subidentities, fick_residual, gibbs_residual,
                     random_trig_fields, single_fluid_reduction)

_FMT = "%.17g"


def _atomic_write(path: str, data: str) -> None:
    """Write whole file or nothing (temp file plus atomic rename)."""
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: Sequence[str],
              rows: Iterable[Sequence[float]]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            _FMT % v if isinstance(v, float) else str(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_manifest(outdir: str, cfg: ScenarioConfig, subcommand: str,
                    seed: int | None, wall: float) -> None:
    manifest = {
        "subcommand": subcommand,
        "version": __version__,
        "seed": seed,
        "wall_time_s": wall,
        "config": cfg.raw,
    }
    _atomic_write(os.path.join(outdir, "run.json"),
                  json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _write_diagnostics(outdir: str, exc: Exception) -> None:
    diag: Dict[str, object] = {"error": type(exc).__name__,
                               "message": str(exc)}
    if isinstance(exc, StepError):
        diag["time"] = exc.t
        diag["cell"] = exc.cell
    _atomic_write(os.path.join(outdir, "diagnostics.json"),
                  json.dumps(diag, indent=2, sort_keys=True) + "\n")


def _run_simulate(cfg: ScenarioConfig, outdir: str,
                  rng: np.random.Generator) -> None:
    sim = build_simulation(cfg)
    prof = initial_profiles(cfg)
    init = evolved_from_primitive_profiles(sim.model, sim.grid, **prof)
    trajectory = integrate(sim, init)
    x = sim.grid.centers()
    header = ["x", "rho1", "rho2", "u1", "u2", "s1", "s2",
              "K1", "K2", "theta1", "theta2"]
    for idx, (t, cells, _) in enumerate(trajectory):
        p = evolved_to_primitive(sim.model, cells)
        th = evaluate(sim.model, p.rho1, p.rho2, p.s1, p.s2, p.w,
                      need_hessian=False)
        cols = [x, p.rho1, p.rho2, p.u1, p.u2, p.s1, p.s2,
                cells.K1, cells.K2, th.theta1, th.theta2]
        rows = [[float(c[i]) for c in cols] for i in range(sim.grid.n)]
        write_csv(os.path.join(outdir, f"snapshot_{idx:04d}.csv"),
                  header, rows)
    rep_fields = ["t", "dt", "max_speed", "mass1", "mass2", "momentum_K",
                  "momentum_u", "energy", "entropy", "min_eig_A"]
    write_csv(os.path.join(outdir, "timeseries.csv"), rep_fields,
              [[float(getattr(r, f)) for f in rep_fields]
               for _, _, r in trajectory])


def _run_hyperbolicity_map(cfg: ScenarioConfig, outdir: str,
                           rng: np.random.Generator) -> None:
    model = build_model(cfg)
    sec = "hyperbolicity"
    rho1 = np.linspace(cfg.getfloat(sec, "rho1_min"),
                       cfg.getfloat(sec, "rho1_max"),
                       cfg.getint(sec, "n_rho1"))
    rho2 = np.linspace(cfg.getfloat(sec, "rho2_min"),
                       cfg.getfloat(sec, "rho2_max"),
                       cfg.getint(sec, "n_rho2"))
    w = np.linspace(cfg.getfloat(sec, "w_min"), cfg.getfloat(sec, "w_max"),
                    cfg.getint(sec, "n_w"))
    s1 = cfg.getfloat(sec, "s1")
    s2 = cfg.getfloat(sec, "s2")
    reports = map_hyperbolic_region(model, rho1, rho2, w, s1, s2)
    header = ["rho1", "rho2", "w", "min_eig_A", "ineq1", "ineq2", "ineq3",
              "lambda1", "lambda2", "lambda3", "lambda4", "hyperbolic"]
    rows = []
    for rep in reports:
        lams = (list(rep.speeds) if rep.speeds is not None
                else [math.nan] * 4)
        rows.append([rep.rho1, rep.rho2, rep.w, rep.min_eig_A,
                     rep.ineq1, rep.ineq2, rep.ineq3,
                     *[float(v) for v in lams], int(rep.hyperbolic)])
    write_csv(os.path.join(outdir, "map.csv"), header, rows)


def _run_verify_gibbs(cfg: ScenarioConfig, outdir: str,
                      rng: np.random.Generator) -> None:
    model = build_model(cfg)
    closures = build_closures(cfg)
    n_fields = cfg.getint("gibbs", "n_fields")
    h_values = cfg.getfloats("gibbs", "h_values")
    t_lo = cfg.getfloat("gibbs", "t_lo")
    t_hi = cfg.getfloat("gibbs", "t_hi")
    x_lo = cfg.getfloat("grid", "x_lo")
    x_hi = cfg.getfloat("grid", "x_hi")

    res_rows: List[List[float]] = []
    conv_rows: List[List[float]] = []
    for i in range(n_fields):
        field = random_trig_fields(rng)
        point = (float(rng.uniform(t_lo, t_hi)),
                 float(rng.uniform(x_lo, x_hi)))
        combos = []
        for h in h_values:
            g = gibbs_residual(model, closures, field, point, h)
            ids = balance_subidentities(model, closures, field, point, h)
            res_rows.append([float(i), point[0], point[1], h, g.E, g.M1,
                             g.M2, g.B1, g.B2, g.S, g.combination,
                             ids["a"], ids["b"], ids["c"], ids["d"],
                             ids["e"], ids["f"]])
            combos.append(abs(g.combination))
        ratios = [combos[j] / max(combos[j + 1], 1e-300)
                  for j in range(len(combos) - 1)]
        order = (math.log2(min(ratios)) if ratios else math.nan)
        conv_rows.append([float(i), *ratios, order])

    write_csv(os.path.join(outdir, "residuals.csv"),
              ["field_set", "t", "x", "h", "E", "M1", "M2", "B1", "B2", "S",
               "combination", "id_a", "id_b", "id_c", "id_d", "id_e", "id_f"],
              res_rows)
    n_ratios = max(len(r) - 2 for r in conv_rows)
    write_csv(os.path.join(outdir, "convergence.csv"),
              ["field_set", *[f"ratio_{j+1}" for j in range(n_ratios)],
               "order"], conv_rows)


def _run_fick_relax(cfg: ScenarioConfig, outdir: str,
                    rng: np.random.Generator) -> None:
    sim = build_simulation(cfg)
    prof = initial_profiles(cfg)
    init = evolved_from_primitive_profiles(sim.model, sim.grid, **prof)
    sample_times = cfg.getfloats("fick", "sample_times")
    bound = cfg.getfloat("fick", "theta_bound")
    rows = []
    for t_s in sample_times:
        run = dataclasses.replace(sim, t_end=t_s, report_interval=t_s)
        out = integrate(run, init)
        _, cells, _ = out[-1]
        p = evolved_to_primitive(run.model, cells)
        _, rel = fick_residual(run.model, run.closures, p, run.grid.dx,
                               theta0=run.theta0, theta_bound=bound)
        rows.append([t_s, rel, float(np.max(np.abs(p.w)))])
    write_csv(os.path.join(outdir, "fick.csv"),
              ["t", "rel_residual", "max_w"], rows)


def _run_reduce_check(cfg: ScenarioConfig, outdir: str,
                      rng: np.random.Generator) -> None:
    p = cfg.raw["potential"]
    if (p["gamma1"] != p["gamma2"] or p["cv1"] != p["cv2"]
            or p["k1"] != p["k2"] or p["s01"] != p["s02"]
            or float(p["a"]) != 0.0):
        raise ConfigError(
            "reduce-check requires identical phases and a = 0")
    model = build_model(cfg)
    prof = initial_profiles(cfg)
    rho_total = prof["rho1"]
    n_values = cfg.getints("reduce", "n_values")
    ref_factor = cfg.getint("reduce", "ref_factor")
    t_end = cfg.getfloat("run", "t_end")
    rows = []
    prev = None
    for n in n_values:
        r = single_fluid_reduction(
            model, n, t_end, rho0=rho_total, u0=prof["u1"], s0=prof["s1"],
            x_lo=cfg.getfloat("grid", "x_lo"),
            x_hi=cfg.getfloat("grid", "x_hi"),
            ref_n=ref_factor * max(n_values),
            cfl=cfg.getfloat("run", "cfl"))
        order = (math.log2(prev / r["l1_rho"]) if prev else math.nan)
        rows.append([float(n), r["l1_rho"], r["l1_u"], order])
        prev = r["l1_rho"]
    write_csv(os.path.join(outdir, "reduce.csv"),
              ["n", "l1_rho", "l1_u", "order_rho"], rows)


_SUBCOMMANDS = {
    "simulate": _run_simulate,
    "hyperbolicity-map": _run_hyperbolicity_map,
    "verify-gibbs": _run_verify_gibbs,
    "fick-relax": _run_fick_relax,
    "reduce-check": _run_reduce_check,
}


def run_subcommand(name: str, cfg: ScenarioConfig, outdir: str,
                   seed: int | None = None) -> int:
    """Execute one scenario; returns the process exit code."""
    if name not in _SUBCOMMANDS:
        raise ValueError(f"unknown subcommand {name!r}")
    os.makedirs(outdir, exist_ok=True)
    rng = np.random.default_rng(0 if seed is None else seed)
    start = time.perf_counter()
    try:
        _SUBCOMMANDS[name](cfg, outdir, rng)
    except (StepError, ConvergenceError, AdmissibilityError,
            ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        _write_diagnostics(outdir, exc)
        return 2
    _write_manifest(outdir, cfg, name, seed, time.perf_counter() - start)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="twofluid",
        description="binary mixture toolkit: simulation, hyperbolicity "
                    "mapping, and identity verification")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return run_subcommand(args.subcommand, cfg, args.out, args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
