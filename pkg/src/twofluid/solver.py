"""1D method-of-lines finite-volume integrator for the dissipative system.

Evolved variables per cell are (rho1, rho2, K1, K2, s1, s2); in 1D the
K-equation has the near-conservative form

    dK_a/dt + d(K_a u_a - R_a)/dx = theta_a ds_a/dx + f_a / rho_a,

so only the entropy gradient and the entropy advection are nonconservative
products (discretized by central differences of cell values; acceptance-level
runs are smooth).  Conservative terms use the Rusanov (local Lax-Friedrichs)
flux with the local max characteristic speed supplied by the hyperbolicity
module; algebraic drag/heat sources are pointwise.  Time stepping is SSP-RK2
(Heun) with a CFL limit and an extra cap for stiff drag/heat rates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np

from . import hyperbolicity
from .closures import ClosureParams, drag_and_heat, entropy_sources
from .potential import RHO_FLOOR, PotentialModel, evaluate
from .state import (ConvergenceError, EvolvedState, PrimitiveState,
                    mixture_aggregates, primitive_to_evolved,
                    solve_relative_velocity)


class StepError(RuntimeError):
    """Time step failed; carries the time and offending cell index."""

    def __init__(self, message: str, t: float | None = None,
                 cell: int | None = None):
        super().__init__(message)
        self.t = t
        self.cell = cell


class NonHyperbolicError(StepError):
    """A cell left the hyperbolicity region (min-eig of A nonpositive)."""


@dataclass(frozen=True)
class Grid1D:
    x_lo: float
    x_hi: float
    n: int
    bc: str = "periodic"

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("grid needs at least 4 cells")
        if self.x_hi <= self.x_lo:
            raise ValueError("x_hi must exceed x_lo")
        if self.bc not in ("periodic", "transmissive"):
            raise ValueError(f"unknown boundary mode {self.bc!r}")

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.n

    def centers(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.n) + 0.5) * self.dx


@dataclass(frozen=True)
class ExternalPotential:
    """Scalar field Omega(x) with analytic gradient."""
    value: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]


ZERO_POTENTIAL = ExternalPotential(value=lambda x: np.zeros_like(x),
                                   grad=lambda x: np.zeros_like(x))


@dataclass(frozen=True)
class SimulationConfig:
    grid: Grid1D
    model: PotentialModel
    closures: ClosureParams = field(default_factory=ClosureParams)
    omega1: ExternalPotential = ZERO_POTENTIAL
    omega2: ExternalPotential = ZERO_POTENTIAL
    cfl: float = 0.45
    t_end: float = 1.0
    report_interval: float | None = None
    theta0: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.cfl <= 0.9):
            raise ValueError("cfl must lie in (0, 0.9]")
        if self.t_end < 0.0:
            raise ValueError("t_end must be nonnegative")


@dataclass(frozen=True, eq=False)
class TimeStepReport:
    t: float
    dt: float
    max_speed: float
    mass1: float
    mass2: float
    momentum_K: float
    momentum_u: float
    energy: float
    entropy: float
    min_eig_A: float


def _extend(arr: np.ndarray, bc: str) -> np.ndarray:
    if bc == "periodic":
        return np.concatenate(([arr[-1]], arr, [arr[0]]))
    return np.concatenate(([arr[0]], arr, [arr[-1]]))


def _recover(model, cells: EvolvedState, t: float | None = None):
    try:
        dK = cells.K2 - cells.K1
        tol = 1e-12 * np.maximum(1.0, np.maximum(np.abs(cells.K1),
                                                 np.abs(cells.K2)))
        w = solve_relative_velocity(model, cells.rho1, cells.rho2,
                                    cells.s1, cells.s2, dK, tol=tol)
    except ConvergenceError as exc:
        raise StepError(f"velocity recovery failed: {exc}", t=t)
    Ww = model.dW_dw(cells.rho1, cells.rho2, cells.s1, cells.s2, w)
    u1 = cells.K1 - Ww / cells.rho1
    return PrimitiveState(rho1=cells.rho1, rho2=cells.rho2,
                          u1=u1, u2=u1 + w, s1=cells.s1, s2=cells.s2)


def _cell_speeds(model, p: PrimitiveState, t: float | None = None):
    """Max |lambda| and min-eig(A) per cell; errors on hyperbolicity loss."""
    speeds, ok, min_eig = hyperbolicity.wave_speeds_batch(
        model, p.rho1, p.rho2, p.u1, p.u2, p.s1, p.s2)
    bad = ~ok | (min_eig <= 0.0)
    if np.any(bad):
        cell = int(np.argmax(bad))
        raise NonHyperbolicError(
            f"cell {cell} left the hyperbolicity region "
            f"(min-eig(A) = {float(min_eig[cell]):g})", t=t, cell=cell)
    return np.max(np.abs(speeds), axis=-1), min_eig


@dataclass(frozen=True, eq=False)
class RHSResult:
    d_rho1: np.ndarray
    d_rho2: np.ndarray
    d_K1: np.ndarray
    d_K2: np.ndarray
    d_s1: np.ndarray
    d_s2: np.ndarray
    smax: np.ndarray
    min_eig_A: np.ndarray
    primitive: PrimitiveState


def _rusanov_div(f: np.ndarray, q: np.ndarray, lam: np.ndarray,
                 dx: float) -> np.ndarray:
    """d/dx of the Rusanov flux for cell values with one ghost on each side."""
    flux = 0.5 * (f[:-1] + f[1:]) - 0.5 * lam * (q[1:] - q[:-1])
    return (flux[1:] - flux[:-1]) / dx


def assemble_rhs(config: SimulationConfig, cells: EvolvedState,
                 t: float | None = None) -> RHSResult:
    model = config.model
    grid = config.grid
    dx = grid.dx
    x = grid.centers()

    p = _recover(model, cells, t=t)
    th = evaluate(model, p.rho1, p.rho2, p.s1, p.s2, p.w, need_hessian=False)
    smax, min_eig = _cell_speeds(model, p, t=t)

    om1 = config.omega1.value(x)
    om2 = config.omega2.value(x)
    R1 = 0.5 * p.u1 ** 2 - th.W_rho1 - om1
    R2 = 0.5 * p.u2 ** 2 - th.W_rho2 - om2

    forces = drag_and_heat(config.closures, p, th.theta1, th.theta2)
    src1, src2 = entropy_sources(forces, p, th.theta1, th.theta2)

    bc = grid.bc
    ext = lambda a: _extend(np.asarray(a, dtype=float), bc)
    rho1e, rho2e = ext(p.rho1), ext(p.rho2)
    u1e, u2e = ext(p.u1), ext(p.u2)
    K1e, K2e = ext(cells.K1), ext(cells.K2)
    s1e, s2e = ext(cells.s1), ext(cells.s2)
    R1e, R2e = ext(R1), ext(R2)
    smaxe = ext(smax)
    lam = np.maximum(smaxe[:-1], smaxe[1:])

    d_rho1 = -_rusanov_div(rho1e * u1e, rho1e, lam, dx)
    d_rho2 = -_rusanov_div(rho2e * u2e, rho2e, lam, dx)

    ds1_dx = (s1e[2:] - s1e[:-2]) / (2.0 * dx)
    ds2_dx = (s2e[2:] - s2e[:-2]) / (2.0 * dx)

    d_K1 = (-_rusanov_div(K1e * u1e - R1e, K1e, lam, dx)
            + th.theta1 * ds1_dx + forces.f1 / p.rho1)
    d_K2 = (-_rusanov_div(K2e * u2e - R2e, K2e, lam, dx)
            + th.theta2 * ds2_dx + forces.f2 / p.rho2)

    d_s1 = -p.u1 * ds1_dx + src1
    d_s2 = -p.u2 * ds2_dx + src2

    return RHSResult(d_rho1=d_rho1, d_rho2=d_rho2, d_K1=d_K1, d_K2=d_K2,
                     d_s1=d_s1, d_s2=d_s2, smax=smax, min_eig_A=min_eig,
                     primitive=p)


def _advance(cells: EvolvedState, rhs: RHSResult, dt: float,
             t: float | None = None) -> EvolvedState:
    rho1 = cells.rho1 + dt * rhs.d_rho1
    rho2 = cells.rho2 + dt * rhs.d_rho2
    for name, rho in (("rho1", rho1), ("rho2", rho2)):
        if np.min(rho) < RHO_FLOOR:
            cell = int(np.argmin(rho))
            raise StepError(
                f"{name} went nonpositive in cell {cell} after a stage; "
                "reduce the CFL number", t=t, cell=cell)
    return EvolvedState(rho1=rho1, rho2=rho2,
                        K1=cells.K1 + dt * rhs.d_K1,
                        K2=cells.K2 + dt * rhs.d_K2,
                        s1=cells.s1 + dt * rhs.d_s1,
                        s2=cells.s2 + dt * rhs.d_s2)


def step(config: SimulationConfig, cells: EvolvedState, dt: float,
         t: float | None = None,
         rhs0: RHSResult | None = None) -> EvolvedState:
    """One SSP-RK2 (Heun) step; admissibility rechecked after each stage."""
    if rhs0 is None:
        rhs0 = assemble_rhs(config, cells, t=t)
    stage1 = _advance(cells, rhs0, dt, t=t)
    rhs1 = assemble_rhs(config, stage1, t=t)
    stage2 = _advance(stage1, rhs1, dt, t=t)
    return EvolvedState(
        rho1=0.5 * (cells.rho1 + stage2.rho1),
        rho2=0.5 * (cells.rho2 + stage2.rho2),
        K1=0.5 * (cells.K1 + stage2.K1),
        K2=0.5 * (cells.K2 + stage2.K2),
        s1=0.5 * (cells.s1 + stage2.s1),
        s2=0.5 * (cells.s2 + stage2.s2))


def _source_rate_cap(config: SimulationConfig, p: PrimitiveState,
                     theta1, theta2) -> float:
    """Stiffness bound for the algebraic drag/heat sources."""
    k, kappa = config.closures.k, config.closures.kappa
    rate = 0.0
    if k > 0.0:
        rate += k * float(np.max((1.0 / p.rho1 + 1.0 / p.rho2)
                                 * np.maximum(1.0 / theta1, 1.0 / theta2)))
    if kappa > 0.0:
        rate += kappa * float(np.max(np.maximum(
            1.0 / (p.rho1 * theta1 ** 2), 1.0 / (p.rho2 * theta2 ** 2))))
    return rate


def make_report(config: SimulationConfig, cells: EvolvedState, t: float,
                dt: float, rhs: RHSResult) -> TimeStepReport:
    grid = config.grid
    dx = grid.dx
    x = grid.centers()
    p = rhs.primitive
    th = evaluate(config.model, p.rho1, p.rho2, p.s1, p.s2, p.w,
                  need_hessian=False)
    energy_density = (0.5 * p.rho1 * p.u1 ** 2 + 0.5 * p.rho2 * p.u2 ** 2
                      + p.rho1 * config.omega1.value(x)
                      + p.rho2 * config.omega2.value(x) + th.U)
    return TimeStepReport(
        t=t, dt=dt,
        max_speed=float(np.max(rhs.smax)),
        mass1=float(np.sum(p.rho1) * dx),
        mass2=float(np.sum(p.rho2) * dx),
        momentum_K=float(np.sum(p.rho1 * cells.K1 + p.rho2 * cells.K2) * dx),
        momentum_u=float(np.sum(p.rho1 * p.u1 + p.rho2 * p.u2) * dx),
        energy=float(np.sum(energy_density) * dx),
        entropy=float(np.sum(p.rho1 * p.s1 + p.rho2 * p.s2) * dx),
        min_eig_A=float(np.min(rhs.min_eig_A)))


def integrate(config: SimulationConfig, initial: EvolvedState
              ) -> List[Tuple[float, EvolvedState, TimeStepReport]]:
    """Run to t_end, emitting (t, cells, report) at the configured cadence.

    The initial and final states are always included.  A report_interval of
    zero records every step.  Step errors propagate with their time and cell
    location attached.
    """
    grid = config.grid
    cadence = config.report_interval
    if cadence is None:
        cadence = config.t_end / 10.0

    t = 0.0
    cells = initial
    rhs = assemble_rhs(config, cells, t=t)
    out = [(t, cells, make_report(config, cells, t, 0.0, rhs))]
    next_report = cadence if cadence > 0 else 0.0

    while t < config.t_end - 1e-14 * max(1.0, config.t_end):
        smax = float(np.max(rhs.smax))
        dt = config.cfl * grid.dx / max(smax, 1e-30)
        if config.closures.k > 0.0 or config.closures.kappa > 0.0:
            p = rhs.primitive
            th = evaluate(config.model, p.rho1, p.rho2, p.s1, p.s2, p.w,
                          need_hessian=False)
            rate = _source_rate_cap(config, p, th.theta1, th.theta2)
            if rate > 0.0:
                dt = min(dt, 0.5 / rate)
        dt = min(dt, config.t_end - t)
        cells = step(config, cells, dt, t=t, rhs0=rhs)
        t += dt
        rhs = assemble_rhs(config, cells, t=t)
        if t >= next_report - 1e-12 or t >= config.t_end - 1e-14:
            out.append((t, cells, make_report(config, cells, t, dt, rhs)))
            while cadence > 0 and next_report <= t + 1e-12:
                next_report += cadence
    return out


def evolved_from_primitive_profiles(model: PotentialModel, grid: Grid1D,
                                    rho1, rho2, u1, u2, s1, s2
                                    ) -> EvolvedState:
    """Sample primitive profile callables at cell centers and convert."""
    x = grid.centers()
    def _sample(f):
        return np.broadcast_to(np.asarray(f(x) if callable(f) else f,
                                          dtype=float), x.shape).copy()
    p = PrimitiveState(rho1=_sample(rho1), rho2=_sample(rho2),
                       u1=_sample(u1), u2=_sample(u2),
                       s1=_sample(s1), s2=_sample(s2))
    return primitive_to_evolved(model, p)
