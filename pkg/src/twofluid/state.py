"""State representations and the dynamic quantities K_alpha, R_alpha, mu_alpha.

Two equivalent descriptions of a point state are used:

* primitive: (rho1, rho2, u1, u2, s1, s2), with w = u2 - u1 derived;
* evolved:   (rho1, rho2, K1, K2, s1, s2), the variables the 1D solver
  integrates.  K_alpha = u_alpha - (-1)^alpha (1/rho_alpha) dW/dw is the
  generalized velocity; rho_alpha K_alpha (not rho_alpha u_alpha) is the
  impulse of the component.

Converting evolved -> primitive requires a scalar nonlinear solve for the
relative velocity w; a safeguarded Newton iteration with a bisection fallback
is used, vectorized over arrays of states.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potential import (ArrayLike, PotentialModel, evaluate, require_admissible)


class ConvergenceError(RuntimeError):
    """Velocity recovery failed (no bracket or no convergence)."""


@dataclass(frozen=True, eq=False)
class PrimitiveState:
    rho1: ArrayLike
    rho2: ArrayLike
    u1: ArrayLike
    u2: ArrayLike
    s1: ArrayLike
    s2: ArrayLike

    def __post_init__(self):
        require_admissible(self.rho1, self.rho2)

    @property
    def w(self):
        return self.u2 - self.u1


@dataclass(frozen=True, eq=False)
class EvolvedState:
    rho1: ArrayLike
    rho2: ArrayLike
    K1: ArrayLike
    K2: ArrayLike
    s1: ArrayLike
    s2: ArrayLike

    def __post_init__(self):
        require_admissible(self.rho1, self.rho2)


@dataclass(frozen=True, eq=False)
class DynamicQuantities:
    R1: ArrayLike
    R2: ArrayLike
    K1: ArrayLike
    K2: ArrayLike
    theta1: ArrayLike
    theta2: ArrayLike
    mu1: ArrayLike
    mu2: ArrayLike
    mu: ArrayLike


@dataclass(frozen=True, eq=False)
class MixtureAggregates:
    rho: ArrayLike
    momentum: ArrayLike
    u: ArrayLike


def primitive_to_evolved(model: PotentialModel, p: PrimitiveState) -> EvolvedState:
    """K1 = u1 + (1/rho1) dW/dw, K2 = u2 - (1/rho2) dW/dw."""
    Ww = model.dW_dw(p.rho1, p.rho2, p.s1, p.s2, p.w)
    return EvolvedState(rho1=p.rho1, rho2=p.rho2,
                        K1=p.u1 + Ww / p.rho1, K2=p.u2 - Ww / p.rho2,
                        s1=p.s1, s2=p.s2)


def _bracket_w(model, rho1, rho2, s1, s2, invsum, dK):
    """Expand a symmetric bracket around dK until g changes sign."""

    def g(w):
        return w - invsum * model.dW_dw(rho1, rho2, s1, s2, w) - dK

    delta = np.abs(dK) + 1.0
    lo = dK - delta
    hi = dK + delta
    glo = g(lo)
    ghi = g(hi)
    for _ in range(40):
        need = glo * ghi > 0.0
        if not np.any(need):
            break
        delta = np.where(need, 2.0 * delta, delta)
        lo = dK - delta
        hi = dK + delta
        glo = g(lo)
        ghi = g(hi)
    if np.any(glo * ghi > 0.0):
        bad = glo * ghi > 0.0
        raise ConvergenceError(
            "no sign change while bracketing the relative velocity "
            "(recovery map appears non-monotone: hyperbolicity loss territory); "
            f"worst bracket half-width {float(np.max(np.where(bad, delta, 0.0))):g}, "
            f"g(lo)={float(np.max(np.where(bad, glo, 0.0))):g}, "
            f"g(hi)={float(np.max(np.where(bad, ghi, 0.0))):g}")
    return g, lo, hi, glo, ghi


def solve_relative_velocity(model: PotentialModel, rho1, rho2, s1, s2, dK,
                            tol=None, max_iter: int = 100):
    """Solve w - (1/rho1 + 1/rho2) dW/dw(w) = dK by safeguarded Newton.

    ``dK`` is K2 - K1.  Works elementwise on arrays.  Raises
    :class:`ConvergenceError` when the map cannot be bracketed or the
    iteration stalls.
    """
    rho1, rho2, s1, s2, dK = np.broadcast_arrays(
        *[np.asarray(a, dtype=float) for a in (rho1, rho2, s1, s2, dK)])
    if tol is None:
        tol = 1e-12 * np.maximum(1.0, np.abs(dK))
    invsum = 1.0 / rho1 + 1.0 / rho2
    g, lo, hi, glo, ghi = _bracket_w(model, rho1, rho2, s1, s2, invsum, dK)

    w = dK.copy()
    for _ in range(max_iter):
        gw = g(w)
        done = np.abs(gw) <= tol
        if np.all(done):
            return w
        # shrink the bracket around the current iterate
        side_lo = gw * glo > 0.0
        lo = np.where(side_lo, w, lo)
        glo = np.where(side_lo, gw, glo)
        hi = np.where(side_lo | (gw == 0.0), hi, w)
        ghi = np.where(side_lo | (gw == 0.0), ghi, gw)
        gp = 1.0 - invsum * np.asarray(
            model.d2W_dw2(rho1, rho2, s1, s2, w), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            wn = w - gw / gp
        inside = (np.isfinite(wn)
                  & (wn > np.minimum(lo, hi)) & (wn < np.maximum(lo, hi)))
        wn = np.where(inside, wn, 0.5 * (lo + hi))
        w = np.where(done, w, wn)
    raise ConvergenceError(
        f"velocity recovery did not converge in {max_iter} iterations; "
        f"max residual {float(np.max(np.abs(g(w)))):g}")


def solve_relative_velocity_bisection(model: PotentialModel, rho1, rho2, s1, s2,
                                      dK, tol=None, max_iter: int = 200):
    """Pure-bisection oracle for the relative-velocity solve."""
    rho1, rho2, s1, s2, dK = np.broadcast_arrays(
        *[np.asarray(a, dtype=float) for a in (rho1, rho2, s1, s2, dK)])
    if tol is None:
        tol = 1e-12 * np.maximum(1.0, np.abs(dK))
    invsum = 1.0 / rho1 + 1.0 / rho2
    g, lo, hi, glo, ghi = _bracket_w(model, rho1, rho2, s1, s2, invsum, dK)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if np.all(np.abs(gm) <= tol):
            return mid
        side_lo = gm * glo > 0.0
        lo = np.where(side_lo, mid, lo)
        glo = np.where(side_lo, gm, glo)
        hi = np.where(side_lo | (gm == 0.0), hi, mid)
        ghi = np.where(side_lo | (gm == 0.0), ghi, gm)
    raise ConvergenceError("bisection did not converge")


def evolved_to_primitive(model: PotentialModel, e: EvolvedState) -> PrimitiveState:
    """Invert the K_alpha definition for the velocities.

    Solves K2 - K1 = w - (1/rho1 + 1/rho2) dW/dw(w) for w, then
    u1 = K1 - (1/rho1) dW/dw.  The residual is driven below
    1e-12 * max(1, |K1|, |K2|).
    """
    dK = np.asarray(e.K2, dtype=float) - np.asarray(e.K1, dtype=float)
    tol = 1e-12 * np.maximum(1.0, np.maximum(np.abs(e.K1), np.abs(e.K2)))
    w = solve_relative_velocity(model, e.rho1, e.rho2, e.s1, e.s2, dK, tol=tol)
    Ww = model.dW_dw(e.rho1, e.rho2, e.s1, e.s2, w)
    u1 = e.K1 - Ww / e.rho1
    return PrimitiveState(rho1=e.rho1, rho2=e.rho2, u1=u1, u2=u1 + w,
                          s1=e.s1, s2=e.s2)


def dynamic_quantities(model: PotentialModel, p: PrimitiveState,
                       omega1=0.0, omega2=0.0, theta0: float = 1.0
                       ) -> DynamicQuantities:
    """R_alpha, K_alpha, theta_alpha and chemical potentials at one state.

    theta0 is the reference temperature entering mu_alpha = dW/drho_alpha
    - theta0 s_alpha (the isothermal Fick limit fixes it externally).
    """
    th = evaluate(model, p.rho1, p.rho2, p.s1, p.s2, p.w, need_hessian=False)
    mu1 = th.W_rho1 - theta0 * p.s1
    mu2 = th.W_rho2 - theta0 * p.s2
    return DynamicQuantities(
        R1=0.5 * p.u1 ** 2 - th.W_rho1 - omega1,
        R2=0.5 * p.u2 ** 2 - th.W_rho2 - omega2,
        K1=p.u1 + th.W_w / p.rho1,
        K2=p.u2 - th.W_w / p.rho2,
        theta1=th.theta1,
        theta2=th.theta2,
        mu1=mu1,
        mu2=mu2,
        mu=mu2 - mu1,
    )


def mixture_aggregates(p: PrimitiveState) -> MixtureAggregates:
    rho = p.rho1 + p.rho2
    momentum = p.rho1 * p.u1 + p.rho2 * p.u2
    return MixtureAggregates(rho=rho, momentum=momentum, u=momentum / rho)
