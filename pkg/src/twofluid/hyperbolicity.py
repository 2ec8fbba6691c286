"""Legendre transform, Godunov-symmetric form and hyperbolicity mapping.

Mechanical restriction: the entropies are frozen parameters here, so the
Lagrangian density reads L = j1^2/(2 rho1) + j2^2/(2 rho2) - W(rho1, rho2, w)
with j_alpha = rho_alpha u_alpha.  The partial Legendre transform with respect
to the densities,

    G(sigma1, sigma2, j1, j2) = L - sum sigma_a rho_a,
    sigma_a = dL/drho_a (at fixed j),

satisfies dG/dsigma_a = -rho_a and dG/dj_a = K_a, and the system becomes
A u_t + B u_x = 0 with u = (sigma1, sigma2, j1, j2), A = Hess G symmetric,
and B the (constant, symmetric) negated Hessian of the flux potential
sigma1 j1 + sigma2 j2.  Positive definiteness of A implies hyperbolicity;
characteristic speeds solve det(B - lambda A) = 0.

Two routes to A are provided: a per-state route that inverts the Legendre map
(sigma, j) -> (rho, j) by Newton and differences the gradient of G directly
in the (sigma, j) variables, and a fast batched route that differences the
forward maps in (rho, j) and applies the chain rule; the two agree to finite
difference accuracy and the decoupled (a = 0) case has a closed-form oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .potential import RHO_FLOOR, ArrayLike, PotentialModel
from .state import ConvergenceError, PrimitiveState

#: B of the symmetric form A u_t + B u_x = 0: minus the Hessian of the flux
#: potential sigma1 j1 + sigma2 j2 in u = (sigma1, sigma2, j1, j2).
B_MATRIX = -np.array([
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
])

#: Scale-free positive-definiteness threshold for A.
POSDEF_RTOL = 1e-10


class AsymmetryError(RuntimeError):
    """Numerical Hessian of G came out asymmetric beyond tolerance."""


@dataclass(frozen=True, eq=False)
class LegendreVars:
    sigma1: ArrayLike
    sigma2: ArrayLike
    j1: ArrayLike
    j2: ArrayLike
    G: ArrayLike


@dataclass(frozen=True, eq=False)
class SymmetricSystem:
    A: np.ndarray
    B: np.ndarray
    asymmetry_A: float
    asymmetry_B: float
    eig_A: np.ndarray

    @property
    def min_eig_A(self) -> float:
        return float(self.eig_A[0])


@dataclass(frozen=True, eq=False)
class SpeedResult:
    hyperbolic: bool
    speeds: np.ndarray | None
    min_eig_A: float


@dataclass(frozen=True, eq=False)
class StabilityCheck:
    d2W_dw2: float
    d2W_drho1sq: float
    hessian_det2: float
    ineq1: bool
    ineq2: bool
    ineq3: bool

    @property
    def all_hold(self) -> bool:
        return self.ineq1 and self.ineq2 and self.ineq3


@dataclass(frozen=True, eq=False)
class HyperbolicityReport:
    rho1: float
    rho2: float
    w: float
    min_eig_A: float
    ineq1: bool
    ineq2: bool
    ineq3: bool
    speeds: np.ndarray | None
    hyperbolic: bool


def _forward_maps(model, rho1, rho2, j1, j2, s1, s2):
    """(sigma1, sigma2, K1, K2) as functions of (rho, j) at frozen entropies."""
    u1 = j1 / rho1
    u2 = j2 / rho2
    w = u2 - u1
    g = model.gradient(rho1, rho2, s1, s2, w)
    Wr1, Wr2, Ww = g[0], g[1], g[4]
    sigma1 = -0.5 * u1 * u1 - Wr1 - Ww * u1 / rho1
    sigma2 = -0.5 * u2 * u2 - Wr2 + Ww * u2 / rho2
    K1 = u1 + Ww / rho1
    K2 = u2 - Ww / rho2
    return sigma1, sigma2, K1, K2


def _lagrangian_mech(model, rho1, rho2, j1, j2, s1, s2):
    return (0.5 * j1 * j1 / rho1 + 0.5 * j2 * j2 / rho2
            - model.value(rho1, rho2, s1, s2, j2 / rho2 - j1 / rho1))


def legendre_transform(model: PotentialModel, p: PrimitiveState) -> LegendreVars:
    """sigma_a = dL/drho_a at fixed momenta, G = L - sum sigma_a rho_a."""
    j1 = p.rho1 * p.u1
    j2 = p.rho2 * p.u2
    sigma1, sigma2, _, _ = _forward_maps(model, p.rho1, p.rho2, j1, j2, p.s1, p.s2)
    L = _lagrangian_mech(model, p.rho1, p.rho2, j1, j2, p.s1, p.s2)
    return LegendreVars(sigma1=sigma1, sigma2=sigma2, j1=j1, j2=j2,
                        G=L - sigma1 * p.rho1 - sigma2 * p.rho2)


def invert_legendre(model, sigma1_t, sigma2_t, j1, j2, s1, s2, rho_guess,
                    tol: float = 1e-13, max_iter: int = 60):
    """Solve sigma(rho; j) = sigma_target for (rho1, rho2) by damped Newton."""
    rho = np.array(rho_guess, dtype=float)
    scale = max(1.0, abs(sigma1_t), abs(sigma2_t))
    for _ in range(max_iter):
        s1v, s2v, _, _ = _forward_maps(model, rho[0], rho[1], j1, j2, s1, s2)
        res = np.array([s1v - sigma1_t, s2v - sigma2_t])
        if np.max(np.abs(res)) <= tol * scale:
            return rho
        J = np.empty((2, 2))
        for i in range(2):
            h = 1e-7 * max(1.0, rho[i])
            rp = rho.copy()
            rp[i] += h
            rm = rho.copy()
            rm[i] -= h
            sp = _forward_maps(model, rp[0], rp[1], j1, j2, s1, s2)
            sm = _forward_maps(model, rm[0], rm[1], j1, j2, s1, s2)
            J[0, i] = (sp[0] - sm[0]) / (2.0 * h)
            J[1, i] = (sp[1] - sm[1]) / (2.0 * h)
        try:
            step = np.linalg.solve(J, res)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular Jacobian in Legendre inversion: {exc}")
        new = rho - step
        tries = 0
        while np.min(new) <= RHO_FLOOR and tries < 60:
            step *= 0.5
            new = rho - step
            tries += 1
        if np.min(new) <= RHO_FLOOR:
            raise ConvergenceError("Legendre inversion left the admissible set")
        rho = new
    raise ConvergenceError("Legendre inversion did not converge")


def _grad_g_of_u(model, u4, s1, s2, rho_guess):
    """gradient of G, i.e. (-rho1, -rho2, K1, K2), at (sigma, j)."""
    rho = invert_legendre(model, u4[0], u4[1], u4[2], u4[3], s1, s2, rho_guess)
    _, _, K1, K2 = _forward_maps(model, rho[0], rho[1], u4[2], u4[3], s1, s2)
    return np.array([-rho[0], -rho[1], K1, K2]), rho


def legendre_G_value(model, sigma1, sigma2, j1, j2, s1, s2, rho_guess):
    """G evaluated at arbitrary (sigma, j) through Newton inversion."""
    rho = invert_legendre(model, sigma1, sigma2, j1, j2, s1, s2, rho_guess)
    L = _lagrangian_mech(model, rho[0], rho[1], j1, j2, s1, s2)
    return L - sigma1 * rho[0] - sigma2 * rho[1]


def check_legendre_identities(model: PotentialModel, p: PrimitiveState,
                              h: float = 1e-5) -> float:
    """Finite-difference check of dG/dsigma_a = -rho_a and dG/dj_a = K_a.

    Returns the worst relative error over the four identities.
    """
    lv = legendre_transform(model, p)
    u0 = np.array([lv.sigma1, lv.sigma2, lv.j1, lv.j2], dtype=float)
    rho0 = np.array([p.rho1, p.rho2], dtype=float)
    _, _, K1, K2 = _forward_maps(model, p.rho1, p.rho2, lv.j1, lv.j2, p.s1, p.s2)
    expect = np.array([-p.rho1, -p.rho2, K1, K2], dtype=float)
    worst = 0.0
    for i in range(4):
        hi = h * max(1.0, abs(u0[i]))
        up = u0.copy()
        up[i] += hi
        um = u0.copy()
        um[i] -= hi
        gp = legendre_G_value(model, up[0], up[1], up[2], up[3], p.s1, p.s2, rho0)
        gm = legendre_G_value(model, um[0], um[1], um[2], um[3], p.s1, p.s2, rho0)
        num = (gp - gm) / (2.0 * hi)
        worst = max(worst, abs(num - expect[i]) / max(1.0, abs(expect[i])))
    return worst


def assemble_symmetric_system(model: PotentialModel, p: PrimitiveState,
                              h: float = 1e-5,
                              asym_tol: float = 1e-6) -> SymmetricSystem:
    """A = Hess G by central differences of (-rho, K) in (sigma, j).

    The raw matrix is symmetrized by (A + A^T)/2; the pre-symmetrization
    asymmetry is reported and an error is raised when it exceeds ``asym_tol``
    (a bad Hessian or inadmissible state).
    """
    lv = legendre_transform(model, p)
    u0 = np.array([lv.sigma1, lv.sigma2, lv.j1, lv.j2], dtype=float)
    rho0 = np.array([p.rho1, p.rho2], dtype=float)
    A = np.empty((4, 4))
    for i in range(4):
        hi = h * max(1.0, abs(u0[i]))
        up = u0.copy()
        up[i] += hi
        um = u0.copy()
        um[i] -= hi
        gp, _ = _grad_g_of_u(model, up, p.s1, p.s2, rho0)
        gm, _ = _grad_g_of_u(model, um, p.s1, p.s2, rho0)
        A[:, i] = (gp - gm) / (2.0 * hi)
    scale = np.linalg.norm(A)
    asym = float(np.linalg.norm(A - A.T) / scale) if scale > 0 else 0.0
    if asym > asym_tol:
        raise AsymmetryError(
            f"Hessian of G asymmetric: {asym:g} relative (tolerance {asym_tol:g})")
    A = 0.5 * (A + A.T)
    return SymmetricSystem(A=A, B=B_MATRIX.copy(), asymmetry_A=asym,
                           asymmetry_B=0.0, eig_A=np.linalg.eigvalsh(A))


def characteristic_speeds(sys: SymmetricSystem) -> SpeedResult:
    """Roots of det(B - lambda A) = 0; real and sorted when A is pos. def."""
    scale = float(np.linalg.norm(sys.A))
    min_eig = sys.min_eig_A
    if min_eig <= POSDEF_RTOL * scale:
        return SpeedResult(hyperbolic=False, speeds=None, min_eig_A=min_eig)
    lam = scipy.linalg.eigh(sys.B, sys.A, eigvals_only=True)
    return SpeedResult(hyperbolic=True, speeds=np.sort(lam), min_eig_A=min_eig)


def check_stability_inequalities(model: PotentialModel,
                                 p: PrimitiveState) -> StabilityCheck:
    """The three convexity conditions sufficient for small-w hyperbolicity."""
    H = model.hessian(p.rho1, p.rho2, p.s1, p.s2, p.w)
    ww = float(H[4, 4])
    r11 = float(H[0, 0])
    det2 = float(H[0, 0] * H[1, 1] - H[0, 1] ** 2)
    return StabilityCheck(d2W_dw2=ww, d2W_drho1sq=r11, hessian_det2=det2,
                          ineq1=ww < 0.0, ineq2=r11 > 0.0, ineq3=det2 > 0.0)


def mixture_rest_state(rho1: float, rho2: float, w: float,
                       s1: float, s2: float) -> PrimitiveState:
    """State with relative velocity w in the zero-mixture-momentum frame."""
    rho = rho1 + rho2
    return PrimitiveState(rho1=rho1, rho2=rho2,
                          u1=-rho2 * w / rho, u2=rho1 * w / rho, s1=s1, s2=s2)


def map_hyperbolic_region(model: PotentialModel, rho1_vals, rho2_vals, w_vals,
                          s1: float = 0.0, s2: float = 0.0):
    """One :class:`HyperbolicityReport` per grid point over (rho1, rho2, w).

    States are evaluated in the zero-mixture-momentum frame.  Failures are
    recorded per point, never raised.
    """
    reports = []
    for r1 in np.atleast_1d(rho1_vals):
        for r2 in np.atleast_1d(rho2_vals):
            for w in np.atleast_1d(w_vals):
                p = mixture_rest_state(float(r1), float(r2), float(w), s1, s2)
                ineq = check_stability_inequalities(model, p)
                try:
                    A = symmetric_system_batch(model, p.rho1, p.rho2,
                                               p.u1, p.u2, p.s1, p.s2)
                    eig_A = np.linalg.eigvalsh(0.5 * (A + A.T))
                    min_eig = float(eig_A[0])
                    hyperbolic = min_eig > POSDEF_RTOL * float(np.linalg.norm(A))
                    speeds = None
                    if hyperbolic:
                        speeds = np.sort(scipy.linalg.eigh(
                            B_MATRIX, 0.5 * (A + A.T), eigvals_only=True))
                    reports.append(HyperbolicityReport(
                        rho1=float(r1), rho2=float(r2), w=float(w),
                        min_eig_A=min_eig, ineq1=ineq.ineq1,
                        ineq2=ineq.ineq2, ineq3=ineq.ineq3,
                        speeds=speeds, hyperbolic=hyperbolic))
                except (ConvergenceError, np.linalg.LinAlgError):
                    reports.append(HyperbolicityReport(
                        rho1=float(r1), rho2=float(r2), w=float(w),
                        min_eig_A=float("nan"), ineq1=ineq.ineq1,
                        ineq2=ineq.ineq2, ineq3=ineq.ineq3,
                        speeds=None, hyperbolic=False))
    return reports


def _scaled_min_eig(model, rho1, rho2, w, s1, s2) -> float:
    # batched route: well conditioned even where the (sigma, j) map is nearly
    # singular, which is exactly where the crossing sits
    p = mixture_rest_state(rho1, rho2, w, s1, s2)
    A = symmetric_system_batch(model, p.rho1, p.rho2, p.u1, p.u2, p.s1, p.s2)
    A = 0.5 * (A + A.T)
    return float(np.linalg.eigvalsh(A)[0]) / float(np.linalg.norm(A))


def critical_relative_velocity(model: PotentialModel, rho1: float, rho2: float,
                               s1: float = 0.0, s2: float = 0.0,
                               w_max: float = 20.0, n_scan: int = 64,
                               rel_tol: float = 1e-6):
    """Bisect the w* where min-eig(A) crosses zero at fixed densities.

    Scans w upward from 0 in the zero-mixture-momentum frame; returns None if
    no sign change is found below ``w_max``.
    """
    ws = np.linspace(0.0, w_max, n_scan + 1)
    prev_w, prev_m = ws[0], _scaled_min_eig(model, rho1, rho2, ws[0], s1, s2)
    if prev_m <= 0.0:
        return 0.0
    for w in ws[1:]:
        m = _scaled_min_eig(model, rho1, rho2, float(w), s1, s2)
        if m <= 0.0:
            lo, hi = prev_w, float(w)
            while hi - lo > rel_tol * hi:
                mid = 0.5 * (lo + hi)
                if _scaled_min_eig(model, rho1, rho2, mid, s1, s2) > 0.0:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
        prev_w, prev_m = float(w), m
    return None


def symmetric_system_batch(model: PotentialModel, rho1, rho2, u1, u2, s1, s2,
                           h: float = 1e-6):
    """Batched A = Hess G via chain rule through the (rho, j) variables.

    Differences the forward maps sigma(rho, j), K(rho, j) in (rho, j) and
    solves A = J_gradG . J_u^{-1} cellwise.  Returns an (..., 4, 4) stack.
    """
    rho1, rho2, u1, u2, s1, s2 = np.broadcast_arrays(
        *[np.asarray(a, dtype=float) for a in (rho1, rho2, u1, u2, s1, s2)])
    shape = rho1.shape
    j1 = rho1 * u1
    j2 = rho2 * u2
    m = [rho1, rho2, j1, j2]

    Ju = np.zeros(shape + (4, 4))
    Jg = np.zeros(shape + (4, 4))
    # rows for j in u = (sigma1, sigma2, j1, j2) and -rho in gradG are exact
    Ju[..., 2, 2] = 1.0
    Ju[..., 3, 3] = 1.0
    Jg[..., 0, 0] = -1.0
    Jg[..., 1, 1] = -1.0
    for i in range(4):
        hi = h * np.maximum(1.0, np.abs(m[i]))
        mp = list(m)
        mp[i] = m[i] + hi
        mm = list(m)
        mm[i] = m[i] - hi
        fp = _forward_maps(model, mp[0], mp[1], mp[2], mp[3], s1, s2)
        fm = _forward_maps(model, mm[0], mm[1], mm[2], mm[3], s1, s2)
        inv2h = 1.0 / (2.0 * hi)
        Ju[..., 0, i] = (fp[0] - fm[0]) * inv2h
        Ju[..., 1, i] = (fp[1] - fm[1]) * inv2h
        Jg[..., 2, i] = (fp[2] - fm[2]) * inv2h
        Jg[..., 3, i] = (fp[3] - fm[3]) * inv2h
    # A Ju = Jg  =>  Ju^T A^T = Jg^T
    At = np.linalg.solve(np.swapaxes(Ju, -1, -2), np.swapaxes(Jg, -1, -2))
    return np.swapaxes(At, -1, -2)


def wave_speeds_batch(model: PotentialModel, rho1, rho2, u1, u2, s1, s2,
                      imag_rtol: float = 1e-6):
    """Characteristic speeds per state, batched; (speeds, ok_mask, min_eig_A).

    ``ok_mask`` is False where the quartet of speeds has a significant
    imaginary part (hyperbolicity loss); those speeds hold real parts only.
    """
    A = symmetric_system_batch(model, rho1, rho2, u1, u2, s1, s2)
    try:
        M = np.linalg.solve(A, np.broadcast_to(B_MATRIX, A.shape))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"singular A while computing wave speeds: {exc}")
    ev = np.linalg.eigvals(M)
    scale = np.max(np.abs(ev), axis=-1) + 1.0
    ok = np.max(np.abs(ev.imag), axis=-1) <= imag_rtol * scale
    Asym = 0.5 * (A + np.swapaxes(A, -1, -2))
    min_eig = np.linalg.eigvalsh(Asym)[..., 0]
    return np.sort(ev.real, axis=-1), ok, min_eig
