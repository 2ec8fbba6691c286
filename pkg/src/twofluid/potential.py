"""Constitutive potential W(rho1, rho2, s1, s2, w) and quantities derived from it.

The mixture is described per unit volume by a single potential W depending on
the component densities, the specific entropies and the relative velocity
w = u2 - u1 (the only velocity combination allowed by Galilean invariance).
Everything downstream -- temperatures, internal energy, generalized momenta,
hyperbolicity matrices -- is built from W and its first and second partials.

All evaluation routines broadcast over numpy arrays.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

#: Hard admissibility floor for densities.  Below this we refuse to evaluate
#: rather than clip: silent clipping would corrupt conservation checks.
RHO_FLOOR = 1e-12

#: Variable ordering used for gradients and Hessians.
VAR_NAMES = ("rho1", "rho2", "s1", "s2", "w")

_FD_REL_STEP = float(np.finfo(float).eps) ** (1.0 / 3.0)


class AdmissibilityError(ValueError):
    """Raised when a state leaves the admissible set rho_alpha > 0."""


def require_admissible(rho1: ArrayLike, rho2: ArrayLike) -> None:
    """Raise :class:`AdmissibilityError` naming the offending component."""
    for name, rho in (("rho1", rho1), ("rho2", rho2)):
        arr = np.asarray(rho, dtype=float)
        if not np.all(np.isfinite(arr)) or np.min(arr) < RHO_FLOOR:
            raise AdmissibilityError(
                f"{name} must stay above {RHO_FLOOR:g}; got min {np.min(arr):g}"
            )


def _fd_step(x: np.ndarray) -> np.ndarray:
    return _FD_REL_STEP * np.maximum(1.0, np.abs(x))


class PotentialModel(ABC):
    """Abstract constitutive law.

    Subclasses must implement :meth:`value`.  Analytic ``gradient`` /
    ``hessian`` overrides are used when present; otherwise central finite
    differences of ``value`` (step eps**(1/3) * max(1, |x|) per variable)
    supply the derivatives, so user laws without analytic Hessians still work.

    Models are immutable after construction; all evaluations are pure.
    """

    @abstractmethod
    def value(self, rho1, rho2, s1, s2, w):
        """W per unit volume of the mixture."""

    def gradient(self, rho1, rho2, s1, s2, w):
        """First partials of W, stacked in :data:`VAR_NAMES` order."""
        args = [np.asarray(a, dtype=float) for a in (rho1, rho2, s1, s2, w)]
        out = []
        for i, xi in enumerate(args):
            h = _fd_step(xi)
            plus = list(args)
            plus[i] = xi + h
            minus = list(args)
            minus[i] = xi - h
            out.append(np.asarray(self.value(*plus) - self.value(*minus)) / (2.0 * h))
        return np.stack(np.broadcast_arrays(*out))

    def hessian(self, rho1, rho2, s1, s2, w):
        """Second partials, ``H[i, j] = d2 W / dx_i dx_j`` in VAR_NAMES order."""
        args = [np.asarray(a, dtype=float) for a in (rho1, rho2, s1, s2, w)]
        rows = []
        for i, xi in enumerate(args):
            h = _fd_step(xi)
            plus = list(args)
            plus[i] = xi + h
            minus = list(args)
            minus[i] = xi - h
            gp = self.gradient(*plus)
            gm = self.gradient(*minus)
            rows.append((gp - gm) / (2.0 * h))
        return np.stack(np.broadcast_arrays(*rows))

    def dW_dw(self, rho1, rho2, s1, s2, w):
        return self.gradient(rho1, rho2, s1, s2, w)[4]

    def d2W_dw2(self, rho1, rho2, s1, s2, w):
        return self.hessian(rho1, rho2, s1, s2, w)[4, 4]


@dataclass(frozen=True, eq=False)
class ThermoEval:
    """Point-evaluated thermodynamic bundle at one state.

    ``grad`` and ``hess`` follow the :data:`VAR_NAMES` ordering; ``i_star``
    is -dW/dw, the momentum-exchange covector of the added-mass coupling.
    """

    W: ArrayLike
    U: ArrayLike
    theta1: ArrayLike
    theta2: ArrayLike
    i_star: ArrayLike
    grad: np.ndarray
    hess: np.ndarray | None

    @property
    def W_rho1(self):
        return self.grad[0]

    @property
    def W_rho2(self):
        return self.grad[1]

    @property
    def W_s1(self):
        return self.grad[2]

    @property
    def W_s2(self):
        return self.grad[3]

    @property
    def W_w(self):
        return self.grad[4]

    @property
    def W_rho1rho1(self):
        return self.hess[0, 0]

    @property
    def W_rho1rho2(self):
        return self.hess[0, 1]

    @property
    def W_rho2rho2(self):
        return self.hess[1, 1]

    @property
    def W_rho1w(self):
        return self.hess[0, 4]

    @property
    def W_rho2w(self):
        return self.hess[1, 4]

    @property
    def W_ww(self):
        return self.hess[4, 4]


def evaluate(model: PotentialModel, rho1, rho2, s1, s2, w,
             need_hessian: bool = True) -> ThermoEval:
    """Evaluate W and all derived quantities at raw state components."""
    require_admissible(rho1, rho2)
    W = model.value(rho1, rho2, s1, s2, w)
    grad = model.gradient(rho1, rho2, s1, s2, w)
    hess = model.hessian(rho1, rho2, s1, s2, w) if need_hessian else None
    Ww = grad[4]
    return ThermoEval(
        W=W,
        U=W - Ww * w,
        theta1=grad[2] / rho1,
        theta2=grad[3] / rho2,
        i_star=-Ww,
        grad=grad,
        hess=hess,
    )


def eval_potential(model: PotentialModel, state) -> ThermoEval:
    """Evaluate the potential bundle at a primitive state."""
    return evaluate(model, state.rho1, state.rho2, state.s1, state.s2, state.w)


def eval_lagrangian(model: PotentialModel, state, omega1=0.0, omega2=0.0):
    """Energy density sum(rho u^2 / 2 - rho Omega) - W."""
    require_admissible(state.rho1, state.rho2)
    W = model.value(state.rho1, state.rho2, state.s1, state.s2, state.w)
    kinetic = 0.5 * state.rho1 * state.u1 ** 2 + 0.5 * state.rho2 * state.u2 ** 2
    return kinetic - state.rho1 * omega1 - state.rho2 * omega2 - W


def fd_check_derivatives(model: PotentialModel, state, h: float = 1e-5) -> float:
    """Compare analytic partials against central differences of step ``h``.

    Returns the worst relative discrepancy over all first and second partials.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    args = [np.asarray(a, dtype=float)
            for a in (state.rho1, state.rho2, state.s1, state.s2, state.w)]
    if np.min(args[0]) - 2 * h <= RHO_FLOOR or np.min(args[1]) - 2 * h <= RHO_FLOOR:
        raise AdmissibilityError(
            f"state too close to the density floor for an h={h:g} stencil")
    require_admissible(args[0], args[1])

    def _fd(fn, i):
        plus = list(args)
        plus[i] = args[i] + h
        minus = list(args)
        minus[i] = args[i] - h
        return (np.asarray(fn(*plus), dtype=float)
                - np.asarray(fn(*minus), dtype=float)) / (2.0 * h)

    worst = 0.0
    ana_grad = model.gradient(*args)
    for i in range(5):
        num = _fd(model.value, i)
        err = np.abs(ana_grad[i] - num) / np.maximum(
            1.0, np.maximum(np.abs(ana_grad[i]), np.abs(num)))
        worst = max(worst, float(np.max(err)))
    ana_hess = model.hessian(*args)
    for i in range(5):
        num_row = _fd(model.gradient, i)
        err = np.abs(ana_hess[i] - num_row) / np.maximum(
            1.0, np.maximum(np.abs(ana_hess[i]), np.abs(num_row)))
        worst = max(worst, float(np.max(err)))
    return worst


@dataclass(frozen=True)
class SeparableAddedMassParams:
    """Parameters of the built-in law W = W1(rho1,s1) + W2(rho2,s2) - a w^2 / 2.

    Each phase is polytropic: W_a = rho_a * e_a with
    e_a = (K_a / (gamma_a - 1)) rho_a^(gamma_a - 1) exp((s_a - s0_a)/cv_a).
    The added-mass coefficient ``a`` is a nonnegative constant or an optional
    callable a(rho1, rho2) (its density derivatives are then taken by finite
    differences).
    """

    gamma1: float
    gamma2: float
    cv1: float = 1.0
    cv2: float = 1.0
    K1: float = 1.0
    K2: float = 1.0
    s01: float = 0.0
    s02: float = 0.0
    a: Union[float, Callable] = 0.0

    def __post_init__(self):
        for name in ("gamma1", "gamma2"):
            if getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must exceed 1")
        for name in ("cv1", "cv2", "K1", "K2"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if not callable(self.a) and self.a < 0.0:
            raise ValueError("a must be nonnegative")


class SeparableAddedMass(PotentialModel):
    """Built-in separable polytropic law with quadratic added-mass coupling."""

    def __init__(self, params: SeparableAddedMassParams):
        self.params = params

    def _phase(self, idx: int, rho, s):
        p = self.params
        if idx == 1:
            gamma, cv, K0, s0 = p.gamma1, p.cv1, p.K1, p.s01
        else:
            gamma, cv, K0, s0 = p.gamma2, p.cv2, p.K2, p.s02
        e = (K0 / (gamma - 1.0)) * np.asarray(rho, dtype=float) ** (gamma - 1.0) \
            * np.exp((np.asarray(s, dtype=float) - s0) / cv)
        return e, gamma, cv

    def _a_derivs(self, rho1, rho2):
        """(a, a_r1, a_r2, a_r1r1, a_r1r2, a_r2r2) with FD for callable a."""
        a = self.params.a
        if not callable(a):
            z = np.zeros(np.broadcast(rho1, rho2).shape)
            return float(a) + z, z, z, z, z, z
        r1 = np.asarray(rho1, dtype=float)
        r2 = np.asarray(rho2, dtype=float)
        h1 = _fd_step(r1)
        h2 = _fd_step(r2)
        a0 = np.asarray(a(r1, r2), dtype=float)
        ap1, am1 = a(r1 + h1, r2), a(r1 - h1, r2)
        ap2, am2 = a(r1, r2 + h2), a(r1, r2 - h2)
        a_r1 = (ap1 - am1) / (2.0 * h1)
        a_r2 = (ap2 - am2) / (2.0 * h2)
        a_r1r1 = (ap1 - 2.0 * a0 + am1) / h1 ** 2
        a_r2r2 = (ap2 - 2.0 * a0 + am2) / h2 ** 2
        a_r1r2 = (np.asarray(a(r1 + h1, r2 + h2), dtype=float)
                  - a(r1 + h1, r2 - h2) - a(r1 - h1, r2 + h2)
                  + a(r1 - h1, r2 - h2)) / (4.0 * h1 * h2)
        out = np.broadcast_arrays(a0, a_r1, a_r2, a_r1r1, a_r1r2, a_r2r2)
        return tuple(out)

    def value(self, rho1, rho2, s1, s2, w):
        e1, _, _ = self._phase(1, rho1, s1)
        e2, _, _ = self._phase(2, rho2, s2)
        a = self._a_derivs(rho1, rho2)[0]
        return rho1 * e1 + rho2 * e2 - 0.5 * a * np.asarray(w, dtype=float) ** 2

    def gradient(self, rho1, rho2, s1, s2, w):
        e1, g1, cv1 = self._phase(1, rho1, s1)
        e2, g2, cv2 = self._phase(2, rho2, s2)
        a, a1, a2, *_ = self._a_derivs(rho1, rho2)
        w = np.asarray(w, dtype=float)
        out = (
            g1 * e1 - 0.5 * a1 * w ** 2,
            g2 * e2 - 0.5 * a2 * w ** 2,
            rho1 * e1 / cv1,
            rho2 * e2 / cv2,
            -a * w,
        )
        return np.stack(np.broadcast_arrays(*out))

    def hessian(self, rho1, rho2, s1, s2, w):
        e1, g1, cv1 = self._phase(1, rho1, s1)
        e2, g2, cv2 = self._phase(2, rho2, s2)
        a, a1, a2, a11, a12, a22 = self._a_derivs(rho1, rho2)
        w = np.asarray(w, dtype=float)
        shape = np.broadcast(rho1, rho2, s1, s2, w).shape
        H = np.zeros((5, 5) + shape)
        H[0, 0] = g1 * (g1 - 1.0) * e1 / rho1 - 0.5 * a11 * w ** 2
        H[1, 1] = g2 * (g2 - 1.0) * e2 / rho2 - 0.5 * a22 * w ** 2
        H[0, 1] = H[1, 0] = -0.5 * a12 * w ** 2
        H[0, 2] = H[2, 0] = g1 * e1 / cv1
        H[1, 3] = H[3, 1] = g2 * e2 / cv2
        H[2, 2] = rho1 * e1 / cv1 ** 2
        H[3, 3] = rho2 * e2 / cv2 ** 2
        H[0, 4] = H[4, 0] = -a1 * w
        H[1, 4] = H[4, 1] = -a2 * w
        H[4, 4] = -a
        return H

    def dW_dw(self, rho1, rho2, s1, s2, w):
        a = self._a_derivs(rho1, rho2)[0]
        return -a * np.asarray(w, dtype=float)

    def d2W_dw2(self, rho1, rho2, s1, s2, w):
        a = self._a_derivs(rho1, rho2)[0]
        return -a + np.zeros(np.broadcast(rho1, rho2, w).shape)

    def sound_speed_sq(self, idx: int, rho, s):
        """Single-phase sound speed squared rho * d2W_a/drho_a^2."""
        e, gamma, _ = self._phase(idx, rho, s)
        return gamma * (gamma - 1.0) * e
