"""Tests for the identity-verification module."""
import math

import numpy as np
import pytest

from twofluid.closures import ClosureParams
from twofluid.potential import SeparableAddedMass, SeparableAddedMassParams
from twofluid.solver import (Grid1D, SimulationConfig,
                             evolved_from_primitive_profiles, integrate)
from twofluid.state import PrimitiveState, evolved_to_primitive
from twofluid.verify import (ManufacturedField, balance_subidentities,
                             conservation_drift, fick_residual,
                             gibbs_residual, random_trig_fields,
                             single_fluid_reduction, single_fluid_reference)


def make_model(a=0.3):
    return SeparableAddedMass(SeparableAddedMassParams(
        gamma1=2.0, gamma2=1.4, a=a))


def constant_field(rho1=1.0, rho2=0.8, u1=0.1, u2=0.3, s1=0.0, s2=0.1,
                   om1=0.0, om2=0.0):
    def const(v):
        return lambda t, x: v + 0.0 * (t + x)
    return ManufacturedField(rho1=const(rho1), rho2=const(rho2),
                             u1=const(u1), u2=const(u2),
                             s1=const(s1), s2=const(s2),
                             omega1=const(om1), omega2=const(om2))


class TestGibbsResidual:
    def test_constant_fields_all_zero(self):
        res = gibbs_residual(make_model(), ClosureParams(), constant_field(),
                             (0.3, 0.4), 1e-3)
        # constant fields with equal velocities would be trivial; here the
        # velocities differ so drag terms are nonzero only if k > 0
        assert res.B1 == 0.0 and res.B2 == 0.0
        assert res.E == 0.0
        assert res.combination == pytest.approx(0.0, abs=1e-14)

    def test_constant_fields_with_drag(self):
        res = gibbs_residual(make_model(), ClosureParams(k=2.0, kappa=1.0),
                             constant_field(), (0.3, 0.4), 1e-3)
        # M_a and S pick up the algebraic drag terms but the combination
        # still cancels exactly
        assert res.combination == pytest.approx(0.0, abs=1e-13)

    def test_second_order_convergence(self):
        m = make_model()
        cl = ClosureParams(k=0.7, kappa=0.4)
        rng = np.random.default_rng(101)
        for _ in range(5):
            field = random_trig_fields(rng)
            point = (float(rng.uniform(0, 1)), float(rng.uniform(0, 1)))
            res = [abs(gibbs_residual(m, cl, field, point, h).combination)
                   for h in (1e-2, 5e-3, 2.5e-3)]
            assert res[0] / res[1] > 3.6
            assert res[1] / res[2] > 3.6

    def test_halving_h_quarters_residual(self):
        m = make_model()
        cl = ClosureParams(k=1.0, kappa=0.5)
        field = random_trig_fields(np.random.default_rng(7))
        r1 = abs(gibbs_residual(m, cl, field, (0.2, 0.7), 1e-2).combination)
        r2 = abs(gibbs_residual(m, cl, field, (0.2, 0.7), 5e-3).combination)
        assert r1 / r2 == pytest.approx(4.0, rel=0.1)


class TestBalanceSubidentities:
    def test_identity_a_exact_bulk(self):
        m = make_model()
        cl = ClosureParams(k=1.3, kappa=0.6)
        rng = np.random.default_rng(55)
        field = random_trig_fields(rng)
        for _ in range(50):
            pt = (float(rng.uniform(0, 1)), float(rng.uniform(0, 1)))
            ids = balance_subidentities(m, cl, field, pt, 1e-3)
            assert ids["a"] == 0.0

    def test_identity_b_zero_without_potentials(self):
        def zero(t, x):
            return 0.0 * (t + x)
        rng = np.random.default_rng(57)
        f = random_trig_fields(rng)
        field = ManufacturedField(rho1=f.rho1, rho2=f.rho2, u1=f.u1,
                                  u2=f.u2, s1=f.s1, s2=f.s2,
                                  omega1=zero, omega2=zero)
        ids = balance_subidentities(make_model(), ClosureParams(), field,
                                  (0.4, 0.6), 1e-3)
        assert ids["b"] == 0.0

    def test_identity_f_zero_without_coupling(self):
        rng = np.random.default_rng(59)
        field = random_trig_fields(rng)
        ids = balance_subidentities(make_model(a=0.0), ClosureParams(), field,
                                  (0.4, 0.6), 1e-3)
        assert ids["f"] == pytest.approx(0.0, abs=1e-16)

    def test_identities_converge(self):
        m = make_model(a=0.5)
        cl = ClosureParams(k=0.8, kappa=0.3)
        rng = np.random.default_rng(61)
        field = random_trig_fields(rng)
        pt = (0.31, 0.47)
        res_h = balance_subidentities(m, cl, field, pt, 1e-2)
        res_h2 = balance_subidentities(m, cl, field, pt, 5e-3)
        for key in ("b", "c", "d", "f"):
            assert abs(res_h[key]) / abs(res_h2[key]) > 3.6
        # identity e cancels exactly under shared stencils
        assert abs(res_h["e"]) < 1e-14
        assert abs(res_h2["e"]) < 1e-14


class TestConservationDrift:
    def test_smooth_dissipative_run(self):
        m = make_model()
        grid = Grid1D(0.0, 1.0, 64)
        cfg = SimulationConfig(grid=grid, model=m,
                               closures=ClosureParams(k=0.5, kappa=0.3),
                               t_end=0.2, report_interval=0.05)
        init = evolved_from_primitive_profiles(
            m, grid,
            rho1=lambda x: 1.0 + 0.03 * np.sin(2 * np.pi * x),
            rho2=lambda x: 0.8 + 0.02 * np.cos(2 * np.pi * x),
            u1=0.1, u2=0.05, s1=0.0, s2=0.1)
        out = integrate(cfg, init)
        drift = conservation_drift(out)
        assert drift["mass1"]["rel"] < 1e-12
        assert drift["mass2"]["rel"] < 1e-12
        assert drift["momentum_K"]["rel"] < 1e-2
        assert drift["energy"]["rel"] < 1e-2


class TestFickResidual:
    def test_exact_equilibrium_both_sides_zero(self):
        m = SeparableAddedMass(SeparableAddedMassParams(
            gamma1=2.0, gamma2=2.0))
        n = 32
        p = PrimitiveState(rho1=np.full(n, 1.0), rho2=np.full(n, 1.0),
                           u1=np.zeros(n), u2=np.zeros(n),
                           s1=np.zeros(n), s2=np.zeros(n))
        res, rel = fick_residual(m, ClosureParams(k=10.0), p, 1.0 / n,
                                 theta0=1.0)
        assert np.max(np.abs(res)) == 0.0

    def test_non_isothermal_precondition(self):
        m = SeparableAddedMass(SeparableAddedMassParams(
            gamma1=2.0, gamma2=2.0))
        n = 16
        p = PrimitiveState(rho1=np.full(n, 2.0), rho2=np.full(n, 1.0),
                           u1=np.zeros(n), u2=np.zeros(n),
                           s1=np.zeros(n), s2=np.zeros(n))
        with pytest.raises(ValueError, match="isothermal"):
            fick_residual(m, ClosureParams(k=10.0), p, 1.0 / n, theta0=1.0)

    def test_stronger_drag_smaller_residual(self):
        m = SeparableAddedMass(SeparableAddedMassParams(
            gamma1=2.0, gamma2=2.0))
        grid = Grid1D(0.0, 1.0, 64)
        delta = 0.02
        rels = []
        for k in (50.0, 200.0):
            cl = ClosureParams(k=k, kappa=5.0)
            cfg = SimulationConfig(grid=grid, model=m, closures=cl,
                                   t_end=0.3, report_interval=0.3)
            init = evolved_from_primitive_profiles(
                m, grid,
                rho1=lambda x: 1.0 + delta * np.sin(2 * np.pi * x),
                rho2=lambda x: np.sqrt(
                    2.0 - (1.0 + delta * np.sin(2 * np.pi * x)) ** 2),
                u1=0.0, u2=0.0, s1=0.0, s2=0.0)
            _, cells, _ = integrate(cfg, init)[-1]
            p = evolved_to_primitive(m, cells)
            _, rel = fick_residual(m, cl, p, grid.dx, theta0=1.0)
            rels.append(rel)
        assert rels[1] < rels[0]


class TestSingleFluidReduction:
    def test_uniform_state_zero_error(self):
        m = SeparableAddedMass(SeparableAddedMassParams(
            gamma1=1.4, gamma2=1.4))
        r = single_fluid_reduction(m, 16, 0.05, rho0=1.0, u0=0.0, s0=0.0,
                                   ref_n=64)
        assert r["l1_rho"] < 1e-13
        assert r["l1_u"] < 1e-13

    def test_isentropic_pulse_first_order(self):
        m = SeparableAddedMass(SeparableAddedMassParams(
            gamma1=1.4, gamma2=1.4))
        errs = []
        for n in (100, 200):
            r = single_fluid_reduction(
                m, n, 0.1,
                rho0=lambda x: 1.0 + 0.1 * np.exp(-100 * (x - 0.5) ** 2),
                u0=lambda x: 0.05 * np.exp(-100 * (x - 0.5) ** 2),
                s0=0.0, ref_n=1600)
            errs.append(r["l1_rho"])
        assert math.log2(errs[0] / errs[1]) > 0.7

    def test_with_gentle_external_potential(self):
        m = SeparableAddedMass(SeparableAddedMassParams(
            gamma1=1.4, gamma2=1.4))
        errs = []
        for n in (100, 200):
            r = single_fluid_reduction(
                m, n, 0.1,
                rho0=lambda x: 1.0 + 0.1 * np.exp(-100 * (x - 0.5) ** 2),
                u0=0.0, s0=0.0, ref_n=1600,
                omega_value=lambda x: 0.05 * np.sin(2 * np.pi * x),
                omega_grad=lambda x: 0.05 * 2 * np.pi * np.cos(2 * np.pi * x))
            errs.append(r["l1_rho"])
        assert math.log2(errs[0] / errs[1]) > 0.7

    def test_reference_preserves_uniform_state(self):
        m = SeparableAddedMass(SeparableAddedMassParams(
            gamma1=1.4, gamma2=1.4))
        grid = Grid1D(0.0, 1.0, 32)
        rho, u, s = single_fluid_reference(m, grid, 1.0, 0.2, 0.0, 0.05)
        assert np.max(np.abs(rho - 1.0)) < 1e-14
        assert np.max(np.abs(u - 0.2)) < 1e-14
