import math

import numpy as np
import pytest

from rdspline.problem import (
    BoundaryCondition,
    BoundaryPlan,
    ParameterError,
    RDCoefficients,
    UnknownModelError,
    analytic_linear,
    coefficients_from_table,
    preset,
    reaction_eval,
)


class TestCoefficientTable:
    def test_linear_row(self):
        c = coefficients_from_table("linear", a=0.1, b=0.01, d=1.0)
        assert (c.a1, c.a2) == (1.0, 1.0)
        assert c.b1 == -0.1
        assert c.c1 == 1.0
        assert c.c2 == -0.01
        for name in ("b2", "d1", "d2", "e1", "e2", "m1", "m2", "n1", "n2"):
            assert getattr(c, name) == 0.0

    def test_brusselator_row(self):
        c = coefficients_from_table("brusselator", eps1=1e-4, eps2=1e-4,
                                    A=1.0, B=3.4)
        assert (c.a1, c.a2) == (1e-4, 1e-4)
        assert c.b1 == pytest.approx(-4.4)
        assert c.b2 == 3.4
        assert (c.d1, c.d2) == (1.0, -1.0)
        assert c.n1 == 1.0
        for name in ("c1", "c2", "e1", "e2", "m1", "m2", "n2"):
            assert getattr(c, name) == 0.0

    def test_schnakenberg_row(self):
        c = coefficients_from_table("schnakenberg", gamma=1e4, a=0.126779,
                                    b=0.792366, d=10.0)
        assert (c.a1, c.a2) == (1.0, 10.0)
        assert c.b1 == -1e4
        assert (c.d1, c.d2) == (1e4, -1e4)
        assert c.n1 == pytest.approx(1e4 * 0.126779)
        assert c.n2 == pytest.approx(1e4 * 0.792366)

    def test_gray_scott_row(self):
        c = coefficients_from_table("gray-scott", eps1=1.0, eps2=0.01,
                                    f=9.0, k=-8.6)
        assert c.b1 == -9.0
        assert c.c2 == pytest.approx(-0.4)
        assert (c.m1, c.m2) == (-1.0, 1.0)
        assert c.n1 == 9.0

    def test_missing_parameter(self):
        with pytest.raises(ParameterError):
            coefficients_from_table("linear", a=0.1, b=0.01)

    def test_unknown_parameter(self):
        with pytest.raises(ParameterError):
            coefficients_from_table("linear", a=0.1, b=0.01, d=1.0, q=2.0)

    def test_unknown_model(self):
        with pytest.raises(UnknownModelError):
            coefficients_from_table("lotka", a=1.0)

    def test_name_normalisation(self):
        c1 = coefficients_from_table("Gray_Scott", eps1=1.0, eps2=0.01,
                                     f=1.0, k=0.0)
        c2 = coefficients_from_table("GRAY-SCOTT", eps1=1.0, eps2=0.01,
                                     f=1.0, k=0.0)
        assert c1 == c2

    def test_negative_diffusion_rejected(self):
        with pytest.raises(ParameterError):
            RDCoefficients(a1=-1.0)


class TestReactionEval:
    def test_brusselator_steady_state(self):
        c = coefficients_from_table("brusselator", eps1=1e-4, eps2=1e-4,
                                    A=1.0, B=3.4)
        f, g = reaction_eval(c, 1.0, 3.4)
        assert f == pytest.approx(0.0, abs=1e-14)
        assert g == pytest.approx(0.0, abs=1e-14)

    def test_linear_direct_substitution(self):
        c = coefficients_from_table("linear", a=0.1, b=0.01, d=1.0)
        f, g = reaction_eval(c, 2.0, 3.0)
        assert f == pytest.approx(2.8)
        assert g == pytest.approx(-0.03)

    def test_gray_scott_trivial_state(self):
        c = coefficients_from_table("gray-scott", eps1=1.0, eps2=0.01,
                                    f=9.0, k=-8.6)
        f, g = reaction_eval(c, 1.0, 0.0)
        assert f == 0.0
        assert g == 0.0

    def test_broadcasts_over_arrays(self):
        c = coefficients_from_table("linear", a=0.1, b=0.01, d=1.0)
        u = np.array([1.0, 2.0])
        v = np.array([0.5, 3.0])
        f, g = reaction_eval(c, u, v)
        assert f == pytest.approx([0.4, 2.8])
        assert g == pytest.approx([-0.005, -0.03])


class TestAnalyticLinear:
    def test_initial_time(self):
        u, v = analytic_linear(0.0, 0.0, 0.1, 0.01, 1.0)
        assert u == pytest.approx(2.0)
        assert v == pytest.approx(0.09)

    def test_zero_at_right_end(self):
        u, v = analytic_linear(math.pi / 2.0, 0.7, 0.3, 0.2, 2.0)
        assert u == pytest.approx(0.0, abs=1e-15)
        assert v == pytest.approx(0.0, abs=1e-15)

    def test_reaction_dominated_point(self):
        u, v = analytic_linear(0.0, 1.0, 2.0, 1.0, 0.001)
        assert u == pytest.approx(math.exp(-2.001) + math.exp(-1.001), rel=1e-15)
        assert v == pytest.approx(math.exp(-1.001), rel=1e-15)

    def test_satisfies_pde_via_finite_differences(self):
        a, b, d = 0.7, 0.2, 1.3
        eps = 1e-2
        for x, t in [(0.3, 0.5), (1.0, 0.1), (0.2, 1.5)]:
            def u_of_t(tt):
                return analytic_linear(x, tt, a, b, d)[0]

            def v_of_t(tt):
                return analytic_linear(x, tt, a, b, d)[1]

            def u_of_x(xx):
                return analytic_linear(xx, t, a, b, d)[0]

            def v_of_x(xx):
                return analytic_linear(xx, t, a, b, d)[1]

            u, v = analytic_linear(x, t, a, b, d)
            u_t = _richardson(u_of_t, t, eps)
            v_t = _richardson(v_of_t, t, eps)
            u_xx = _richardson2(u_of_x, x, eps)
            v_xx = _richardson2(v_of_x, x, eps)
            assert abs(u_t - (d * u_xx - a * u + v)) <= 1e-10
            assert abs(v_t - (d * v_xx - b * v)) <= 1e-10


def _richardson(f, x, e):
    def central(step):
        return (f(x + step) - f(x - step)) / (2 * step)

    r1 = (4 * central(e / 2) - central(e)) / 3
    r2 = (4 * central(e / 4) - central(e / 2)) / 3
    return (16 * r2 - r1) / 15


def _richardson2(f, x, e):
    def second(step):
        return (f(x + step) - 2 * f(x) + f(x - step)) / step**2

    r1 = (4 * second(e / 2) - second(e)) / 3
    r2 = (4 * second(e / 4) - second(e / 2)) / 3
    return (16 * r2 - r1) / 15


class TestBoundaryPlan:
    def test_preset_plans_are_valid(self):
        for name in ("linear", "brusselator", "schnakenberg", "gray-scott"):
            plan = preset(name).setup.boundary
            assert len(plan.conditions) == 8
            for species in ("u", "v"):
                for side in ("left", "right"):
                    pair = plan.pair(species, side)
                    assert len(pair) == 2
                    assert pair[0].order != pair[1].order

    def test_wrong_count_rejected(self):
        with pytest.raises(ValueError):
            BoundaryPlan(tuple(
                BoundaryCondition("u", "left", order) for order in range(4)
            ))

    def test_duplicate_order_rejected(self):
        conditions = []
        for species in ("u", "v"):
            for side in ("left", "right"):
                conditions.append(BoundaryCondition(species, side, 1))
                conditions.append(BoundaryCondition(species, side, 1))
        with pytest.raises(ValueError):
            BoundaryPlan(tuple(conditions))

    def test_condition_validation(self):
        with pytest.raises(ValueError):
            BoundaryCondition("w", "left", 0)
        with pytest.raises(ValueError):
            BoundaryCondition("u", "top", 0)
        with pytest.raises(ValueError):
            BoundaryCondition("u", "left", 5)


class TestPresets:
    def test_schnakenberg_defaults(self):
        plan = preset("schnakenberg")
        assert plan.setup.mesh.n == 100
        assert plan.dt == pytest.approx(5e-5)
        assert plan.t_end == pytest.approx(2.5)

    def test_gray_scott_defaults(self):
        plan = preset("gray-scott")
        assert plan.setup.coefficients.a1 == 1.0
        assert plan.setup.coefficients.a2 == 0.01
        assert plan.setup.mesh.n == 400
        assert plan.dt == pytest.approx(0.2)

    def test_brusselator_defaults(self):
        plan = preset("brusselator")
        assert plan.setup.mesh.n == 200
        assert plan.dt == pytest.approx(0.01)
        assert plan.t_end == pytest.approx(15.0)
        assert plan.snapshot_times == (3.0, 6.0, 10.8, 13.8)
        assert plan.probe_points == (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)

    def test_linear_initial_condition_matches_closed_form(self):
        plan = preset("linear")
        ic = plan.setup.initial
        assert ic.u_init(0.0) == pytest.approx(2.0)
        assert ic.v_init(0.0) == pytest.approx(0.09)

    def test_steady_states_of_presets(self):
        bruss = preset("brusselator").setup.coefficients
        f, g = reaction_eval(bruss, 1.0, 3.4)
        assert f == pytest.approx(0.0, abs=1e-14)
        assert g == pytest.approx(0.0, abs=1e-14)
        gs = preset("gray-scott").setup.coefficients
        f, g = reaction_eval(gs, 1.0, 0.0)
        assert f == 0.0
        assert g == 0.0

    def test_override_constants_and_numerics(self):
        plan = preset("brusselator", B=3.0, n=64, dt=0.02, t_end=1.0)
        assert plan.setup.coefficients.b1 == pytest.approx(-4.0)
        assert plan.setup.mesh.n == 64
        assert plan.dt == 0.02
        assert plan.t_end == 1.0

    def test_unknown_override_rejected(self):
        with pytest.raises(ParameterError):
            preset("brusselator", Q=1.0)

    def test_unknown_model_rejected(self):
        with pytest.raises(UnknownModelError):
            preset("fisher")

    def test_initial_sampler_rejects_non_finite(self):
        from rdspline.problem import InitialCondition

        bad = InitialCondition(u_init=lambda x: float("nan"),
                               v_init=lambda x: 0.0)
        with pytest.raises(ValueError):
            bad.sample(np.array([0.0, 1.0]))
