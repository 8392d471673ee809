import numpy as np
import pytest

from rdspline.basis import StencilWeights, basis_value, make_mesh, stencil_weights
from rdspline.discretize import (
    DegenerateBoundaryError,
    StateVector,
    assemble,
    boundary_residuals,
    build_ghost_map,
    compute_beta,
    compute_nu,
    nodal_values,
)
from rdspline.problem import (
    BoundaryCondition,
    BoundaryPlan,
    InitialCondition,
    ProblemSetup,
    RDCoefficients,
    analytic_linear,
    coefficients_from_table,
    preset,
    reaction_eval,
)
from rdspline.stepper import fit_initial


def random_state(rng, n):
    return StateVector(delta=rng.normal(size=n + 5), gamma=rng.normal(size=n + 5))


class TestNodalValues:
    def test_zero_state(self):
        w = stencil_weights(0.125)
        state = StateVector(np.zeros(21), np.zeros(21))
        nod = nodal_values(state, w)
        assert not nod.u.any()
        assert not nod.v.any()

    def test_single_parameter_reads_value_row(self):
        n = 16
        w = stencil_weights(0.125)
        delta = np.zeros(n + 5)
        delta[8 + 2] = 1.0  # parameter attached to knot 8
        nod = nodal_values(StateVector(delta, np.zeros(n + 5)), w)
        expected = (w.alpha[0], w.alpha[1], w.alpha[2], w.alpha[1], w.alpha[0])
        assert nod.u[0][6:11] == pytest.approx(expected, rel=1e-14)
        assert nod.u[0][:6] == pytest.approx(np.zeros(6), abs=1e-15)

    def test_matches_direct_basis_summation(self):
        rng = np.random.default_rng(42)
        mesh = make_mesh(0.0, 2.0, 16)
        w = stencil_weights(mesh.h)
        state = random_state(rng, mesh.n)
        nod = nodal_values(state, w)
        for order in range(5):
            for m in range(mesh.n + 1):
                direct = sum(
                    basis_value(mesh, i, mesh.knot(m), order)
                    * state.delta[i + 2]
                    for i in range(-2, mesh.n + 3)
                )
                scale = max(np.max(np.abs(nod.u[order])), 1e-300)
                assert abs(nod.u[order][m] - direct) <= 1e-12 * scale


class TestComputeBeta:
    def test_linear_row_values(self):
        c = coefficients_from_table("linear", a=0.1, b=0.01, d=1.0)
        beta = compute_beta(c, 0.3, 0.7, 0.01)
        assert beta.beta1 == pytest.approx(100.0 + 0.05)
        assert beta.beta2 == pytest.approx(-0.5)
        assert beta.beta3 == pytest.approx(100.0 - 0.05)
        assert beta.beta4 == pytest.approx(0.5)

    def test_linear_case_is_state_independent(self):
        c = RDCoefficients(a1=1.0, b1=-2.0, c1=3.0, c2=-4.0)
        b_one = compute_beta(c, 0.1, 0.2, 0.5)
        b_two = compute_beta(c, -5.0, 9.0, 0.5)
        assert b_one.beta2 == b_two.beta2 == -1.5
        assert b_one == b_two

    def test_steady_state_identity(self):
        # The implicit-minus-explicit weights collapse to the negative
        # reaction: (b1-b3)u + (b2-b4)v - n1 == -f(u, v), exactly.
        rng = np.random.default_rng(3)
        for _ in range(50):
            c = RDCoefficients(
                a1=abs(rng.normal()), a2=abs(rng.normal()),
                b1=rng.normal(), b2=rng.normal(), c1=rng.normal(),
                c2=rng.normal(), d1=rng.normal(), d2=rng.normal(),
                e1=rng.normal(), e2=rng.normal(), m1=rng.normal(),
                m2=rng.normal(), n1=rng.normal(), n2=rng.normal(),
            )
            u, v = rng.normal(), rng.normal()
            beta = compute_beta(c, u, v, 0.25)
            f, g = reaction_eval(c, u, v)
            lhs_u = (beta.beta1 - beta.beta3) * u + (beta.beta2 - beta.beta4) * v
            lhs_v = (beta.beta5 - beta.beta7) * u + (beta.beta6 - beta.beta8) * v
            scale = max(abs(f), abs(g), 1.0)
            assert abs(lhs_u - c.n1 + f) <= 1e-12 * scale
            assert abs(lhs_v - c.n2 + g) <= 1e-12 * scale

    def test_rejects_non_positive_dt(self):
        c = RDCoefficients()
        with pytest.raises(ValueError):
            compute_beta(c, 0.0, 0.0, 0.0)


class TestComputeNu:
    def test_layout_against_reference(self):
        w = stencil_weights(0.2)
        c = coefficients_from_table("brusselator", eps1=1e-4, eps2=2e-4,
                                    A=1.0, B=3.4)
        beta = compute_beta(c, 0.9, 2.1, 0.05)
        nu = compute_nu(beta, w, c.a1, c.a2).nu
        val, sec = w.rows[0], w.rows[2]
        assert nu[0] == pytest.approx(beta.beta1 * val[0] - 0.5 * c.a1 * sec[0])
        assert nu[21] == pytest.approx(beta.beta6 * val[0] - 0.5 * c.a2 * sec[0])
        assert nu[31] == pytest.approx(beta.beta8 * val[0] + 0.5 * c.a2 * sec[0])
        for j in range(5):
            assert nu[2 * j] == pytest.approx(
                beta.beta1 * val[j] - 0.5 * c.a1 * sec[j])
            assert nu[2 * j + 1] == pytest.approx(beta.beta2 * val[j])
            assert nu[10 + 2 * j] == pytest.approx(
                beta.beta3 * val[j] + 0.5 * c.a1 * sec[j])
            assert nu[11 + 2 * j] == pytest.approx(beta.beta4 * val[j])
            assert nu[20 + 2 * j] == pytest.approx(beta.beta5 * val[j])
            assert nu[21 + 2 * j] == pytest.approx(
                beta.beta6 * val[j] - 0.5 * c.a2 * sec[j])
            assert nu[30 + 2 * j] == pytest.approx(beta.beta7 * val[j])
            assert nu[31 + 2 * j] == pytest.approx(
                beta.beta8 * val[j] + 0.5 * c.a2 * sec[j])

    def test_no_diffusion_gives_pure_products(self):
        w = stencil_weights(0.2)
        c = RDCoefficients(b1=1.0, c2=-1.0)
        beta = compute_beta(c, 0.0, 0.0, 0.1)
        nu = compute_nu(beta, w, 0.0, 0.0).nu
        val = w.rows[0]
        for j in range(5):
            assert nu[2 * j] == pytest.approx(beta.beta1 * val[j])
            assert nu[21 + 2 * j] == pytest.approx(beta.beta6 * val[j])


class TestGhostMap:
    def test_odd_pair_is_reflection(self):
        w = stencil_weights(0.1)
        plan = _plan_all_sides(orders=(1, 3))
        gm = build_ghost_map(plan, w)
        anchors = np.array([1.7, -0.3, 2.2])
        ghosts = gm.ghosts("u", "left", anchors)
        assert ghosts == pytest.approx([anchors[2], anchors[1]], rel=1e-12)
        ghosts = gm.ghosts("v", "right", anchors)
        assert ghosts == pytest.approx([anchors[1], anchors[0]], rel=1e-12)

    def test_value_pair_residuals(self):
        w = stencil_weights(0.3)
        plan = _plan_all_sides(orders=(0, 2))
        gm = build_ghost_map(plan, w)
        rng = np.random.default_rng(0)
        anchors = rng.normal(size=3)
        g1, g2 = gm.ghosts("u", "right", anchors)
        params = np.concatenate([anchors, [g1, g2]])
        for order in (0, 2):
            assert abs(w.rows[order] @ params) <= 1e-10

    def test_dirichlet_corner_with_target(self):
        w = stencil_weights(0.25)
        conditions = []
        for species in ("u", "v"):
            target = 1.0 if species == "u" else 0.0
            for side in ("left", "right"):
                conditions.append(
                    BoundaryCondition(species, side, 0, target))
                conditions.append(BoundaryCondition(species, side, 1, 0.0))
        gm = build_ghost_map(BoundaryPlan(tuple(conditions)), w)
        rng = np.random.default_rng(1)
        anchors = rng.normal(size=3)
        g1, g2 = gm.ghosts("u", "left", anchors)
        params = np.concatenate([[g1, g2], anchors])
        assert w.rows[0] @ params == pytest.approx(1.0, abs=1e-10)
        assert w.rows[1] @ params == pytest.approx(0.0, abs=1e-10)
        # a nonzero target must produce a nonzero affine constant
        assert np.any(np.abs(gm.maps[("u", "left")][1]) > 0)

    def test_degenerate_pair_detected(self):
        w = stencil_weights(0.1)
        # Doctored weights: the order-3 row shadows the order-1 row, so
        # the 2x2 ghost systems lose rank.
        rows = w.rows.copy()
        rows[3] = 2.0 * rows[1]
        doctored = StencilWeights(h=w.h, theta=w.theta, rows=rows,
                                  alpha=w.alpha)
        with pytest.raises(DegenerateBoundaryError):
            build_ghost_map(_plan_all_sides(orders=(1, 3)), doctored)


def _plan_all_sides(orders):
    conditions = []
    for species in ("u", "v"):
        for side in ("left", "right"):
            for order in orders:
                conditions.append(BoundaryCondition(species, side, order, 0.0))
    return BoundaryPlan(tuple(conditions))


def dense_reference_system(setup, state, w, dt, gm):
    """Independent assembly: dense collocation rows over all parameters,
    ghost parameters eliminated through the affine maps afterwards."""
    n = setup.mesh.n
    c = setup.coefficients
    nod = nodal_values(state, w)
    size = 2 * (n + 5)
    full = np.zeros((2 * n + 2, size))
    rhs = np.zeros(2 * n + 2)
    x_full = np.empty(size)
    x_full[0::2] = state.delta
    x_full[1::2] = state.gamma
    for m in range(n + 1):
        beta = compute_beta(c, nod.u[0][m], nod.v[0][m], dt)
        nu = compute_nu(beta, w, c.a1, c.a2).nu
        for j in range(5):
            col = 2 * (m + j)
            full[2 * m, col] += nu[2 * j]
            full[2 * m, col + 1] += nu[2 * j + 1]
            full[2 * m + 1, col] += nu[20 + 2 * j]
            full[2 * m + 1, col + 1] += nu[21 + 2 * j]
            rhs[2 * m] += (nu[10 + 2 * j] * x_full[col]
                           + nu[11 + 2 * j] * x_full[col + 1])
            rhs[2 * m + 1] += (nu[30 + 2 * j] * x_full[col]
                               + nu[31 + 2 * j] * x_full[col + 1])
        rhs[2 * m] += c.n1
        rhs[2 * m + 1] += c.n2
    # Eliminate ghost columns with the affine ghost maps.
    reduced = np.zeros((2 * n + 2, 2 * n + 2))
    reduced[:, :] = full[:, 4 : 4 + 2 * n + 2]
    for species, parity in (("u", 0), ("v", 1)):
        cmat, const = gm.maps[(species, "left")]
        for gi, col in enumerate((parity, 2 + parity)):
            for ai in range(3):
                reduced[:, 2 * ai + parity] += full[:, col] * cmat[gi, ai]
            rhs -= full[:, col] * const[gi]
        cmat, const = gm.maps[(species, "right")]
        for gi, col in enumerate((2 * (n + 3) + parity, 2 * (n + 4) + parity)):
            for ai, anchor in enumerate((n - 2, n - 1, n)):
                reduced[:, 2 * anchor + parity] += full[:, col] * cmat[gi, ai]
            rhs -= full[:, col] * const[gi]
    return reduced, rhs


class TestAssemble:
    def _setup(self, model="brusselator", n=16):
        plan = preset(model, n=n)
        return plan.setup

    def test_matches_dense_reference(self):
        rng = np.random.default_rng(5)
        for model in ("linear", "brusselator", "schnakenberg", "gray-scott"):
            setup = self._setup(model, n=128 if model == "gray-scott" else 16)
            w = stencil_weights(setup.mesh.h)
            gm = build_ghost_map(setup.boundary, w)
            state = random_state(rng, setup.mesh.n)
            system = assemble(setup, state, w, 0.01, gm)
            dense_a, dense_rhs = dense_reference_system(setup, state, w, 0.01, gm)
            banded_dense = system.a.to_dense()
            scale = np.max(np.abs(dense_a))
            assert np.max(np.abs(banded_dense - dense_a)) <= 1e-12 * scale
            rhs_scale = max(np.max(np.abs(dense_rhs)), 1e-300)
            assert np.max(np.abs(system.rhs - dense_rhs)) <= 1e-12 * rhs_scale

    def test_interior_row_structure(self):
        setup = self._setup(n=20)
        w = stencil_weights(setup.mesh.h)
        gm = build_ghost_map(setup.boundary, w)
        state = random_state(np.random.default_rng(0), 20)
        system = assemble(setup, state, w, 0.01, gm)
        assert system.a.n == 2 * 20 + 2
        assert system.rhs.shape == (42,)
        dense = system.a.to_dense()
        for m in range(2, 19):
            row = dense[2 * m]
            nonzero = np.nonzero(row)[0]
            assert len(nonzero) <= 10
            assert nonzero[0] >= 2 * (m - 2)
            assert nonzero[-1] <= 2 * (m + 2) + 1

    def test_linear_matrix_is_state_independent(self):
        setup = self._setup("linear")
        w = stencil_weights(setup.mesh.h)
        gm = build_ghost_map(setup.boundary, w)
        rng = np.random.default_rng(1)
        a_one = assemble(setup, random_state(rng, 16), w, 0.02, gm).a.ab
        a_two = assemble(setup, random_state(rng, 16), w, 0.02, gm).a.ab
        assert np.array_equal(a_one, a_two)

    def test_elimination_preserves_interior_rows(self):
        setup = self._setup(n=16)
        w = stencil_weights(setup.mesh.h)
        gm = build_ghost_map(setup.boundary, w)
        state = random_state(np.random.default_rng(2), 16)
        dense = assemble(setup, state, w, 0.01, gm).a.to_dense()
        full, _ = dense_reference_system(setup, state, w, 0.01, gm)
        # rows of knots 2..N-2 never touch ghost columns
        for m in range(2, 15):
            assert np.array_equal(dense[2 * m], full[2 * m])
            assert np.array_equal(dense[2 * m + 1], full[2 * m + 1])

    def test_truncation_probe_scales_as_dt_cubed(self):
        # Inject the closed-form solution at consecutive time levels and
        # measure the dt-scaled residual; halving dt should shrink it
        # roughly eightfold at fixed (fine) spacing.
        a, b, d = 0.1, 0.01, 1.0
        plan = preset("linear", n=64)
        setup = plan.setup
        w = stencil_weights(setup.mesh.h)
        gm = build_ghost_map(setup.boundary, w)

        def exact_state(t):
            frozen = ProblemSetup(
                coefficients=setup.coefficients, mesh=setup.mesh,
                boundary=setup.boundary,
                initial=InitialCondition(
                    u_init=lambda x: analytic_linear(x, t, a, b, d)[0],
                    v_init=lambda x: analytic_linear(x, t, a, b, d)[1],
                ),
                label="frozen",
            )
            return fit_initial(frozen, w)

        def scaled_residual(dt):
            t0 = 0.2
            state_now = exact_state(t0)
            state_next = exact_state(t0 + dt)
            system = assemble(setup, state_now, w, dt, gm)
            z = np.empty(2 * setup.mesh.n + 2)
            z[0::2] = state_next.delta[2:-2]
            z[1::2] = state_next.gamma[2:-2]
            return dt * np.max(np.abs(system.a.to_dense() @ z - system.rhs))

        r_coarse = scaled_residual(0.1)
        r_fine = scaled_residual(0.05)
        assert r_coarse / r_fine == pytest.approx(8.0, rel=0.35)


class TestBoundaryResiduals:
    def test_fitted_state_satisfies_plan(self):
        plan = preset("gray-scott", n=96)
        setup = plan.setup
        w = stencil_weights(setup.mesh.h)
        state = fit_initial(setup, w)
        residuals = boundary_residuals(state, setup.boundary, w)
        # first-order rows hold exactly; value rows hold through the
        # interpolation of consistent initial data
        assert np.max(np.abs(residuals)) <= 1e-9
