"""Space-time discretisation of the reaction-diffusion system.

One Crank-Nicolson step collocated at the knots produces, per knot m, a
U-row and a V-row over the ten spline parameters with knot offsets
-2..+2 of both species.  The implicit side couples the new parameters
through the linearised reaction (the ``beta`` coefficients); the
explicit side multiplies the current parameters.  Both sides share one
coefficient layout, the forty ``nu`` values per knot.

Unknowns are interleaved as (delta_0, gamma_0, delta_1, gamma_1, ...),
which keeps the eliminated system inside a band of five diagonals on
each side.  The eight spline parameters attached to ghost knots are
affine functions of the three nearest interior parameters, derived from
the boundary conditions; the assembly folds them into the interior
columns and the right-hand side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bandlu import BandedMatrix
from .basis import StencilWeights
from .problem import BoundaryPlan, ProblemSetup

__all__ = [
    "DegenerateBoundaryError",
    "StateVector",
    "NodalField",
    "LinearizedReaction",
    "RowStencil",
    "GhostMap",
    "SystemMatrices",
    "nodal_values",
    "compute_beta",
    "compute_nu",
    "build_ghost_map",
    "assemble",
    "boundary_residuals",
]

BAND = 5  # kl = ku of the interleaved collocation matrix


class DegenerateBoundaryError(ValueError):
    """A boundary pair cannot determine its two ghost parameters."""


@dataclass
class StateVector:
    """Spline parameters of both species over knots -2..N+2."""

    delta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        self.delta = np.asarray(self.delta, dtype=float)
        self.gamma = np.asarray(self.gamma, dtype=float)
        if self.delta.shape != self.gamma.shape or self.delta.ndim != 1:
            raise ValueError(
                f"parameter arrays must be equal-length vectors, got "
                f"{self.delta.shape} and {self.gamma.shape}"
            )
        if self.delta.shape[0] < 13:
            raise ValueError("state needs at least N+5 = 13 parameters")

    @property
    def n(self) -> int:
        """Number of mesh intervals N implied by the parameter count."""
        return self.delta.shape[0] - 5

    def copy(self) -> "StateVector":
        return StateVector(self.delta.copy(), self.gamma.copy())


@dataclass(frozen=True)
class NodalField:
    """Nodal derivatives 0..4 of both species; arrays of shape (5, N+1)."""

    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class LinearizedReaction:
    """Implicit/explicit reaction weights per knot (scalars broadcast)."""

    beta1: np.ndarray
    beta2: np.ndarray
    beta3: np.ndarray
    beta4: np.ndarray
    beta5: np.ndarray
    beta6: np.ndarray
    beta7: np.ndarray
    beta8: np.ndarray


@dataclass(frozen=True)
class RowStencil:
    """The forty collocation-row coefficients; ``nu[i]`` is nu_{i+1}.

    Layout per block of ten: parameter pairs (delta, gamma) at knot
    offsets -2..+2.  Blocks: implicit U-row, explicit U-row, implicit
    V-row, explicit V-row.
    """

    nu: np.ndarray


@dataclass
class GhostMap:
    """Affine elimination of the ghost parameters at both ends.

    For each (species, side) the two ghost parameters equal
    ``coeffs @ anchors + const`` where anchors are the three interior
    parameters nearest that end (ordered away from the end for the left
    side, towards the end for the right side).
    """

    maps: dict
    _plans: dict = field(default_factory=dict, repr=False)

    def ghosts(self, species: str, side: str, anchors: np.ndarray) -> np.ndarray:
        coeffs, const = self.maps[(species, side)]
        return coeffs @ anchors + const

    def fold_plan(self, n: int) -> tuple:
        """Precomputed scatter plan for eliminating ghost columns.

        Returns (ab_index, nu_index, knot, coeff, rhs_row, rhs_nu_index,
        rhs_knot, rhs_const): integer/float arrays describing, for every
        (collocation row, ghost parameter) incidence, the folded matrix
        contributions and right-hand-side constants.
        """
        if n in self._plans:
            return self._plans[n]
        n_unknowns = 2 * n + 2
        incidences = [
            (0, -2, "left", 0), (0, -1, "left", 1), (1, -2, "left", 1),
            (n, 2, "right", 1), (n, 1, "right", 0), (n - 1, 2, "right", 0),
        ]
        ab_idx, nu_idx, knots, coeffs = [], [], [], []
        rhs_rows, rhs_nu, rhs_knots, rhs_consts = [], [], [], []
        for m, jo, side, ghost_row in incidences:
            anchors = (0, 1, 2) if side == "left" else (n - 2, n - 1, n)
            j = jo + 2
            for p in (0, 1):  # U-row, V-row of knot m
                r = 2 * m + p
                for s, species in ((0, "u"), (1, "v")):
                    cmat, const = self.maps[(species, side)]
                    idx = (2 * j + s) if p == 0 else (20 + 2 * j + s)
                    for ai, anchor in enumerate(anchors):
                        col = 2 * anchor + s
                        ab_idx.append((2 * BAND + r - col) * n_unknowns + col)
                        nu_idx.append(idx)
                        knots.append(m)
                        coeffs.append(cmat[ghost_row, ai])
                    rhs_rows.append(r)
                    rhs_nu.append(idx)
                    rhs_knots.append(m)
                    rhs_consts.append(const[ghost_row])
        plan = (
            np.array(ab_idx), np.array(nu_idx), np.array(knots),
            np.array(coeffs), np.array(rhs_rows), np.array(rhs_nu),
            np.array(rhs_knots), np.array(rhs_consts),
        )
        self._plans[n] = plan
        return plan


@dataclass
class SystemMatrices:
    """Eliminated implicit matrix and fully assembled right-hand side."""

    a: BandedMatrix
    rhs: np.ndarray


def _nodal_order(state_params: np.ndarray, row: np.ndarray) -> np.ndarray:
    n_plus_1 = state_params.shape[0] - 4
    out = row[0] * state_params[0:n_plus_1]
    for j in range(1, 5):
        out += row[j] * state_params[j : j + n_plus_1]
    return out


def nodal_values(state: StateVector, w: StencilWeights) -> NodalField:
    """Nodal derivatives 0..4 at all knots via the five-point stencils."""
    u = np.stack([_nodal_order(state.delta, w.rows[k]) for k in range(5)])
    v = np.stack([_nodal_order(state.gamma, w.rows[k]) for k in range(5)])
    return NodalField(u=u, v=v)


def compute_beta(c, u, v, dt: float) -> LinearizedReaction:
    """Linearised reaction weights about the state (u, v).

    Scalars and arrays broadcast alike; ``u`` and ``v`` are collocation
    values of the current time level, not spline parameters.
    """
    if dt <= 0.0:
        raise ValueError(f"time step must be positive, got {dt!r}")
    inv_dt = 1.0 / dt
    uv = u * v
    u2 = u * u
    v2 = v * v
    return LinearizedReaction(
        beta1=inv_dt - 0.5 * c.b1 - c.d1 * uv - 0.5 * c.e1 * v - 0.5 * c.m1 * v2,
        beta2=-0.5 * c.c1 - 0.5 * c.d1 * u2 - 0.5 * c.e1 * u - c.m1 * uv,
        beta3=inv_dt + 0.5 * c.b1 - 0.5 * c.m1 * v2,
        beta4=0.5 * c.c1 - 0.5 * c.d1 * u2,
        beta5=-0.5 * c.b2 - c.d2 * uv - 0.5 * c.e2 * v - 0.5 * c.m2 * v2,
        beta6=inv_dt - 0.5 * c.c2 - 0.5 * c.d2 * u2 - 0.5 * c.e2 * u - c.m2 * uv,
        beta7=0.5 * c.b2 - 0.5 * c.m2 * v2,
        beta8=inv_dt + 0.5 * c.c2 - 0.5 * c.d2 * u2,
    )


def compute_nu(beta: LinearizedReaction, w: StencilWeights,
               a1: float, a2: float) -> RowStencil:
    """Collocation-row coefficients from the beta weights and stencils.

    One uniform rule generates all forty values: implicit rows subtract
    half the diffusion times the second-derivative stencil from the
    diagonal species, explicit rows add it; cross-species entries are
    pure beta times the value stencil.
    """
    val = w.rows[0]
    sec = w.rows[2]
    ha1 = 0.5 * a1
    ha2 = 0.5 * a2
    shape = np.broadcast_shapes(
        np.shape(beta.beta1), np.shape(beta.beta2), np.shape(beta.beta3),
        np.shape(beta.beta4), np.shape(beta.beta5), np.shape(beta.beta6),
        np.shape(beta.beta7), np.shape(beta.beta8),
    )
    nu = np.empty((40,) + shape)
    for j in range(5):
        nu[2 * j] = beta.beta1 * val[j] - ha1 * sec[j]
        nu[2 * j + 1] = beta.beta2 * val[j]
        nu[10 + 2 * j] = beta.beta3 * val[j] + ha1 * sec[j]
        nu[11 + 2 * j] = beta.beta4 * val[j]
        nu[20 + 2 * j] = beta.beta5 * val[j]
        nu[21 + 2 * j] = beta.beta6 * val[j] - ha2 * sec[j]
        nu[30 + 2 * j] = beta.beta7 * val[j]
        nu[31 + 2 * j] = beta.beta8 * val[j] + ha2 * sec[j]
    return RowStencil(nu=nu)


def build_ghost_map(plan: BoundaryPlan, w: StencilWeights) -> GhostMap:
    """Solve each boundary pair for its two ghost parameters.

    Each condition of order k at an end is the order-k stencil applied
    to the five parameters nearest that end.  The two conditions of a
    (species, side) pair form a 2x2 system in the ghost parameters.
    """
    maps = {}
    for species in ("u", "v"):
        for side in ("left", "right"):
            first, second = plan.pair(species, side)
            rows = np.array([w.rows[first.order], w.rows[second.order]])
            targets = np.array([first.target, second.target])
            if side == "left":
                ghost_cols = rows[:, :2]
                anchor_cols = rows[:, 2:]
            else:
                ghost_cols = rows[:, 3:]
                anchor_cols = rows[:, :3]
            det = (
                ghost_cols[0, 0] * ghost_cols[1, 1]
                - ghost_cols[0, 1] * ghost_cols[1, 0]
            )
            scale = np.linalg.norm(ghost_cols[0]) * np.linalg.norm(ghost_cols[1])
            if abs(det) <= 1e-12 * scale or scale == 0.0:
                raise DegenerateBoundaryError(
                    f"orders ({first.order}, {second.order}) give linearly "
                    f"dependent ghost columns for species '{species}' "
                    f"({side} side)"
                )
            inv = (
                np.array(
                    [
                        [ghost_cols[1, 1], -ghost_cols[0, 1]],
                        [-ghost_cols[1, 0], ghost_cols[0, 0]],
                    ]
                )
                / det
            )
            maps[(species, side)] = (-inv @ anchor_cols, inv @ targets)
    return GhostMap(maps=maps)


def assemble(setup: ProblemSetup, state: StateVector, w: StencilWeights,
             dt: float, gm: GhostMap) -> SystemMatrices:
    """Build the eliminated (2N+2) x (2N+2) step system at the current state."""
    c = setup.coefficients
    u = _nodal_order(state.delta, w.rows[0])
    v = _nodal_order(state.gamma, w.rows[0])
    beta = compute_beta(c, u, v, dt)
    nu = compute_nu(beta, w, c.a1, c.a2).nu
    return _assemble_from_nu(setup, state, nu, gm)


def boundary_residuals(state: StateVector, plan: BoundaryPlan,
                       w: StencilWeights, normalized: bool = False) -> np.ndarray:
    """Residual of every boundary condition on the given state.

    Entries follow the plan's condition order; a well-enforced state
    keeps all of them at solver precision.  With ``normalized`` the
    residuals are divided by the magnitude of the stencil application
    (sum of absolute terms plus target), which is the meaningful scale:
    third- and fourth-order stencil weights grow like 1/h^3 and 1/h^4,
    so even an exactly enforced condition carries absolute rounding
    noise proportional to that size.
    """
    n = state.n
    out = np.empty(len(plan.conditions))
    for i, bc in enumerate(plan.conditions):
        params = state.delta if bc.species == "u" else state.gamma
        lo = 0 if bc.side == "left" else n
        row = w.rows[bc.order]
        window = params[lo : lo + 5]
        out[i] = row @ window - bc.target
        if normalized:
            scale = float(np.abs(row) @ np.abs(window)) + abs(bc.target)
            out[i] /= max(scale, 1e-300)
    return out


def _full_width_nu(nu: np.ndarray, n: int) -> np.ndarray:
    if nu.ndim == 1:
        return np.broadcast_to(nu[:, None], (40, n + 1))
    return nu


def _assemble_from_nu(setup: ProblemSetup, state: StateVector,
                      nu: np.ndarray, gm: GhostMap) -> SystemMatrices:
    n = setup.mesh.n
    nu = _full_width_nu(nu, n)
    n_unknowns = 2 * n + 2
    a = BandedMatrix.zeros(n_unknowns, BAND, BAND)
    ab = a.ab

    # Interior fill: one band diagonal per (offset, row parity, column
    # parity) triple; ghost incidences land outside [0, N] and are
    # folded afterwards.
    for j in range(5):
        jo = j - 2
        m0 = max(0, -jo)
        count = n + 1 - abs(jo)
        c0 = 2 * max(jo, 0)
        for p in (0, 1):
            for s in (0, 1):
                idx = (2 * j + s) if p == 0 else (20 + 2 * j + s)
                row = 2 * BAND + p - s - 2 * jo
                cols = slice(c0 + s, c0 + s + 2 * count, 2)
                ab[row, cols] = nu[idx][m0 : m0 + count]

    ab_idx, nu_idx, knots, coeffs = gm.fold_plan(n)[:4]
    np.add.at(ab.reshape(-1), ab_idx, nu[nu_idx, knots] * coeffs)
    rhs = _explicit_rhs_folded(setup, state, nu, gm)
    return SystemMatrices(a=a, rhs=rhs)


def _explicit_rhs_folded(setup: ProblemSetup, state: StateVector,
                         nu: np.ndarray, gm: GhostMap) -> np.ndarray:
    """Explicit side over the full parameter vector, plus ghost constants."""
    n = setup.mesh.n
    nu = _full_width_nu(nu, n)
    c = setup.coefficients
    rhs = np.empty(2 * n + 2)
    n_plus_1 = n + 1
    for p, feed in ((0, c.n1), (1, c.n2)):
        acc = np.full(n_plus_1, float(feed))
        for j in range(5):
            base = (10 + 2 * j) if p == 0 else (30 + 2 * j)
            acc += nu[base] * state.delta[j : j + n_plus_1]
            acc += nu[base + 1] * state.gamma[j : j + n_plus_1]
        rhs[p::2] = acc
    rhs_rows, rhs_nu, rhs_knots, rhs_consts = gm.fold_plan(n)[4:]
    np.subtract.at(rhs, rhs_rows, nu[rhs_nu, rhs_knots] * rhs_consts)
    return rhs
