"""Initial spline fit, time advancement and solution reconstruction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import bandlu
from .basis import StencilWeights, basis_value, stencil_weights
from .discretize import (
    GhostMap,
    StateVector,
    _assemble_from_nu,
    _explicit_rhs_folded,
    assemble,
    build_ghost_map,
    compute_beta,
    compute_nu,
    nodal_values,
)
from .problem import ProblemSetup

__all__ = [
    "SolverConfig",
    "Snapshot",
    "ProbeSeries",
    "Trajectory",
    "StepFailure",
    "fit_initial",
    "step",
    "run",
]

_SLACK = 1e-9  # tolerance for time and coordinate comparisons


class StepFailure(RuntimeError):
    """A time step could not be completed; carries step index and time."""

    def __init__(self, step_index: int, time: float, reason: Exception):
        super().__init__(
            f"step {step_index} at t={time:.10g} failed: {reason}"
        )
        self.step_index = step_index
        self.time = time
        self.reason = reason


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping plan: step size, horizon, capture points."""

    dt: float
    t_end: float
    snapshot_times: tuple = ()
    probe_points: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "snapshot_times",
                           tuple(float(t) for t in self.snapshot_times))
        object.__setattr__(self, "probe_points",
                           tuple(float(x) for x in self.probe_points))
        if not 0.0 < self.dt <= self.t_end:
            raise ValueError(
                f"need 0 < dt <= t_end, got dt={self.dt!r}, t_end={self.t_end!r}"
            )
        for t in self.snapshot_times:
            if not -_SLACK <= t <= self.t_end + _SLACK:
                raise ValueError(
                    f"snapshot time {t!r} outside [0, {self.t_end!r}]"
                )


@dataclass(frozen=True)
class Snapshot:
    """Nodal values of both species at one captured time."""

    t: float
    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class ProbeSeries:
    """Time series of the reconstructed solution at one spatial point."""

    x: float
    times: np.ndarray
    u: np.ndarray
    v: np.ndarray


@dataclass
class Trajectory:
    """Captured output of one run.

    Snapshots hold nodal values only; spline parameters stay internal to
    the run.  ``final``/``penultimate`` nodal arrays support
    successive-step error measures, and the range fields track every
    step, not just captured ones.
    """

    snapshots: list = field(default_factory=list)
    probes: list = field(default_factory=list)
    final_u: np.ndarray | None = None
    final_v: np.ndarray | None = None
    penultimate_u: np.ndarray | None = None
    penultimate_v: np.ndarray | None = None
    u_range: tuple = (math.inf, -math.inf)
    v_range: tuple = (math.inf, -math.inf)

    def snapshot_at(self, t: float) -> Snapshot:
        best = min(self.snapshots, key=lambda s: abs(s.t - t))
        return best

    def probe_at(self, x: float) -> ProbeSeries:
        best = min(self.probes, key=lambda p: abs(p.x - x))
        return best


def fit_initial(setup: ProblemSetup, w: StencilWeights) -> StateVector:
    """Interpolate the initial profiles, honouring the boundary plan.

    Per species this solves an (N+5) x (N+5) banded system: one
    interpolation row per knot framed by the four boundary-condition
    stencil rows of that species.
    """
    mesh = setup.mesh
    n = mesh.n
    xs = mesh.knots()
    u0, v0 = setup.initial.sample(xs)

    params = []
    for species, values in (("u", u0), ("v", v0)):
        a = bandlu.BandedMatrix.zeros(n + 5, 4, 4)
        rhs = np.empty(n + 5)
        # Interpolation rows: row m+2 touches parameter columns m..m+4,
        # a fixed diagonal per stencil position.
        for jj in range(5):
            a.ab[a.kl + a.ku + 2 - jj, jj : jj + n + 1] = w.rows[0][jj]
        rhs[2 : n + 3] = values
        for side, rows, base_col in (("left", (0, 1), 0),
                                     ("right", (n + 3, n + 4), n)):
            pair = setup.boundary.pair(side=side, species=species)
            for row, bc in zip(rows, pair):
                order, target = bc.order, bc.target
                if order == 0:
                    # A value condition duplicates the interpolation row
                    # at the boundary knot; close with a free even-order
                    # end condition instead (the value stays pinned by
                    # interpolation).
                    order = 2 if pair[0].order != 2 and pair[1].order != 2 else 4
                    target = 0.0
                for jj in range(5):
                    a.set(row, base_col + jj, w.rows[order][jj])
                rhs[row] = target
        try:
            fact = bandlu.lu_factor(a)
        except bandlu.SingularMatrixError as exc:
            raise bandlu.SingularMatrixError(
                f"singular initial fit for species '{species}': {exc}"
            ) from exc
        params.append(bandlu.solve(fact, rhs))
    return StateVector(delta=params[0], gamma=params[1])


def step(state: StateVector, setup: ProblemSetup, w: StencilWeights,
         dt: float, gm: GhostMap) -> StateVector:
    """Advance the state by one time step of length dt."""
    system = assemble(setup, state, w, dt, gm)
    fact = bandlu.lu_factor(system.a)
    return _finish_step(state, bandlu.solve(fact, system.rhs), gm)


def _finish_step(state: StateVector, interior: np.ndarray,
                 gm: GhostMap) -> StateVector:
    n = state.n
    delta = np.empty_like(state.delta)
    gamma = np.empty_like(state.gamma)
    delta[2 : n + 3] = interior[0::2]
    gamma[2 : n + 3] = interior[1::2]
    delta[0:2] = gm.ghosts("u", "left", delta[2:5])
    gamma[0:2] = gm.ghosts("v", "left", gamma[2:5])
    delta[n + 3 : n + 5] = gm.ghosts("u", "right", delta[n : n + 3])
    gamma[n + 3 : n + 5] = gm.ghosts("v", "right", gamma[n : n + 3])
    return StateVector(delta=delta, gamma=gamma)


def _probe_weights(setup: ProblemSetup, xs: tuple) -> list:
    """Per probe point: (first parameter index, basis weight vector)."""
    mesh = setup.mesh
    plans = []
    for x in xs:
        if not mesh.x0 - _SLACK <= x <= mesh.xN + _SLACK:
            raise ValueError(
                f"probe point {x!r} outside the domain "
                f"[{mesh.x0!r}, {mesh.xN!r}]"
            )
        cell = min(max(int(math.floor((x - mesh.x0) / mesh.h)), 0), mesh.n - 1)
        first = cell - 2
        weights = np.array(
            [basis_value(mesh, i, x, 0) for i in range(first, cell + 4)]
        )
        plans.append((first + 2, weights))
    return plans


def _step_schedule(dt: float, t_end: float) -> tuple[int, float]:
    """Number of steps and the (possibly shortened) final step length."""
    n_steps = max(int(math.ceil(t_end / dt - _SLACK)), 1)
    dt_last = t_end - (n_steps - 1) * dt
    if abs(dt_last - dt) <= _SLACK * dt:
        dt_last = dt
    return n_steps, dt_last


def run(setup: ProblemSetup, config: SolverConfig,
        observer: Callable[[float, StateVector], None] | None = None,
        ) -> Trajectory:
    """Advance from the fitted initial state to t_end, capturing output.

    Snapshots are taken at the step landing nearest each requested time
    (within half a step).  Probe series record every step.  For models
    whose linearised matrix is state-independent the factorisation is
    built once and reused; otherwise the system is rebuilt and factored
    every step.
    """
    mesh = setup.mesh
    w = stencil_weights(mesh.h)
    gm = build_ghost_map(setup.boundary, w)
    state = fit_initial(setup, w)

    n_steps, dt_last = _step_schedule(config.dt, config.t_end)

    def time_of(k: int) -> float:
        return config.t_end if k == n_steps else k * config.dt

    snapshot_steps: dict[int, list[float]] = {}
    for t_req in config.snapshot_times:
        k = min(max(int(round(t_req / config.dt)), 0), n_steps)
        snapshot_steps.setdefault(k, []).append(t_req)

    probe_plans = _probe_weights(setup, config.probe_points)
    probe_u = [[] for _ in probe_plans]
    probe_v = [[] for _ in probe_plans]
    probe_times = []

    traj = Trajectory()
    linear = setup.coefficients.state_independent

    def capture(k: int, nod_u: np.ndarray, nod_v: np.ndarray) -> None:
        t = time_of(k)
        if probe_plans:
            probe_times.append(t)
            for idx, (lo, weights) in enumerate(probe_plans):
                probe_u[idx].append(weights @ state.delta[lo : lo + 6])
                probe_v[idx].append(weights @ state.gamma[lo : lo + 6])
        for _ in snapshot_steps.get(k, ()):
            traj.snapshots.append(Snapshot(t=t, u=nod_u.copy(), v=nod_v.copy()))
        traj.u_range = (min(traj.u_range[0], float(nod_u.min())),
                        max(traj.u_range[1], float(nod_u.max())))
        traj.v_range = (min(traj.v_range[0], float(nod_v.min())),
                        max(traj.v_range[1], float(nod_v.max())))

    def nodal_pair(s: StateVector) -> tuple[np.ndarray, np.ndarray]:
        nod = nodal_values(s, w)
        return nod.u[0], nod.v[0]

    nod_u, nod_v = nodal_pair(state)
    capture(0, nod_u, nod_v)
    prev_u, prev_v = nod_u, nod_v

    factorised = {}
    for k in range(1, n_steps + 1):
        dt_k = dt_last if k == n_steps else config.dt
        try:
            if linear:
                if dt_k not in factorised:
                    c = setup.coefficients
                    nu_k = compute_nu(compute_beta(c, 0.0, 0.0, dt_k),
                                      w, c.a1, c.a2).nu
                    system = _assemble_from_nu(setup, state, nu_k, gm)
                    factorised[dt_k] = (bandlu.lu_factor(system.a), nu_k)
                    rhs = system.rhs
                else:
                    fact_k, nu_k = factorised[dt_k]
                    rhs = _explicit_rhs_folded(setup, state, nu_k, gm)
                fact_k = factorised[dt_k][0]
                state = _finish_step(state, bandlu.solve(fact_k, rhs), gm)
            else:
                state = step(state, setup, w, dt_k, gm)
        except (bandlu.SingularMatrixError, ValueError) as exc:
            raise StepFailure(k, time_of(k), exc) from exc

        nod_u, nod_v = nodal_pair(state)
        if k == n_steps:
            traj.penultimate_u, traj.penultimate_v = prev_u, prev_v
            traj.final_u, traj.final_v = nod_u, nod_v
        prev_u, prev_v = nod_u, nod_v
        capture(k, nod_u, nod_v)
        if observer is not None:
            observer(time_of(k), state)

    times = np.array(probe_times)
    for idx, (x, _) in enumerate(zip(config.probe_points, probe_plans)):
        traj.probes.append(
            ProbeSeries(x=x, times=times,
                        u=np.array(probe_u[idx]), v=np.array(probe_v[idx]))
        )
    traj.snapshots.sort(key=lambda s: s.t)
    return traj
