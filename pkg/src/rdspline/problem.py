"""Two-species reaction-diffusion problem definitions and model presets.

The governing system is

    u_t = a1 u_xx + b1 u + c1 v + d1 u^2 v + e1 u v + m1 u v^2 + n1
    v_t = a2 v_xx + b2 u + c2 v + d2 u^2 v + e2 u v + m2 u v^2 + n2

and every supported model (linear benchmark, Brusselator, Schnakenberg,
Gray-Scott) is a particular assignment of these fourteen coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import expressions
from .basis import UniformMesh, make_mesh

__all__ = [
    "UnknownModelError",
    "ParameterError",
    "RDCoefficients",
    "BoundaryCondition",
    "BoundaryPlan",
    "InitialCondition",
    "ProblemSetup",
    "PresetRun",
    "MODEL_NAMES",
    "coefficients_from_table",
    "reaction_eval",
    "analytic_linear",
    "preset",
]

MODEL_NAMES = ("linear", "brusselator", "schnakenberg", "gray-scott")


class UnknownModelError(ValueError):
    """Model name outside the supported set."""


class ParameterError(ValueError):
    """Missing or unexpected model constant."""


@dataclass(frozen=True)
class RDCoefficients:
    """Coefficients of the general two-species reaction-diffusion system."""

    a1: float = 0.0
    a2: float = 0.0
    b1: float = 0.0
    b2: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    d1: float = 0.0
    d2: float = 0.0
    e1: float = 0.0
    e2: float = 0.0
    m1: float = 0.0
    m2: float = 0.0
    n1: float = 0.0
    n2: float = 0.0

    def __post_init__(self):
        if self.a1 < 0.0 or self.a2 < 0.0:
            raise ParameterError(
                f"diffusion coefficients must be non-negative, "
                f"got a1={self.a1!r}, a2={self.a2!r}"
            )

    @property
    def state_independent(self) -> bool:
        """True when the linearised step matrix does not depend on u, v."""
        return not any((self.d1, self.d2, self.e1, self.e2, self.m1, self.m2))


@dataclass(frozen=True)
class BoundaryCondition:
    """One constant constraint on a species derivative at a domain end.

    A pair of conditions closing the same end must not combine orders
    0 and 2: the collocation row at a boundary knot is itself a linear
    combination of the value and second-derivative stencils, so that
    pair leaves the step system rank-deficient.
    """

    species: str  # "u" or "v"
    side: str  # "left" or "right"
    order: int  # 0 = value, 1..4 = derivative order
    target: float = 0.0

    def __post_init__(self):
        if self.species not in ("u", "v"):
            raise ValueError(f"species must be 'u' or 'v', got {self.species!r}")
        if self.side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        if self.order not in (0, 1, 2, 3, 4):
            raise ValueError(f"boundary order must be 0..4, got {self.order!r}")


@dataclass(frozen=True)
class BoundaryPlan:
    """Eight boundary constraints: two of distinct order per species per end."""

    conditions: tuple

    def __post_init__(self):
        object.__setattr__(self, "conditions", tuple(self.conditions))
        if len(self.conditions) != 8:
            raise ValueError(
                f"a boundary plan needs exactly 8 conditions, "
                f"got {len(self.conditions)}"
            )
        for species in ("u", "v"):
            for side in ("left", "right"):
                pair = self.pair(species, side)
                if len(pair) != 2:
                    raise ValueError(
                        f"need exactly 2 conditions for ({species}, {side}), "
                        f"got {len(pair)}"
                    )
                if pair[0].order == pair[1].order:
                    raise ValueError(
                        f"duplicate order {pair[0].order} for ({species}, {side})"
                    )

    def pair(self, species: str, side: str) -> tuple:
        return tuple(
            c for c in self.conditions if c.species == species and c.side == side
        )


@dataclass(frozen=True)
class InitialCondition:
    """Scalar initial profiles for both species."""

    u_init: Callable[[float], float]
    v_init: Callable[[float], float]

    def sample(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        u = np.array([float(self.u_init(float(x))) for x in xs])
        v = np.array([float(self.v_init(float(x))) for x in xs])
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise ValueError("initial condition produced non-finite values")
        return u, v


@dataclass(frozen=True)
class ProblemSetup:
    """Everything needed to discretise one reaction-diffusion run."""

    coefficients: RDCoefficients
    mesh: UniformMesh
    boundary: BoundaryPlan
    initial: InitialCondition
    label: str = ""


@dataclass(frozen=True)
class PresetRun:
    """A preset problem plus the time-stepping defaults that go with it."""

    setup: ProblemSetup
    dt: float
    t_end: float
    snapshot_times: tuple
    probe_points: tuple


def _require(params: dict, names: tuple, model: str) -> dict:
    unknown = set(params) - set(names)
    if unknown:
        raise ParameterError(
            f"unknown constants {sorted(unknown)} for model '{model}'; "
            f"expected {list(names)}"
        )
    missing = [n for n in names if n not in params]
    if missing:
        raise ParameterError(f"model '{model}' needs constants {missing}")
    return {k: float(v) for k, v in params.items()}


def normalize_model_name(model: str) -> str:
    name = model.strip().lower().replace("_", "-").replace(" ", "-")
    if name == "grayscott":
        name = "gray-scott"
    if name not in MODEL_NAMES:
        raise UnknownModelError(
            f"unknown model {model!r}; choose one of {', '.join(MODEL_NAMES)}"
        )
    return name


def coefficients_from_table(model: str, **params) -> RDCoefficients:
    """Instantiate the coefficient row of one named model.

    Each model consumes exactly its own constants: linear (a, b, d),
    brusselator (eps1, eps2, A, B), schnakenberg (gamma, a, b, d) and
    gray-scott (eps1, eps2, f, k).
    """
    name = normalize_model_name(model)
    if name == "linear":
        p = _require(params, ("a", "b", "d"), name)
        return RDCoefficients(
            a1=p["d"], a2=p["d"], b1=-p["a"], c1=1.0, c2=-p["b"]
        )
    if name == "brusselator":
        p = _require(params, ("eps1", "eps2", "A", "B"), name)
        return RDCoefficients(
            a1=p["eps1"], a2=p["eps2"], b1=-(p["B"] + 1.0), b2=p["B"],
            d1=1.0, d2=-1.0, n1=p["A"],
        )
    if name == "schnakenberg":
        p = _require(params, ("gamma", "a", "b", "d"), name)
        g = p["gamma"]
        return RDCoefficients(
            a1=1.0, a2=p["d"], b1=-g, d1=g, d2=-g, n1=g * p["a"], n2=g * p["b"]
        )
    # gray-scott
    p = _require(params, ("eps1", "eps2", "f", "k"), name)
    return RDCoefficients(
        a1=p["eps1"], a2=p["eps2"], b1=-p["f"], c2=-(p["f"] + p["k"]),
        m1=-1.0, m2=1.0, n1=p["f"],
    )


def reaction_eval(c: RDCoefficients, u, v):
    """Reaction terms (f, g) of both species at state (u, v).

    Accepts scalars or broadcastable arrays.
    """
    uv = u * v
    f = c.b1 * u + c.c1 * v + c.d1 * u * uv + c.e1 * uv + c.m1 * uv * v + c.n1
    g = c.b2 * u + c.c2 * v + c.d2 * u * uv + c.e2 * uv + c.m2 * uv * v + c.n2
    return f, g


def analytic_linear(x, t, a: float, b: float, d: float):
    """Closed-form solution of the linear benchmark system.

    u = (exp(-(a+d)t) + exp(-(b+d)t)) cos(x)
    v = (a-b) exp(-(b+d)t) cos(x)
    """
    decay_u = np.exp(-(a + d) * t)
    decay_v = np.exp(-(b + d) * t)
    cx = np.cos(x)
    return (decay_u + decay_v) * cx, (a - b) * decay_v * cx


def _both_sides(species_orders: dict) -> tuple:
    conditions = []
    for side in ("left", "right"):
        for species, orders in species_orders.items():
            for order in orders:
                conditions.append(BoundaryCondition(species, side, order, 0.0))
    return tuple(conditions)


_SCHNAKENBERG_U0 = "0.919145 + 0.001*sum(j,1,25,cos(2*pi*j*x)/j)"
_SCHNAKENBERG_V0 = "0.937903 + 0.001*sum(j,1,25,cos(2*pi*j*x)/j)"


def _preset_table() -> dict:
    return {
        "linear": dict(
            constants=dict(a=0.1, b=0.01, d=1.0),
            domain=(0.0, math.pi / 2.0),
            n=512, dt=0.01, t_end=1.0,
            snapshots=(1.0,), probes=(),
        ),
        "brusselator": dict(
            constants=dict(eps1=1e-4, eps2=1e-4, A=1.0, B=3.4),
            domain=(0.0, 1.0),
            n=200, dt=0.01, t_end=15.0,
            snapshots=(3.0, 6.0, 10.8, 13.8),
            probes=(0.0, 0.2, 0.4, 0.6, 0.8, 1.0),
        ),
        # Unit-length domain: the Turing band of these constants puts
        # the fastest-growing mode at nine full periods per unit length,
        # the observed nine-oscillation pattern.
        "schnakenberg": dict(
            constants=dict(gamma=1e4, a=0.126779, b=0.792366, d=10.0),
            domain=(0.0, 1.0),
            n=100, dt=5e-5, t_end=2.5,
            snapshots=(2.5,), probes=(),
        ),
        # Feed/decay are the descaled pulse-splitting constants for this
        # diffusion ratio (raw 9 and 0.4 scale by eps2 and eps2^(1/3)).
        # A decay rate above ~0.125 would kill the quarter-amplitude
        # seed outright: its growth rate is u*v - decay.
        "gray-scott": dict(
            constants=dict(eps1=1.0, eps2=0.01, feed=0.09,
                           decay=0.4 * 0.01 ** (1.0 / 3.0)),
            domain=(-50.0, 50.0),
            n=400, dt=0.2, t_end=1000.0,
            snapshots=(100.0, 500.0, 1000.0), probes=(),
        ),
    }


def preset(model: str, **overrides) -> PresetRun:
    """Complete configuration of one named model.

    Recognised overrides: ``n``, ``dt``, ``t_end``, ``snapshots``,
    ``probes``, plus the model's own constants (e.g. ``B=3.0`` for the
    Brusselator or ``feed=5.0`` for Gray-Scott).
    """
    name = normalize_model_name(model)
    spec = _preset_table()[name]
    constants = dict(spec["constants"])

    plain = {}
    for key, value in overrides.items():
        if key in constants:
            constants[key] = float(value)
        elif key in ("n", "dt", "t_end", "snapshots", "probes"):
            plain[key] = value
        else:
            raise ParameterError(
                f"unknown override {key!r} for model '{name}'; "
                f"recognised: n, dt, t_end, snapshots, probes, "
                f"{sorted(constants)}"
            )
    n = int(plain.get("n", spec["n"]))
    dt = float(plain.get("dt", spec["dt"]))
    t_end = float(plain.get("t_end", spec["t_end"]))
    snapshots = tuple(float(t) for t in plain.get("snapshots", spec["snapshots"]))
    probes = tuple(float(x) for x in plain.get("probes", spec["probes"]))

    x0, xN = spec["domain"]
    mesh = make_mesh(x0, xN, n)

    if name == "linear":
        coeffs = coefficients_from_table(name, **constants)
        a, b, d = constants["a"], constants["b"], constants["d"]
        initial = InitialCondition(
            u_init=lambda x: analytic_linear(x, 0.0, a, b, d)[0],
            v_init=lambda x: analytic_linear(x, 0.0, a, b, d)[1],
        )
        # The closed-form solution has zero odd derivatives at x=0 and
        # zero even derivatives at x=pi/2, so these closures add no
        # modelling error.  The right end pairs the value with the
        # fourth derivative: value+second is a rank-deficient pair.
        boundary = BoundaryPlan(
            (
                BoundaryCondition("u", "left", 1), BoundaryCondition("u", "left", 3),
                BoundaryCondition("v", "left", 1), BoundaryCondition("v", "left", 3),
                BoundaryCondition("u", "right", 0), BoundaryCondition("u", "right", 4),
                BoundaryCondition("v", "right", 0), BoundaryCondition("v", "right", 4),
            )
        )
    elif name == "brusselator":
        coeffs = coefficients_from_table(name, **constants)
        initial = InitialCondition(
            u_init=lambda x: 0.5,
            v_init=lambda x: 1.0 + 5.0 * x,
        )
        boundary = BoundaryPlan(_both_sides({"u": (2, 3), "v": (2, 3)}))
    elif name == "schnakenberg":
        coeffs = coefficients_from_table(name, **constants)
        u_expr = expressions.parse(_SCHNAKENBERG_U0)
        v_expr = expressions.parse(_SCHNAKENBERG_V0)
        initial = InitialCondition(u_init=u_expr, v_init=v_expr)
        boundary = BoundaryPlan(_both_sides({"u": (1, 3), "v": (1, 3)}))
    else:  # gray-scott
        feed, decay = constants["feed"], constants["decay"]
        coeffs = coefficients_from_table(
            name, eps1=constants["eps1"], eps2=constants["eps2"],
            f=feed, k=decay - feed,
        )
        half_width = 0.5 * (xN - x0)
        bump = expressions.parse(
            f"sin(pi*(x-{half_width!r})/{2.0 * half_width!r})^100"
        )
        initial = InitialCondition(
            u_init=lambda x: 1.0 - 0.5 * bump(x),
            v_init=lambda x: 0.25 * bump(x),
        )
        boundary = BoundaryPlan(
            (
                BoundaryCondition("u", "left", 0, 1.0),
                BoundaryCondition("u", "left", 1, 0.0),
                BoundaryCondition("v", "left", 0, 0.0),
                BoundaryCondition("v", "left", 1, 0.0),
                BoundaryCondition("u", "right", 0, 1.0),
                BoundaryCondition("u", "right", 1, 0.0),
                BoundaryCondition("v", "right", 0, 0.0),
                BoundaryCondition("v", "right", 1, 0.0),
            )
        )

    setup = ProblemSetup(
        coefficients=coeffs, mesh=mesh, boundary=boundary,
        initial=initial, label=name,
    )
    return PresetRun(
        setup=setup, dt=dt, t_end=t_end,
        snapshot_times=snapshots, probe_points=probes,
    )
