"""Collocation solver for 1-D two-species reaction-diffusion systems.

Space is discretised with quintic trigonometric B-splines on a uniform
knot grid, time with the Crank-Nicolson scheme; nonlinear reactions are
linearised about the current step, so each advance is one banded solve.
Ships presets for a linear benchmark with a closed-form solution and
for the Brusselator, Schnakenberg and Gray-Scott models.
"""

from .basis import (
    StencilWeights,
    UniformMesh,
    basis_value,
    make_mesh,
    stencil_weights,
)
from .diagnostics import (
    ConvergenceTable,
    ErrorReport,
    convergence_study,
    count_interior_maxima,
    estimate_period,
    l2_linf,
    relative_error,
)
from .discretize import (
    GhostMap,
    StateVector,
    assemble,
    build_ghost_map,
    compute_beta,
    compute_nu,
    nodal_values,
)
from .expressions import Expression, evaluate, parse
from .problem import (
    BoundaryCondition,
    BoundaryPlan,
    InitialCondition,
    PresetRun,
    ProblemSetup,
    RDCoefficients,
    analytic_linear,
    coefficients_from_table,
    preset,
    reaction_eval,
)
from .stepper import (
    ProbeSeries,
    Snapshot,
    SolverConfig,
    Trajectory,
    fit_initial,
    run,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "UniformMesh",
    "StencilWeights",
    "make_mesh",
    "basis_value",
    "stencil_weights",
    "RDCoefficients",
    "BoundaryCondition",
    "BoundaryPlan",
    "InitialCondition",
    "ProblemSetup",
    "PresetRun",
    "coefficients_from_table",
    "reaction_eval",
    "analytic_linear",
    "preset",
    "Expression",
    "parse",
    "evaluate",
    "StateVector",
    "GhostMap",
    "nodal_values",
    "compute_beta",
    "compute_nu",
    "build_ghost_map",
    "assemble",
    "SolverConfig",
    "Snapshot",
    "ProbeSeries",
    "Trajectory",
    "fit_initial",
    "step",
    "run",
    "ErrorReport",
    "ConvergenceTable",
    "l2_linf",
    "relative_error",
    "count_interior_maxima",
    "estimate_period",
    "convergence_study",
]
