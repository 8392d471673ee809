"""Error norms, convergence tables and pattern metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problem import analytic_linear, preset
from .stepper import SolverConfig, run

__all__ = [
    "InsufficientPeaksError",
    "ErrorReport",
    "ConvergenceRow",
    "ConvergenceTable",
    "l2_linf",
    "relative_error",
    "count_interior_maxima",
    "estimate_period",
    "convergence_study",
]


class InsufficientPeaksError(ValueError):
    """A period estimate needs at least two qualifying peaks."""


@dataclass(frozen=True)
class ErrorReport:
    """Discrete error norms of one run against a reference."""

    l2_u: float
    linf_u: float
    l2_v: float
    linf_v: float
    n: int
    dt: float
    t: float
    label: str = ""


@dataclass(frozen=True)
class ConvergenceRow:
    dt: float
    n: int
    l2_u: float
    linf_u: float
    l2_v: float
    linf_v: float
    order_u: float
    order_v: float


@dataclass(frozen=True)
class ConvergenceTable:
    """Error norms per time step, sorted by increasing dt.

    The observed order attached to a row compares it against the next
    smaller step: ``log(e_i/e_{i-1}) / log(dt_i/dt_{i-1})`` on the
    maximum-norm errors; the smallest step carries NaN.
    """

    rows: tuple


def l2_linf(numeric: np.ndarray, exact: np.ndarray,
            h: float) -> tuple[float, float]:
    """Discrete norms sqrt(h * sum(diff^2)) and max|diff|."""
    a = np.asarray(numeric, dtype=float)
    b = np.asarray(exact, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(math.sqrt(h * float(diff @ diff))), float(np.max(np.abs(diff)))


def relative_error(prev: np.ndarray, new: np.ndarray) -> float:
    """Successive-step relative error sqrt(sum|new-prev|^2 / sum|new|^2)."""
    a = np.asarray(prev, dtype=float)
    b = np.asarray(new, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    denom = float(b @ b)
    if denom == 0.0:
        raise ZeroDivisionError("successive-step error undefined for a zero state")
    diff = b - a
    return float(math.sqrt(float(diff @ diff) / denom))


def _qualified_peaks(values: np.ndarray, prominence: float) -> list[int]:
    """Interior strict local maxima whose height clears the lowest point
    on each side (up to the next strictly higher sample or the array
    end) by at least `prominence`."""
    n = values.shape[0]
    kept = []
    for j in range(1, n - 1):
        peak = values[j]
        if not (peak > values[j - 1] and peak > values[j + 1]):
            continue
        left_min = peak
        for i in range(j - 1, -1, -1):
            if values[i] > peak:
                break
            left_min = min(left_min, values[i])
        right_min = peak
        for i in range(j + 1, n):
            if values[i] > peak:
                break
            right_min = min(right_min, values[i])
        if peak - left_min >= prominence and peak - right_min >= prominence:
            kept.append(j)
    return kept


def count_interior_maxima(profile: np.ndarray, prominence: float) -> int:
    """Number of interior local maxima with the requested prominence.

    Adding a constant to the profile does not change the count.
    """
    if prominence <= 0.0:
        raise ValueError(f"prominence must be positive, got {prominence!r}")
    values = np.asarray(profile, dtype=float)
    if values.ndim != 1 or values.shape[0] < 3:
        return 0
    return len(_qualified_peaks(values, prominence))


def estimate_period(series) -> float:
    """Mean spacing of successive peaks of a (t, value) series.

    Peaks are interior local maxima with prominence at least 5% of the
    series range.
    """
    pairs = list(series)
    times = np.array([float(t) for t, _ in pairs])
    values = np.array([float(v) for _, v in pairs])
    if times.shape[0] < 3:
        raise InsufficientPeaksError("series too short to hold two peaks")
    span = float(values.max() - values.min())
    if span == 0.0:
        raise InsufficientPeaksError("constant series has no peaks")
    peaks = _qualified_peaks(values, 0.05 * span)
    if len(peaks) < 2:
        raise InsufficientPeaksError(
            f"found {len(peaks)} qualifying peak(s); need at least 2"
        )
    peak_times = times[peaks]
    return float(np.mean(np.diff(peak_times)))


def convergence_study(a: float, b: float, d: float, n: int,
                      dts, t_end: float = 1.0) -> ConvergenceTable:
    """Temporal refinement study on the linear benchmark problem.

    Runs every step size to ``t_end`` on an n-interval mesh and compares
    the nodal solution with the closed form.
    """
    entries = []
    for dt in sorted(float(x) for x in dts):
        plan = preset("linear", a=a, b=b, d=d, n=n, dt=dt, t_end=t_end,
                      snapshots=(t_end,), probes=())
        traj = run(plan.setup, SolverConfig(dt=dt, t_end=t_end,
                                            snapshot_times=(t_end,)))
        xs = plan.setup.mesh.knots()
        exact_u, exact_v = analytic_linear(xs, t_end, a, b, d)
        l2u, linfu = l2_linf(traj.final_u, exact_u, plan.setup.mesh.h)
        l2v, linfv = l2_linf(traj.final_v, exact_v, plan.setup.mesh.h)
        entries.append((dt, l2u, linfu, l2v, linfv))

    rows = []
    for i, (dt, l2u, linfu, l2v, linfv) in enumerate(entries):
        if i == 0:
            order_u = order_v = math.nan
        else:
            prev = entries[i - 1]
            ratio = math.log(dt / prev[0])
            order_u = math.log(linfu / prev[2]) / ratio
            order_v = math.log(linfv / prev[4]) / ratio
        rows.append(ConvergenceRow(dt=dt, n=n, l2_u=l2u, linf_u=linfu,
                                   l2_v=l2v, linf_v=linfv,
                                   order_u=order_u, order_v=order_v))
    return ConvergenceTable(rows=tuple(rows))
