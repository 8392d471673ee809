"""Trigonometric quintic B-spline basis on a uniform knot grid.

The basis function attached to knot ``x_m`` is supported on the six
intervals ``(x_{m-3}, x_{m+3})`` and is built from products of five
half-angle sine factors ``sin((x - x_j)/2)``.  Every piece is kept as an
explicit list of such factor products, so derivatives up to order four
are obtained by exact repeated product-rule differentiation (each sine
factor differentiates to half the matching cosine) instead of numeric
differencing.

The normalising constant is

    theta = sin(5h/2) * sin(2h) * sin(3h/2) * sin(h) * sin(h/2),

which is strictly positive for knot spacings ``0 < h < 2*pi/5``; that
bound is therefore a hard validity limit for the mesh.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "MAX_SPACING",
    "MeshError",
    "DegenerateDomainError",
    "DomainTooCoarseError",
    "ThetaDegenerateError",
    "InvalidOrderError",
    "UniformMesh",
    "StencilWeights",
    "make_mesh",
    "basis_value",
    "stencil_weights",
    "theta_constant",
]

# Largest admissible knot spacing: at h = 2*pi/5 the factor sin(5h/2)
# vanishes and the basis normalisation degenerates.
MAX_SPACING = 2.0 * math.pi / 5.0

_SUPPORT = 3  # support radius in intervals
_MAX_ORDER = 4


class MeshError(ValueError):
    """Invalid uniform mesh request."""


class DegenerateDomainError(MeshError):
    """Right endpoint does not exceed the left endpoint."""


class DomainTooCoarseError(MeshError):
    """Knot spacing at or beyond the 2*pi/5 validity limit."""


class ThetaDegenerateError(ValueError):
    """A sine factor of the normalising constant vanishes."""


class InvalidOrderError(ValueError):
    """Derivative order outside the supported range 0..4."""


def theta_constant(h: float) -> float:
    """Normalising constant of the quintic trigonometric basis."""
    return (
        math.sin(2.5 * h)
        * math.sin(2.0 * h)
        * math.sin(1.5 * h)
        * math.sin(h)
        * math.sin(0.5 * h)
    )


# ---------------------------------------------------------------------------
# Symbolic piece machinery.
#
# A factor is (offset, kind): sin((x - offset*h)/2) for kind 0, the matching
# cosine for kind 1.  A term maps a sorted factor tuple to a float
# coefficient; a piece is one such term dict per mesh interval.
# ---------------------------------------------------------------------------


def _merge(dst: dict, factors: tuple, coef: float) -> None:
    dst[factors] = dst.get(factors, 0.0) + coef


def _scaled_product(piece: dict, offset: int, scale: float) -> dict:
    """Multiply every term of a piece by scale * sin((x - offset*h)/2)."""
    out: dict = {}
    for factors, coef in piece.items():
        _merge(out, tuple(sorted(factors + ((offset, 0),))), coef * scale)
    return out


def _differentiate(piece: dict) -> dict:
    out: dict = {}
    for factors, coef in piece.items():
        for k, (offset, kind) in enumerate(factors):
            rest = factors[:k] + factors[k + 1 :]
            if kind == 0:
                _merge(out, tuple(sorted(rest + ((offset, 1),))), 0.5 * coef)
            else:
                _merge(out, tuple(sorted(rest + ((offset, 0),))), -0.5 * coef)
    return out


@lru_cache(maxsize=32)
def _basis_tables(h: float) -> tuple:
    """Piece term lists of the reference basis (knot at 0) and derivatives.

    Returns a tuple indexed by derivative order 0..4; each entry holds six
    term lists, one per support interval [j*h, (j+1)*h) for j = -3..2.
    Term lists are tuples of (coef, factors) ready for evaluation.
    """
    # Order-1 splines are interval indicators; the recurrence
    #   T_i^k = (p_i * T_i^{k-1} - p_{i+k} * T_{i+1}^{k-1}) / sin((k-1)h/2)
    # with p_j = sin((x - x_j)/2) raises the order while accumulating the
    # normalisation 1/theta across levels k = 2..6.
    pieces: dict[int, dict[int, dict]] = {
        i: {i: {(): 1.0}} for i in range(-_SUPPORT, _SUPPORT)
    }
    for order in range(2, 7):
        denom = math.sin(0.5 * (order - 1) * h)
        if denom == 0.0:
            raise ThetaDegenerateError(
                f"sin({order - 1}h/2) vanishes for h={h!r}; "
                f"need 0 < h < {MAX_SPACING!r}"
            )
        lifted: dict[int, dict[int, dict]] = {}
        for i in range(-_SUPPORT, _SUPPORT - order + 1):
            merged: dict[int, dict] = {}
            for interval, terms in pieces[i].items():
                part = _scaled_product(terms, i, 1.0 / denom)
                for fac, coef in part.items():
                    _merge(merged.setdefault(interval, {}), fac, coef)
            for interval, terms in pieces[i + 1].items():
                part = _scaled_product(terms, i + order, -1.0 / denom)
                for fac, coef in part.items():
                    _merge(merged.setdefault(interval, {}), fac, coef)
            lifted[i] = merged
        pieces = lifted

    by_order = [pieces[-_SUPPORT]]
    for _ in range(_MAX_ORDER):
        by_order.append(
            {j: _differentiate(terms) for j, terms in by_order[-1].items()}
        )

    tables = []
    for order_pieces in by_order:
        rows = []
        for j in range(-_SUPPORT, _SUPPORT):
            terms = order_pieces.get(j, {})
            rows.append(
                tuple(
                    (coef, factors)
                    for factors, coef in sorted(terms.items())
                    if coef != 0.0
                )
            )
        tables.append(tuple(rows))
    return tuple(tables)


def _eval_piece(terms: tuple, s: float, h: float) -> float:
    """Evaluate one piece's term list at offset s from the basis knot."""
    contributions = []
    for coef, factors in terms:
        value = coef
        for offset, kind in factors:
            arg = 0.5 * (s - offset * h)
            value *= math.cos(arg) if kind else math.sin(arg)
        contributions.append(value)
    return math.fsum(contributions)


def _reference_value(h: float, s: float, order: int) -> float:
    """Derivative of the reference basis at signed offset s from its knot."""
    support = _SUPPORT * h
    if not (-support < s < support):
        return 0.0
    piece = math.floor(s / h)
    piece = min(max(piece, -_SUPPORT), _SUPPORT - 1)
    tables = _basis_tables(h)
    return _eval_piece(tables[order][piece + _SUPPORT], s, h)


# ---------------------------------------------------------------------------
# Public surface.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniformMesh:
    """Uniform knot grid x0..xN with two ghost knots beyond each end."""

    x0: float
    xN: float
    n: int
    h: float

    def knot(self, m: int) -> float:
        """Coordinate of knot m, valid for the extended range -2..n+2."""
        return self.x0 + m * self.h

    def knots(self) -> np.ndarray:
        """Interior knot coordinates x_0..x_N."""
        return self.x0 + self.h * np.arange(self.n + 1)


def make_mesh(x0: float, xN: float, n: int) -> UniformMesh:
    """Partition [x0, xN] into n uniform intervals.

    Raises
    ------
    DegenerateDomainError
        If ``xN <= x0``.
    MeshError
        If ``n < 8``; five-knot stencils at the innermost collocation
        nodes would otherwise straddle both boundaries.
    DomainTooCoarseError
        If the spacing reaches the 2*pi/5 validity limit.
    """
    if not xN > x0:
        raise DegenerateDomainError(f"need xN > x0, got [{x0!r}, {xN!r}]")
    n = int(n)
    if n < 8:
        raise MeshError(f"need at least 8 intervals, got n={n}")
    h = (xN - x0) / n
    if h >= MAX_SPACING:
        raise DomainTooCoarseError(
            f"spacing h={h!r} reaches the limit 2*pi/5={MAX_SPACING!r}; "
            "increase n"
        )
    return UniformMesh(float(x0), float(xN), n, h)


def basis_value(mesh: UniformMesh, m: int, x: float, order: int = 0) -> float:
    """Order-th derivative of the basis attached to knot m, at x.

    Exactly zero outside the open support ``(x_{m-3}, x_{m+3})``.  Values
    come from the precomputed sine-product pieces, so all derivative
    orders share one analytic definition.
    """
    if order not in (0, 1, 2, 3, 4):
        raise InvalidOrderError(f"derivative order must be 0..4, got {order}")
    if not -2 <= m <= mesh.n + 2:
        raise ValueError(f"knot index {m} outside extended range -2..{mesh.n + 2}")
    return _reference_value(mesh.h, x - mesh.knot(m), order)


@dataclass(frozen=True)
class StencilWeights:
    """Five-knot nodal weights of one basis function, per derivative order.

    ``rows[k, j]`` multiplies the spline parameter at knot offset
    ``j - 2`` when forming the order-k nodal derivative.  Even orders are
    symmetric in the offset and odd ones antisymmetric with a vanishing
    centre, which the constructor enforces exactly.  ``alpha`` packs the
    thirteen independent magnitudes in the conventional order: value
    (a1..a3), first (a4, a5), second (a6..a8), third (a9, a10), fourth
    (a11..a13).
    """

    h: float
    theta: float
    rows: np.ndarray
    alpha: np.ndarray

    def row(self, order: int) -> np.ndarray:
        if order not in (0, 1, 2, 3, 4):
            raise InvalidOrderError(f"derivative order must be 0..4, got {order}")
        return self.rows[order]


def stencil_weights(h: float) -> StencilWeights:
    """Nodal stencil weights for spacing h, by direct basis evaluation."""
    if not 0.0 < h < MAX_SPACING:
        raise ThetaDegenerateError(
            f"spacing h={h!r} outside the admissible range (0, 2*pi/5)"
        )
    theta = theta_constant(h)
    if theta == 0.0:
        raise ThetaDegenerateError(f"normalising constant vanishes for h={h!r}")

    rows = np.zeros((5, 5))
    for order in range(5):
        outer = _reference_value(h, 2.0 * h, order)
        inner = _reference_value(h, h, order)
        centre = _reference_value(h, 0.0, order)
        if order % 2 == 0:
            rows[order] = (outer, inner, centre, inner, outer)
        else:
            rows[order] = (outer, inner, 0.0, -inner, -outer)
    if not np.all(np.isfinite(rows)):
        raise ThetaDegenerateError(f"non-finite stencil weights for h={h!r}")

    alpha = np.array(
        [
            rows[0, 0], rows[0, 1], rows[0, 2],
            -rows[1, 0], -rows[1, 1],
            rows[2, 0], rows[2, 1], rows[2, 2],
            -rows[3, 0], rows[3, 1],
            rows[4, 0], rows[4, 1], rows[4, 2],
        ]
    )
    return StencilWeights(h=h, theta=theta, rows=rows, alpha=alpha)
