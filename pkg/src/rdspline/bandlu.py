"""Banded LU factorisation with partial pivoting, plus a dense oracle.

Matrices are held in LAPACK general-band layout: entry (i, j) lives at
``ab[kl + ku + i - j, j]`` in an array of ``2*kl + ku + 1`` rows; the top
``kl`` rows are workspace for the row interchanges of the factorisation.
The production factor/solve pair wraps LAPACK's ``gbtrf``/``gbtrs``;
``dense_solve`` is an independent plain Gaussian elimination used as the
reference in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs

__all__ = [
    "SingularMatrixError",
    "DimensionMismatchError",
    "BandedMatrix",
    "BandedLU",
    "lu_factor",
    "solve",
    "dense_solve",
]

_PIVOT_FLOOR = 1e-300


class SingularMatrixError(ValueError):
    """A pivot column carries no usable magnitude."""


class DimensionMismatchError(ValueError):
    """Operand shapes do not agree with the matrix order."""


@dataclass
class BandedMatrix:
    """Square band matrix of order n with bandwidths kl (lower), ku (upper)."""

    n: int
    kl: int
    ku: int
    ab: np.ndarray

    @classmethod
    def zeros(cls, n: int, kl: int, ku: int) -> "BandedMatrix":
        if n <= 0 or kl < 0 or ku < 0:
            raise DimensionMismatchError(
                f"invalid band shape n={n}, kl={kl}, ku={ku}"
            )
        return cls(n, kl, ku, np.zeros((2 * kl + ku + 1, n)))

    def _storage_row(self, i: int, j: int) -> int:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise DimensionMismatchError(f"index ({i}, {j}) outside order {self.n}")
        if j - i > self.ku or i - j > self.kl:
            raise DimensionMismatchError(
                f"entry ({i}, {j}) outside band kl={self.kl}, ku={self.ku}"
            )
        return self.kl + self.ku + i - j

    def set(self, i: int, j: int, value: float) -> None:
        self.ab[self._storage_row(i, j), j] = value

    def add(self, i: int, j: int, value: float) -> None:
        self.ab[self._storage_row(i, j), j] += value

    def get(self, i: int, j: int) -> float:
        if j - i > self.ku or i - j > self.kl:
            return 0.0
        return float(self.ab[self.kl + self.ku + i - j, j])

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n, self.n))
        for d in range(-self.kl, self.ku + 1):
            row = self.kl + self.ku - d
            cols = np.arange(max(d, 0), min(self.n, self.n + d))
            dense[cols - d, cols] = self.ab[row, cols]
        return dense


@dataclass(frozen=True)
class BandedLU:
    """In-band LU factors and the pivot-row log of a BandedMatrix."""

    n: int
    kl: int
    ku: int
    lu: np.ndarray
    ipiv: np.ndarray


def lu_factor(a: BandedMatrix) -> BandedLU:
    """Factor a band matrix, recording row interchanges.

    Raises SingularMatrixError when a pivot falls below 1e-300 in
    magnitude, which also covers structurally zero matrices.
    """
    expected_rows = 2 * a.kl + a.ku + 1
    if a.ab.shape != (expected_rows, a.n):
        raise DimensionMismatchError(
            f"band storage shape {a.ab.shape} does not match "
            f"({expected_rows}, {a.n})"
        )
    gbtrf = get_lapack_funcs(("gbtrf",), (a.ab,))[0]
    lu, ipiv, info = gbtrf(a.ab, a.kl, a.ku, overwrite_ab=False)
    if info < 0:
        raise ValueError(f"illegal argument {-info} passed to band factorisation")
    diag = np.abs(lu[a.kl + a.ku, :])
    if info > 0 or np.any(diag < _PIVOT_FLOOR):
        col = int(info - 1) if info > 0 else int(np.argmin(diag))
        raise SingularMatrixError(f"zero pivot encountered in column {col}")
    return BandedLU(a.n, a.kl, a.ku, lu, ipiv)


def solve(factored: BandedLU, b: np.ndarray) -> np.ndarray:
    """Forward/back substitution through the stored factors."""
    rhs = np.asarray(b, dtype=float)
    if rhs.shape != (factored.n,):
        raise DimensionMismatchError(
            f"right-hand side has shape {rhs.shape}, expected ({factored.n},)"
        )
    gbtrs = get_lapack_funcs(("gbtrs",), (factored.lu, rhs))[0]
    x, info = gbtrs(factored.lu, factored.kl, factored.ku, rhs, factored.ipiv,
                    overwrite_b=False)
    if info != 0:
        raise ValueError(f"band substitution failed with code {info}")
    return x


def dense_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Reference solver: dense Gaussian elimination with partial pivoting."""
    work = np.array(a, dtype=float)
    rhs = np.array(b, dtype=float)
    if work.ndim != 2 or work.shape[0] != work.shape[1]:
        raise DimensionMismatchError(f"matrix shape {work.shape} is not square")
    n = work.shape[0]
    if rhs.shape != (n,):
        raise DimensionMismatchError(
            f"right-hand side has shape {rhs.shape}, expected ({n},)"
        )
    for k in range(n):
        p = k + int(np.argmax(np.abs(work[k:, k])))
        if abs(work[p, k]) < _PIVOT_FLOOR:
            raise SingularMatrixError(f"zero pivot encountered in column {k}")
        if p != k:
            work[[k, p]] = work[[p, k]]
            rhs[[k, p]] = rhs[[p, k]]
        mults = work[k + 1 :, k] / work[k, k]
        work[k + 1 :, k:] -= mults[:, None] * work[k, k:]
        rhs[k + 1 :] -= mults * rhs[k]
    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (rhs[k] - work[k, k + 1 :] @ x[k + 1 :]) / work[k, k]
    return x
