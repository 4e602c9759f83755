"""Banded symmetric storage, banded Cholesky solves and small dense eigenproblems.

Factorizations go through LAPACK (``pbtrf``/``pbtrs`` via SciPy); the
eigensolver is LAPACK ``syevd`` via NumPy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

from .exceptions import BudgetExceededError, NotPositiveDefiniteError

__all__ = [
    "BandedSymMatrix",
    "BandedCholesky",
    "cholesky_banded",
    "sym_eigen_dense",
    "DENSE_EIGEN_BUDGET",
]

DENSE_EIGEN_BUDGET = 512


@dataclass(frozen=True)
class BandedSymMatrix:
    """Symmetric matrix kept as its diagonal and sub-diagonals.

    ``bands[d, j]`` holds ``A[j + d, j]`` (LAPACK lower band layout), so
    ``bands`` has shape ``(bandwidth + 1, order)``.
    """

    bands: np.ndarray

    @property
    def order(self) -> int:
        return self.bands.shape[1]

    @property
    def bandwidth(self) -> int:
        return self.bands.shape[0] - 1

    @classmethod
    def from_dense(cls, a, bandwidth=None):
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        if bandwidth is None:
            nz = np.nonzero(np.tril(a))
            bandwidth = int(np.max(nz[0] - nz[1])) if nz[0].size else 0
        bands = np.zeros((bandwidth + 1, n))
        for d in range(bandwidth + 1):
            bands[d, : n - d] = np.diagonal(a, -d)
        return cls(bands)

    @classmethod
    def from_sparse(cls, a):
        """Build from a symmetric SciPy sparse matrix (lower triangle is used)."""
        a = scipy.sparse.tril(a, format="coo")
        n = a.shape[0]
        offsets = a.row - a.col
        bandwidth = int(offsets.max()) if offsets.size else 0
        bands = np.zeros((bandwidth + 1, n))
        np.add.at(bands, (offsets, a.col), a.data)
        return cls(bands)

    def to_dense(self) -> np.ndarray:
        n = self.order
        a = np.zeros((n, n))
        for d in range(self.bandwidth + 1):
            idx = np.arange(n - d)
            a[idx + d, idx] = self.bands[d, : n - d]
            a[idx, idx + d] = self.bands[d, : n - d]
        return a

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.bands[0] * x
        n = self.order
        for d in range(1, self.bandwidth + 1):
            band = self.bands[d, : n - d]
            y[d:] += band * x[: n - d]
            y[: n - d] += band * x[d:]
        return y


@dataclass(frozen=True)
class BandedCholesky:
    """Lower banded Cholesky factor ``L`` with ``L @ L.T == A``."""

    factor: np.ndarray

    def solve(self, b) -> np.ndarray:
        return scipy.linalg.cho_solve_banded((self.factor, True), b, check_finite=False)

    def logdet(self) -> float:
        return 2.0 * float(np.sum(np.log(self.factor[0])))


def cholesky_banded(a: BandedSymMatrix) -> BandedCholesky:
    """Factor a symmetric positive definite banded matrix.

    Raises
    ------
    NotPositiveDefiniteError
        If a nonpositive pivot is met.
    """
    try:
        factor = scipy.linalg.cholesky_banded(a.bands, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    return BandedCholesky(factor)


def sym_eigen_dense(a) -> np.ndarray:
    """Eigenvalues of a dense symmetric matrix, in ascending order."""
    a = np.asarray(a, dtype=float)
    if a.shape[0] > DENSE_EIGEN_BUDGET:
        raise BudgetExceededError(
            f"dense eigensolve limited to order {DENSE_EIGEN_BUDGET}, got {a.shape[0]}"
        )
    return np.linalg.eigvalsh(a)
