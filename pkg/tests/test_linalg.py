import numpy as np
import pytest
import scipy.sparse

from fraccable.exceptions import BudgetExceededError, NotPositiveDefiniteError
from fraccable.fem import FemSpace, Mesh
from fraccable.linalg import BandedSymMatrix, cholesky_banded, sym_eigen_dense


def _random_spd_banded(rng, n, bw):
    a = np.zeros((n, n))
    for d in range(1, bw + 1):
        v = rng.uniform(-1, 1, n - d)
        a += np.diag(v, -d) + np.diag(v, d)
    a += np.diag(np.abs(a).sum(axis=1) + rng.uniform(0.1, 1.0, n))
    return a


def test_identity_factor():
    f = cholesky_banded(BandedSymMatrix.from_dense(np.eye(5)))
    assert np.allclose(f.factor, np.vstack([np.ones(5)]))
    b = np.arange(5.0)
    assert np.array_equal(f.solve(b), b)


def test_stiffness_solve_against_dense():
    space = FemSpace(Mesh(1, 5))
    a = space.stiffness
    b = np.array([1.0, -2.0, 0.5, 3.0])
    x = cholesky_banded(BandedSymMatrix.from_sparse(a)).solve(b)
    ref = np.linalg.solve(a.toarray(), b)
    assert np.max(np.abs(x - ref)) / np.max(np.abs(ref)) <= 1e-12


def test_2d_mass_solve_against_dense():
    space = FemSpace(Mesh(2, 4))  # 3x3 interior nodes, nine-band mass
    m = space.mass
    assert m.shape == (9, 9)
    b = np.linspace(-1, 1, 9)
    x = cholesky_banded(BandedSymMatrix.from_sparse(m)).solve(b)
    assert np.allclose(x, np.linalg.solve(m.toarray(), b), rtol=1e-12, atol=1e-12)


def test_factor_round_trip_random():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(2, 60))
        bw = int(rng.integers(0, min(n - 1, 6) + 1))
        a = _random_spd_banded(rng, n, bw)
        b = rng.normal(size=n)
        x = cholesky_banded(BandedSymMatrix.from_dense(a, bw)).solve(b)
        assert np.linalg.norm(a @ x - b) / np.linalg.norm(b) <= 1e-11


def test_storage_round_trip_and_matvec():
    rng = np.random.default_rng(1)
    a = _random_spd_banded(rng, 12, 3)
    band = BandedSymMatrix.from_dense(a)
    assert band.bandwidth == 3 and band.order == 12
    assert np.array_equal(band.to_dense(), a)
    x = rng.normal(size=12)
    assert np.allclose(band.matvec(x), a @ x, rtol=1e-14)
    assert np.array_equal(BandedSymMatrix.from_sparse(scipy.sparse.csr_matrix(a)).to_dense(), a)


def test_not_positive_definite():
    with pytest.raises(NotPositiveDefiniteError):
        cholesky_banded(BandedSymMatrix.from_dense(np.array([[1.0, 2.0], [2.0, 1.0]])))


def test_eigen_trivial():
    assert np.allclose(sym_eigen_dense(np.diag([3.0, 1.0, 2.0])), (1, 2, 3))
    assert np.allclose(sym_eigen_dense([[1.5, -1.0], [-1.0, 1.5]]), (0.5, 2.5), atol=1e-15)


def test_eigen_trace_and_residual():
    rng = np.random.default_rng(11)
    b = rng.normal(size=(50, 50))
    a = (b + b.T) / 2
    ev = sym_eigen_dense(a)
    assert np.all(np.diff(ev) >= 0)
    assert abs(ev.sum() - np.trace(a)) <= 1e-9
    w, v = np.linalg.eigh(a)
    assert np.max(np.abs(ev - w)) <= 1e-12
    res = np.linalg.norm(a @ v - v * w, axis=0)
    assert np.max(res) <= 1e-10 * np.linalg.norm(a, 2)


@pytest.mark.parametrize("n", [4, 16, 64])
def test_eigen_product_matches_factor_logdet(n):
    rng = np.random.default_rng(n)
    a = _random_spd_banded(rng, n, 2)
    ev = sym_eigen_dense(a)
    logdet = cholesky_banded(BandedSymMatrix.from_dense(a)).logdet()
    assert abs(np.sum(np.log(ev)) - logdet) <= 1e-8 * abs(logdet) + 1e-12
    assert abs(ev.sum() - np.trace(a)) <= 1e-8 * abs(np.trace(a))


def test_eigen_budget():
    with pytest.raises(BudgetExceededError):
        sym_eigen_dense(np.eye(513))
