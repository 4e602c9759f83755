import math

import numpy as np
import pytest
import scipy.integrate

from fraccable.exceptions import ParameterError
from fraccable.fem import (
    FemSpace,
    Mesh,
    assemble,
    element_matrices,
    interpolate,
    l2_norm,
    l2_norm_error,
    load_vector,
    ritz_project,
)

TWO_PI = 2 * math.pi
# mpmath quad of sin(2 pi x) against the hat at x=0.3, h=1/10
LOAD_SIN_AT_03 = 0.092017686129999386248
# mpmath quad of the interpolation error of sin(2 pi x), h=1/10
INTERP_ERR_H10 = 0.025264397626150819237


def test_mesh_geometry():
    m = Mesh(2, 100)
    assert m.h == pytest.approx(0.01)
    assert m.h_diag == pytest.approx(math.sqrt(2) / 100)
    assert m.n_interior == 99 * 99
    assert np.allclose(Mesh(1, 4, 2.0).axis_nodes, [0, 0.5, 1, 1.5, 2])


@pytest.mark.parametrize("kwargs", [dict(dim=3, n_cells=4), dict(dim=1, n_cells=0), dict(dim=1, n_cells=4, length=-1)])
def test_mesh_validation(kwargs):
    with pytest.raises(ParameterError):
        Mesh(**kwargs)


def test_1d_element_matrices():
    me, ke = element_matrices(Mesh(1, 8))
    h = 1 / 8
    assert np.allclose(ke, np.array([[1, -1], [-1, 1]]) / h)
    assert np.allclose(me, h / 6 * np.array([[2, 1], [1, 2]]))


def test_1d_assembled_entries():
    n = 10
    h = 1 / n
    m, a = assemble(FemSpace(Mesh(1, n)))
    m, a = m.toarray(), a.toarray()
    assert np.allclose(np.diag(a), 2 / h) and np.allclose(np.diag(a, 1), -1 / h)
    assert np.allclose(np.diag(m), 2 * h / 3) and np.allclose(np.diag(m, 1), h / 6)
    assert np.count_nonzero(np.triu(a, 2)) == 0


def test_2d_element_mass_pattern():
    h = 0.25
    me, _ = element_matrices(Mesh(2, 4))
    ref = h * h / 36 * np.array([[4, 2, 1, 2], [2, 4, 2, 1], [1, 2, 4, 2], [2, 1, 2, 4]])
    assert np.allclose(me, ref, atol=1e-15)


def test_2d_element_matrices_by_quadrature_oracle():
    h = 0.5
    _, ke = element_matrices(Mesh(2, 2))
    corners = [(0, 0), (1, 0), (1, 1), (0, 1)]

    def grad(i, x, y):
        cx, cy = corners[i]
        sx = 1 if cx else -1
        sy = 1 if cy else -1
        fx = x / h if cx else 1 - x / h
        fy = y / h if cy else 1 - y / h
        return sx / h * fy, sy / h * fx

    for i in range(4):
        for j in range(4):
            val, _ = scipy.integrate.dblquad(
                lambda y, x: np.dot(grad(i, x, y), grad(j, x, y)), 0, h, 0, h, epsabs=1e-13
            )
            assert ke[i, j] == pytest.approx(val, abs=1e-12)


@pytest.mark.parametrize("n", [4, 9, 16])
def test_2d_matrices_are_kron_products(n):
    m1, a1 = assemble(FemSpace(Mesh(1, n)))
    m2, a2 = assemble(FemSpace(Mesh(2, n)))
    m1, a1 = m1.toarray(), a1.toarray()
    assert np.max(np.abs(m2.toarray() - np.kron(m1, m1))) <= 1e-12
    assert np.max(np.abs(a2.toarray() - (np.kron(a1, m1) + np.kron(m1, a1)))) <= 1e-12


def test_2d_nine_band():
    n = 6
    a = FemSpace(Mesh(2, n)).stiffness.toarray()
    rows, cols = np.nonzero(a)
    assert np.max(np.abs(rows - cols)) == n  # (n-1) + 1


@pytest.mark.parametrize("dim, n", [(1, 512), (2, 32)])
def test_matrices_spd(dim, n):
    space = FemSpace(Mesh(dim, n))
    for mat in (space.mass, space.stiffness):
        d = mat.toarray()
        assert np.max(np.abs(d - d.T)) == 0.0
        assert np.linalg.eigvalsh(d)[0] > 0


def test_mass_row_sums_are_hat_integrals():
    n = 20
    space = FemSpace(Mesh(1, n))
    ones = space.mass @ np.ones(space.ndof)
    # interior rows see both neighbours; the two rows next to the boundary miss h/6
    expected = np.full(space.ndof, 1 / n)
    expected[[0, -1]] -= 1 / (6 * n)
    assert np.max(np.abs(ones - expected)) <= 1e-12
    assert abs(load_vector(space, lambda x: np.ones_like(x)).sum() - (n - 1) / n) <= 1e-12


def test_load_vector_trivial():
    space = FemSpace(Mesh(1, 10))
    assert np.all(load_vector(space, lambda x: np.zeros_like(x)) == 0)
    assert np.allclose(load_vector(space, lambda x: np.ones_like(x)), 0.1, atol=1e-15)


def test_load_vector_against_mpmath():
    space = FemSpace(Mesh(1, 10))
    b = load_vector(space, lambda x: np.sin(TWO_PI * x))
    assert abs(b[2] - LOAD_SIN_AT_03) <= 1e-10
    assert abs(b[4]) <= 1e-14  # node 0.5, odd symmetry


def test_ritz_identity_on_discrete_functions():
    n = 16
    space = FemSpace(Mesh(1, n))
    rng = np.random.default_rng(0)
    c = rng.normal(size=space.ndof)
    full = np.concatenate([[0], c, [0]])

    def grad(x):
        cell = np.minimum((x * n).astype(int), n - 1)
        return (full[cell + 1] - full[cell]) * n

    assert np.max(np.abs(ritz_project(space, grad=grad) - c)) <= 1e-10


def test_ritz_is_nodal_interpolant_in_1d():
    space = FemSpace(Mesh(1, 64))
    c = ritz_project(space, grad=lambda x: TWO_PI * np.cos(TWO_PI * x))
    assert np.max(np.abs(c - interpolate(space, lambda x: np.sin(TWO_PI * x)))) <= 1e-10
    c2 = ritz_project(space, laplacian=lambda x: -(TWO_PI**2) * np.sin(TWO_PI * x))
    assert np.max(np.abs(c2 - c)) <= 1e-10


def test_ritz_second_order():
    errs = []
    for n in (16, 32, 64, 128):
        space = FemSpace(Mesh(1, n))
        c = ritz_project(space, laplacian=lambda x: -(TWO_PI**2) * np.sin(TWO_PI * x))
        errs.append(l2_norm_error(space, c, lambda x: np.sin(TWO_PI * x)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all((orders >= 1.9) & (orders <= 2.1)), orders


def test_ritz_needs_data():
    with pytest.raises(ParameterError):
        ritz_project(FemSpace(Mesh(1, 4)))


def test_l2_error_trivial():
    space = FemSpace(Mesh(1, 10))
    c = interpolate(space, lambda x: x * (1 - x))
    nodes, vals = space.full_nodal_values(c)
    u = lambda x: np.interp(x, nodes[0], vals)  # noqa: E731
    assert l2_norm_error(space, c, u) <= 1e-14
    assert l2_norm_error(space, np.zeros(9), lambda x: np.sin(TWO_PI * x)) == pytest.approx(math.sqrt(0.5), abs=1e-12)


def test_l2_error_of_interpolant_against_mpmath():
    space = FemSpace(Mesh(1, 10))
    c = interpolate(space, lambda x: np.sin(TWO_PI * x))
    assert abs(l2_norm_error(space, c, lambda x: np.sin(TWO_PI * x)) - INTERP_ERR_H10) <= 1e-10


def test_l2_norm_2d():
    space = FemSpace(Mesh(2, 8))
    assert l2_norm_error(space, np.zeros(space.ndof), lambda x, y: np.sin(TWO_PI * x) * np.sin(TWO_PI * y)) == pytest.approx(0.5, abs=1e-12)
    assert l2_norm(space, np.zeros(space.ndof)) == 0.0


def test_l2_error_checks_shape():
    with pytest.raises(ParameterError):
        l2_norm_error(FemSpace(Mesh(1, 10)), np.zeros(3), lambda x: x)


def test_snapshot_nodes_include_boundary():
    space = FemSpace(Mesh(2, 3))
    (x, y), v = space.full_nodal_values(np.arange(4.0) + 1)
    assert x.size == y.size == v.size == 16
    assert v[(x == 0) | (y == 0) | (x == 1) | (y == 1)].sum() == 0
    assert sorted(v[v > 0]) == [1, 2, 3, 4]
