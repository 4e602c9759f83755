"""Uniform-mesh finite elements: P1 in 1D, bilinear Q1 on squares in 2D.

Only interior nodes carry unknowns (homogeneous Dirichlet data is
eliminated), so assembled matrices are symmetric positive definite.
Interior nodes are numbered with ``x`` running fastest.

Spatial functions are vectorized callables taking one coordinate array
per axis: ``g(x)`` in 1D and ``g(x, y)`` in 2D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse

from .exceptions import ParameterError
from .linalg import BandedSymMatrix, cholesky_banded

__all__ = [
    "Mesh",
    "FemSpace",
    "QuadratureMap",
    "assemble",
    "element_matrices",
    "load_vector",
    "ritz_project",
    "l2_norm_error",
    "l2_norm",
    "interpolate",
]

DEFAULT_QUAD_ORDER = {1: 5, 2: 4}


@dataclass(frozen=True)
class Mesh:
    """Uniform partition of ``(0, L)`` or ``(0, L) x (0, L)``."""

    dim: int
    n_cells: int
    length: float = 1.0

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ParameterError(f"dim must be 1 or 2, got {self.dim}")
        if self.n_cells < 1:
            raise ParameterError(f"n_cells must be positive, got {self.n_cells}")
        if not self.length > 0:
            raise ParameterError(f"length must be positive, got {self.length}")

    @property
    def h(self) -> float:
        """Cell edge length."""
        return self.length / self.n_cells

    @property
    def h_diag(self) -> float:
        """Cell diameter (the diagonal in 2D)."""
        return math.sqrt(self.dim) * self.h

    @property
    def axis_nodes(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.h

    @property
    def n_interior(self) -> int:
        return (self.n_cells - 1) ** self.dim

    def interior_points(self):
        """Coordinates of the interior nodes, one array per axis, in dof order."""
        x = self.axis_nodes[1:-1]
        if self.dim == 1:
            return (x,)
        xx, yy = np.meshgrid(x, x, indexing="xy")
        return (xx.ravel(), yy.ravel())


def element_matrices(mesh: Mesh):
    """Element mass and stiffness matrices on one cell.

    2D matrices use local node order (0,0), (1,0), (1,1), (0,1) and are
    integrated with a 2x2 Gauss rule, which is exact for bilinear products.
    """
    h = mesh.h
    if mesh.dim == 1:
        me = h / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
        ke = np.array([[1.0, -1.0], [-1.0, 1.0]]) / h
        return me, ke

    g = 0.5 / math.sqrt(3.0)
    pts = np.array([0.5 - g, 0.5 + g])
    corners = np.array([[0, 0], [1, 0], [1, 1], [0, 1]])
    me = np.zeros((4, 4))
    ke = np.zeros((4, 4))
    for s in pts:
        for r in pts:
            vals = np.array([(s if cx else 1 - s) * (r if cy else 1 - r) for cx, cy in corners])
            ds = np.array([(1 if cx else -1) * (r if cy else 1 - r) for cx, cy in corners])
            dr = np.array([(s if cx else 1 - s) * (1 if cy else -1) for cx, cy in corners])
            w = 0.25 * h * h
            me += w * np.outer(vals, vals)
            # d/dx = (1/h) d/ds
            ke += w * (np.outer(ds, ds) + np.outer(dr, dr)) / (h * h)
    return me, ke


def _cell_dofs(mesh: Mesh) -> np.ndarray:
    """Interior dof index of each local node of each cell, -1 on the boundary."""
    n = mesh.n_cells
    if mesh.dim == 1:
        nodes = np.stack([np.arange(n), np.arange(1, n + 1)], axis=1)
        dofs = nodes - 1
        dofs[(nodes == 0) | (nodes == n)] = -1
        return dofs

    a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    a, b = a.ravel(), b.ravel()
    ix = np.stack([a, a + 1, a + 1, a], axis=1)
    iy = np.stack([b, b, b + 1, b + 1], axis=1)
    dofs = (iy - 1) * (n - 1) + (ix - 1)
    boundary = (ix == 0) | (ix == n) | (iy == 0) | (iy == n)
    dofs[boundary] = -1
    return dofs


def _scatter(mesh: Mesh, local: np.ndarray) -> scipy.sparse.csr_matrix:
    dofs = _cell_dofs(mesh)
    nloc = dofs.shape[1]
    rows = np.repeat(dofs, nloc, axis=1).ravel()
    cols = np.tile(dofs, (1, nloc)).ravel()
    data = np.tile(local.ravel(), dofs.shape[0])
    keep = (rows >= 0) & (cols >= 0)
    ndof = mesh.n_interior
    return scipy.sparse.coo_matrix(
        (data[keep], (rows[keep], cols[keep])), shape=(ndof, ndof)
    ).tocsr()


@dataclass(frozen=True)
class QuadratureMap:
    """Gauss points of the whole mesh and the basis evaluated there.

    ``values @ c`` gives a discrete function at the points, and
    ``grads[d] @ c`` its derivative along axis ``d``.
    """

    points: tuple
    weights: np.ndarray
    values: scipy.sparse.csr_matrix
    grads: tuple

    def integrate(self, samples) -> float:
        return float(np.dot(self.weights, samples))

    def project(self, samples) -> np.ndarray:
        """``b_i = integral(g * phi_i)`` from samples of ``g`` at the points."""
        return self.values.T @ (self.weights * samples)


def _quadrature_map(mesh: Mesh, order: int) -> QuadratureMap:
    xi, wi = np.polynomial.legendre.leggauss(order)
    s = 0.5 * (1.0 + xi)
    h = mesh.h
    n = mesh.n_cells
    dofs = _cell_dofs(mesh)
    ncell = dofs.shape[0]
    ndof = mesh.n_interior

    if mesh.dim == 1:
        x0 = np.arange(n) * h
        px = (x0[:, None] + h * s[None, :]).ravel()
        w = np.tile(0.5 * h * wi, n)
        loc_val = np.stack([1.0 - s, s], axis=1)  # (q, 2)
        loc_grad = [np.tile(np.array([-1.0, 1.0]) / h, (order, 1))]
        points = (px,)
    else:
        x0 = (np.arange(ncell) % n) * h
        y0 = (np.arange(ncell) // n) * h
        ss, rr = np.meshgrid(s, s, indexing="xy")
        ss, rr = ss.ravel(), rr.ravel()
        px = (x0[:, None] + h * ss[None, :]).ravel()
        py = (y0[:, None] + h * rr[None, :]).ravel()
        ww = np.outer(wi, wi).ravel()
        w = np.tile(0.25 * h * h * ww, ncell)
        loc_val = np.stack([(1 - ss) * (1 - rr), ss * (1 - rr), ss * rr, (1 - ss) * rr], axis=1)
        gx = np.stack([-(1 - rr), (1 - rr), rr, -rr], axis=1) / h
        gy = np.stack([-(1 - ss), -ss, ss, (1 - ss)], axis=1) / h
        loc_grad = [gx, gy]
        points = (px, py)

    nq = loc_val.shape[0]
    nloc = dofs.shape[1]
    rows = np.repeat(np.arange(ncell * nq), nloc)
    cols = np.repeat(dofs, nq, axis=0).ravel()
    keep = cols >= 0

    def build(local):
        data = np.tile(local, (ncell, 1)).ravel()
        return scipy.sparse.csr_matrix(
            (data[keep], (rows[keep], cols[keep])), shape=(ncell * nq, ndof)
        )

    return QuadratureMap(points, w, build(loc_val), tuple(build(g) for g in loc_grad))


class FemSpace:
    """Continuous piecewise (bi)linear functions vanishing on the boundary."""

    degree = 1

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self._quad = {}

    def __repr__(self):
        return f"FemSpace(dim={self.mesh.dim}, n_cells={self.mesh.n_cells}, ndof={self.ndof})"

    @property
    def ndof(self) -> int:
        return self.mesh.n_interior

    @property
    def default_quad_order(self) -> int:
        return DEFAULT_QUAD_ORDER[self.mesh.dim]

    @cached_property
    def _matrices(self):
        me, ke = element_matrices(self.mesh)
        return _scatter(self.mesh, me), _scatter(self.mesh, ke)

    @property
    def mass(self) -> scipy.sparse.csr_matrix:
        return self._matrices[0]

    @property
    def stiffness(self) -> scipy.sparse.csr_matrix:
        return self._matrices[1]

    @cached_property
    def stiffness_factor(self):
        return cholesky_banded(BandedSymMatrix.from_sparse(self.stiffness))

    def quadrature(self, order=None) -> QuadratureMap:
        order = self.default_quad_order if order is None else int(order)
        if order not in self._quad:
            self._quad[order] = _quadrature_map(self.mesh, order)
        return self._quad[order]

    def full_nodal_values(self, coeffs):
        """All mesh nodes (boundary included) with their values, as flat arrays."""
        n = self.mesh.n_cells
        nodes = self.mesh.axis_nodes
        if self.mesh.dim == 1:
            vals = np.zeros(n + 1)
            vals[1:-1] = coeffs
            return (nodes,), vals
        vals = np.zeros((n + 1, n + 1))
        vals[1:-1, 1:-1] = np.reshape(coeffs, (n - 1, n - 1))
        xx, yy = np.meshgrid(nodes, nodes, indexing="xy")
        return (xx.ravel(), yy.ravel()), vals.ravel()


def assemble(space: FemSpace):
    """Mass and stiffness matrices ``(M, A)`` over the interior basis (CSR)."""
    return space.mass, space.stiffness


def load_vector(space: FemSpace, g, quad_order=None) -> np.ndarray:
    """``b_i = integral(g * phi_i)`` by per-cell Gauss quadrature."""
    q = space.quadrature(quad_order)
    return q.project(np.broadcast_to(g(*q.points), q.weights.shape))


def ritz_project(space: FemSpace, grad=None, laplacian=None, quad_order=None) -> np.ndarray:
    """Coefficients of the elliptic projection ``R_h u``.

    Solves ``A c = g`` with ``g_i = (grad u, grad phi_i)``.  Pass either
    ``grad`` (a callable returning one derivative array per axis) or
    ``laplacian``, in which case ``g_i = -(lap u, phi_i)``, equal to the
    gradient form because the basis vanishes on the boundary.
    """
    q = space.quadrature(quad_order)
    if grad is not None:
        parts = grad(*q.points)
        if space.mesh.dim == 1 and not isinstance(parts, (tuple, list)):
            parts = (parts,)
        rhs = sum(b.T @ (q.weights * np.broadcast_to(p, q.weights.shape)) for b, p in zip(q.grads, parts))
    elif laplacian is not None:
        rhs = -q.project(np.broadcast_to(laplacian(*q.points), q.weights.shape))
    else:
        raise ParameterError("ritz_project needs grad or laplacian")
    return space.stiffness_factor.solve(rhs)


def l2_norm_error(space: FemSpace, coeffs, u_exact, quad_order=None) -> float:
    """``|| u_h - u_exact ||_{L2}`` by per-cell Gauss quadrature."""
    q = space.quadrature(quad_order)
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (space.ndof,):
        raise ParameterError(f"expected {space.ndof} coefficients, got shape {coeffs.shape}")
    diff = q.values @ coeffs - u_exact(*q.points)
    return math.sqrt(q.integrate(diff * diff))


def l2_norm(space: FemSpace, coeffs, quad_order=None) -> float:
    q = space.quadrature(quad_order)
    vals = q.values @ np.asarray(coeffs, dtype=float)
    return math.sqrt(q.integrate(vals * vals))


def interpolate(space: FemSpace, u) -> np.ndarray:
    """Nodal interpolant coefficients of ``u`` at the interior nodes."""
    return np.asarray(u(*space.mesh.interior_points()), dtype=float)
