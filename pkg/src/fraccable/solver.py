"""Fully discrete theta-method / finite element scheme for the fractional Cable equation.

The unknown is shifted to ``v = u - u0`` so that ``v(0) = 0``; each level
then solves

    D^1 (V^n, chi) + D^{1-gamma} (grad V^n, grad chi) + mu^2 D^{1-kappa} (V^n, chi) = (F^n, chi)

where every ``D`` is a convolution quadrature with optional starting
weights, ``D^1`` is always BDF2, and ``U^n = V^n + R_h u0``.

When starting weights are used, the level-``n`` equation involves
``V^1 .. V^s`` for every ``n``.  Levels ``1..s`` are therefore solved
together as one coupled system; later levels move the starting part to
the right-hand side and reuse a single Cholesky factor.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence, Union

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .exceptions import DomainError, NotPositiveDefiniteError, ParameterError, SolverError
from .fem import FemSpace, Mesh, interpolate, l2_norm, l2_norm_error, ritz_project
from .linalg import BandedSymMatrix, cholesky_banded
from .specfun import gamma_fn
from .weights import (
    Family,
    ThetaScheme,
    fbt_weights,
    scheme_weights,
    starting_weight_table,
)

__all__ = [
    "CableProblem",
    "CorrectionSets",
    "BASELINE_CORRECTION",
    "regularity_correction",
    "SchemeConfig",
    "StepCoefficients",
    "SolveResult",
    "transform_rhs",
    "step_matrix",
    "block_matrix",
    "history_rhs",
    "run",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CableProblem:
    """``u_t = D^{1-gamma} lap u - mu^2 D^{1-kappa} u + f`` with zero Dirichlet data.

    ``f`` and ``exact`` take the spatial coordinates followed by ``t``;
    ``u0`` and ``laplacian_u0`` take the spatial coordinates only.
    ``laplacian_u0`` may be ``None``, in which case a discrete Laplacian
    of the interpolant is used and results are flagged as approximate.
    ``regularity`` lists the exponents ``sigma`` of the expansion
    ``u - u0 ~ sum c_i t^sigma_i`` near ``t = 0``; it defaults to
    ``(gamma, kappa)``.
    """

    gamma: float
    kappa: float
    mu: float
    f: Callable
    u0: Callable
    laplacian_u0: Optional[Callable] = None
    exact: Optional[Callable] = None
    T: float = 1.0
    dim: int = 1
    length: float = 1.0
    name: str = ""
    regularity: tuple = ()

    def __post_init__(self):
        for label, val in (("gamma", self.gamma), ("kappa", self.kappa)):
            if not 0.0 < val < 1.0:
                raise ParameterError(f"{label} must lie strictly inside (0, 1), got {val}")
        if self.mu < 0:
            raise ParameterError(f"mu must be nonnegative, got {self.mu}")
        if not self.T > 0:
            raise ParameterError(f"T must be positive, got {self.T}")
        reg = tuple(sorted({float(r) for r in self.regularity})) or self.default_sigma
        if reg[0] <= 0:
            raise ParameterError(f"regularity exponents must be positive, got {reg}")
        object.__setattr__(self, "regularity", reg)
        self._check_boundary()

    def _check_boundary(self):
        edge = np.linspace(0.0, self.length, 7)
        if self.dim == 1:
            vals = self.u0(np.array([0.0, self.length]))
        else:
            zeros = np.zeros_like(edge)
            ends = np.full_like(edge, self.length)
            vals = np.concatenate(
                [self.u0(edge, zeros), self.u0(edge, ends), self.u0(zeros, edge), self.u0(ends, edge)]
            )
        if np.max(np.abs(vals)) > 1e-10:
            raise ParameterError("u0 must vanish on the boundary")

    def mesh(self, n_cells: int) -> Mesh:
        return Mesh(self.dim, n_cells, self.length)

    @property
    def default_sigma(self) -> tuple:
        """``{gamma, kappa}`` in increasing order, the fallback regularity."""
        return tuple(sorted({self.gamma, self.kappa}))


def transform_rhs(problem: CableProblem, t: float, *coords):
    """Source of the shifted problem for ``v = u - u0``.

    ``F = f + lap(u0) t^(gamma-1)/Gamma(gamma) - mu^2 u0 t^(kappa-1)/Gamma(kappa)``
    """
    if not t > 0:
        raise DomainError(f"the shifted source is singular at t = 0; got t = {t}")
    if problem.laplacian_u0 is None:
        raise ParameterError("transform_rhs needs an analytic laplacian_u0")
    g, k, mu = problem.gamma, problem.kappa, problem.mu
    out = problem.f(*coords, t) + problem.laplacian_u0(*coords) * t ** (g - 1.0) / gamma_fn(g)
    if mu != 0.0:
        out = out - mu * mu * problem.u0(*coords) * t ** (k - 1.0) / gamma_fn(k)
    return out


@dataclass(frozen=True)
class StepCoefficients:
    """Scalar multipliers of ``M`` and ``A`` in the level equations.

    The level-``n`` equation reads
    ``sum_{k=1..n} (conv_mass[n-k] M + conv_stiff[n-k] A) V^k
    + sum_{j=1..s} (start_mass[n, j-1] M + start_stiff[n, j-1] A) V^j = b^n``.
    """

    conv_mass: np.ndarray
    conv_stiff: np.ndarray
    start_mass: np.ndarray
    start_stiff: np.ndarray

    @property
    def s(self) -> int:
        return self.start_mass.shape[1]


MAX_CORRECTION_TERMS = 4


def _sigma_tuple(values) -> tuple:
    sigma = tuple(float(v) for v in values)
    if len(sigma) > MAX_CORRECTION_TERMS:
        raise ParameterError(f"at most {MAX_CORRECTION_TERMS} correction exponents, got {len(sigma)}")
    if any(v <= 0 for v in sigma) or any(b <= a for a, b in zip(sigma, sigma[1:])):
        raise ParameterError(f"correction exponents must be positive and strictly increasing, got {sigma}")
    return sigma


@dataclass(frozen=True)
class CorrectionSets:
    """Starting-weight exponents for each of the three discrete operators.

    ``time`` applies to the BDF2 first derivative, ``gamma`` and ``kappa``
    to the fractional operators of order ``1-gamma`` and ``1-kappa``.
    An empty tuple means that operator is used without starting weights.
    """

    time: tuple = ()
    gamma: tuple = ()
    kappa: tuple = ()

    def __post_init__(self):
        for name in ("time", "gamma", "kappa"):
            object.__setattr__(self, name, _sigma_tuple(getattr(self, name)))

    @classmethod
    def uniform(cls, sigma) -> "CorrectionSets":
        sigma = tuple(sigma)
        return cls(sigma, sigma, sigma)

    @property
    def s(self) -> int:
        """Number of coupled start-up levels."""
        return max(len(self.time), len(self.gamma), len(self.kappa))

    def as_dict(self) -> dict:
        return {"time": list(self.time), "gamma": list(self.gamma), "kappa": list(self.kappa)}


# BDF2 made exact on linear functions at the first level (a backward Euler
# first step); fractional operators plain.  This is the reference
# "uncorrected" scheme.
BASELINE_CORRECTION = CorrectionSets(time=(1.0,))


def _exponents_for_order(regularity, order) -> tuple:
    # t^sigma with sigma - order >= 2 is already handled to O(tau^2)
    keep = [s for s in regularity if s - order < 2.0 - 1e-12]
    return tuple(keep[:MAX_CORRECTION_TERMS])


def regularity_correction(problem: CableProblem) -> CorrectionSets:
    """Correct each operator for the solution exponents it would otherwise under-resolve."""
    reg = problem.regularity
    return CorrectionSets(
        _exponents_for_order(reg, 1.0),
        _exponents_for_order(reg, 1.0 - problem.gamma),
        _exponents_for_order(reg, 1.0 - problem.kappa),
    )


def _resolve_correction(problem, correction) -> CorrectionSets:
    if correction is True or correction == "regularity":
        return regularity_correction(problem)
    if correction is False or correction is None or correction == "baseline":
        return BASELINE_CORRECTION
    if correction == "off":
        return CorrectionSets()
    if isinstance(correction, CorrectionSets):
        return correction
    if isinstance(correction, dict):
        return CorrectionSets(**{k: tuple(v) for k, v in correction.items()})
    return CorrectionSets.uniform(correction)


@dataclass(frozen=True)
class SchemeConfig:
    """Time discretization: theta-schemes for both fractional terms, step count, correction."""

    scheme_gamma: ThetaScheme
    scheme_kappa: ThetaScheme
    n_steps: int
    T: float = 1.0
    mu: float = 1.0
    correction: CorrectionSets = field(default_factory=CorrectionSets)

    def __post_init__(self):
        if self.n_steps < 1:
            raise ParameterError(f"n_steps must be positive, got {self.n_steps}")
        corr = self.correction
        if corr is None:
            corr = CorrectionSets()
        elif not isinstance(corr, CorrectionSets):
            corr = CorrectionSets.uniform(corr)
        object.__setattr__(self, "correction", corr)
        if corr.s > self.n_steps:
            raise ParameterError(
                f"{corr.s} correction terms need at least as many time steps, got {self.n_steps}"
            )

    @classmethod
    def build(
        cls,
        problem: CableProblem,
        family: Union[Family, str],
        theta_gamma: float,
        theta_kappa: float,
        n_steps: int,
        correction: Union[bool, str, Sequence[float], CorrectionSets, None] = True,
        family_kappa: Union[Family, str, None] = None,
    ) -> "SchemeConfig":
        """Config for ``problem``.

        ``correction`` may be ``True`` (exponents from ``problem.regularity``),
        ``False`` (the baseline: BDF2 exact on linears, fractional terms plain),
        ``"off"`` (no starting weights at all), one exponent list shared by
        all operators, or a :class:`CorrectionSets`.
        """
        return cls(
            ThetaScheme(family, 1.0 - problem.gamma, theta_gamma),
            ThetaScheme(family_kappa or family, 1.0 - problem.kappa, theta_kappa),
            n_steps,
            problem.T,
            problem.mu,
            _resolve_correction(problem, correction),
        )

    @property
    def tau(self) -> float:
        return self.T / self.n_steps

    @property
    def gamma(self) -> float:
        return 1.0 - self.scheme_gamma.alpha

    @property
    def kappa(self) -> float:
        return 1.0 - self.scheme_kappa.alpha

    @property
    def s(self) -> int:
        return self.correction.s

    def _operator_weights(self):
        n = self.n_steps
        return {
            "time": fbt_weights(1.0, 0.0, n),
            "gamma": scheme_weights(self.scheme_gamma, n),
            "kappa": scheme_weights(self.scheme_kappa, n),
        }

    @cached_property
    def coefficients(self) -> StepCoefficients:
        n, tau, mu = self.n_steps, self.tau, self.mu
        w = self._operator_weights()
        scale = {
            "time": 1.0 / tau,
            "gamma": tau ** (self.gamma - 1.0),
            "kappa": mu * mu * tau ** (self.kappa - 1.0),
        }
        conv_mass = scale["time"] * w["time"].omega + scale["kappa"] * w["kappa"].omega
        conv_stiff = scale["gamma"] * w["gamma"].omega
        s = self.s
        start = {name: np.zeros((n + 1, s)) for name in w}
        for name, table in self.starting_tables().items():
            start[name][:, : table.s] = table.per_level
        start_mass = scale["time"] * start["time"] + scale["kappa"] * start["kappa"]
        start_stiff = scale["gamma"] * start["gamma"]
        return StepCoefficients(conv_mass, conv_stiff, start_mass, start_stiff)

    def starting_tables(self) -> dict:
        """Raw starting weights of each corrected operator."""
        n = self.n_steps
        out = {}
        for name, weights in self._operator_weights().items():
            sigma = getattr(self.correction, name)
            if sigma:
                out[name] = starting_weight_table(weights, sigma, n)
        return out


def step_matrix(space: FemSpace, config: SchemeConfig, level: int) -> scipy.sparse.csr_matrix:
    """Matrix multiplying ``V^level`` in the level equation.

    Constant for ``level > s``.  For ``level <= s`` it is the diagonal
    block of the coupled start-up system (see :func:`block_matrix`).
    """
    c = config.coefficients
    cm, ca = c.conv_mass[0], c.conv_stiff[0]
    if 1 <= level <= c.s:
        cm += c.start_mass[level, level - 1]
        ca += c.start_stiff[level, level - 1]
    return (cm * space.mass + ca * space.stiffness).tocsr()


def _block_coefficients(config: SchemeConfig):
    c = config.coefficients
    s = c.s
    bm = np.zeros((s, s))
    ba = np.zeros((s, s))
    for n in range(1, s + 1):
        for k in range(1, s + 1):
            if k <= n:
                bm[n - 1, k - 1] += c.conv_mass[n - k]
                ba[n - 1, k - 1] += c.conv_stiff[n - k]
            bm[n - 1, k - 1] += c.start_mass[n, k - 1]
            ba[n - 1, k - 1] += c.start_stiff[n, k - 1]
    return bm, ba


def block_matrix(space: FemSpace, config: SchemeConfig) -> scipy.sparse.csc_matrix:
    """Coupled system for levels ``1..s``, unknowns ordered level by level.

    Not symmetric in general (the starting weights couple later levels
    into earlier equations), so it is solved by sparse LU.
    """
    bm, ba = _block_coefficients(config)
    return (scipy.sparse.kron(bm, space.mass) + scipy.sparse.kron(ba, space.stiffness)).tocsc()


def _history_sum(c: StepCoefficients, n: int, mv: np.ndarray, av: np.ndarray) -> np.ndarray:
    """Known part of the level-``n`` left-hand side; ``mv[k] = M V^k``, ``av[k] = A V^k``."""
    out = c.conv_mass[n - 1 : 0 : -1] @ mv[1:n] + c.conv_stiff[n - 1 : 0 : -1] @ av[1:n]
    s = c.s
    if s and n > s:
        out = out + c.start_mass[n] @ mv[1 : s + 1] + c.start_stiff[n] @ av[1 : s + 1]
    return out


def history_rhs(space: FemSpace, config: SchemeConfig, history, load) -> np.ndarray:
    """Right-hand side of the level-``n`` equation, ``n = len(history) + 1``.

    ``history`` holds ``V^1 .. V^{n-1}`` (one row each) and ``load`` is the
    vector ``(F^n, phi_i)``.  For ``n > s`` the starting part built from
    ``V^1 .. V^s`` is subtracted as well.  For ``n <= s`` only the
    convolution over the given rows is subtracted, the remaining
    couplings belong to :func:`block_matrix`.
    """
    load = np.asarray(load, dtype=float)
    history = np.asarray(history, dtype=float).reshape(-1, space.ndof)
    n = history.shape[0] + 1
    if n > config.n_steps:
        raise SolverError(f"level {n} beyond the {config.n_steps} configured steps", level=n)
    c = config.coefficients
    if c.s and n > c.s and history.shape[0] < c.s:
        raise SolverError(f"starting part needs levels 1..{c.s}", level=n)
    zero = np.zeros((1, space.ndof))
    mv = np.vstack([zero, (space.mass @ history.T).T])
    av = np.vstack([zero, (space.stiffness @ history.T).T])
    if n == 1:
        return load.copy()
    return load - _history_sum(c, n, mv, av)


@dataclass
class SolveResult:
    """Time levels, solution coefficients and errors of one run."""

    times: np.ndarray
    V: np.ndarray
    U: np.ndarray
    errors: Optional[np.ndarray] = None
    timings: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def max_error(self) -> float:
        if self.errors is None:
            raise ValueError("no exact solution was supplied")
        return float(np.max(self.errors))

    @property
    def n_steps(self) -> int:
        return self.times.size - 1


class _Loads:
    """Per-level load vectors ``(F^n, phi_i)`` with the time-independent parts cached."""

    def __init__(self, problem: CableProblem, space: FemSpace):
        self.problem = problem
        q = space.quadrature()
        self.q = q
        if problem.laplacian_u0 is not None:
            lap = np.broadcast_to(problem.laplacian_u0(*q.points), q.weights.shape)
            self.lap_load = q.project(lap)
            self.approximate = False
        else:
            self.lap_load = -(space.stiffness @ interpolate(space, problem.u0))
            self.approximate = True
        self.u0_load = q.project(np.broadcast_to(problem.u0(*q.points), q.weights.shape))

    def __call__(self, t: float) -> np.ndarray:
        if not t > 0:
            raise DomainError(f"loads are evaluated for t > 0 only, got {t}")
        p = self.problem
        q = self.q
        f_vals = np.broadcast_to(p.f(*q.points, t), q.weights.shape)
        out = q.project(f_vals) + self.lap_load * (t ** (p.gamma - 1.0) / gamma_fn(p.gamma))
        if p.mu != 0.0:
            out -= self.u0_load * (p.mu * p.mu * t ** (p.kappa - 1.0) / gamma_fn(p.kappa))
        return out


def _factor(matrix, level):
    try:
        return cholesky_banded(BandedSymMatrix.from_sparse(matrix))
    except NotPositiveDefiniteError as exc:
        raise SolverError(f"step matrix not positive definite at level {level}", level=level) from exc


def run(
    problem: CableProblem,
    space: FemSpace,
    config: SchemeConfig,
    reuse_factorization: bool = True,
    record_errors: bool = True,
) -> SolveResult:
    """March the scheme from ``t = 0`` to ``T`` and record per-level L2 errors."""
    if abs(config.T - problem.T) > 1e-12 * problem.T:
        raise ParameterError(f"config T={config.T} does not match problem T={problem.T}")
    if space.mesh.dim != problem.dim or abs(space.mesh.length - problem.length) > 1e-12:
        raise ParameterError("mesh does not match the problem domain")
    if abs(config.gamma - problem.gamma) > 1e-14 or abs(config.kappa - problem.kappa) > 1e-14:
        raise ParameterError("scheme orders do not match problem gamma/kappa")
    if config.mu != problem.mu:
        raise ParameterError("scheme mu does not match problem mu")

    t_start = time.perf_counter()
    n_steps, tau = config.n_steps, config.tau
    times = tau * np.arange(n_steps + 1)
    ndof = space.ndof
    mass, stiff = space.mass, space.stiffness
    coeffs = config.coefficients
    s = coeffs.s
    stats = {"factorizations": 0, "solves": 0, "block_size": s * ndof}

    loads = _Loads(problem, space)
    if problem.laplacian_u0 is not None:
        u0h = ritz_project(space, laplacian=problem.laplacian_u0)
    else:
        u0h = interpolate(space, problem.u0)

    V = np.zeros((n_steps + 1, ndof))
    mv = np.zeros_like(V)
    av = np.zeros_like(V)
    t_setup = time.perf_counter()

    if s:
        rhs = np.concatenate([loads(times[n]) for n in range(1, s + 1)])
        try:
            lu = scipy.sparse.linalg.splu(block_matrix(space, config))
        except RuntimeError as exc:
            raise SolverError(f"start-up block system is singular: {exc}", level=1) from exc
        stats["factorizations"] += 1
        stats["solves"] += 1
        V[1 : s + 1] = lu.solve(rhs).reshape(s, ndof)
        for n in range(1, s + 1):
            mv[n] = mass @ V[n]
            av[n] = stiff @ V[n]

    factor = None
    for n in range(s + 1, n_steps + 1):
        if factor is None or not reuse_factorization:
            factor = _factor(step_matrix(space, config, n), n)
            stats["factorizations"] += 1
        rhs = loads(times[n]) - _history_sum(coeffs, n, mv, av)
        V[n] = factor.solve(rhs)
        if not np.all(np.isfinite(V[n])):
            raise SolverError(f"non-finite solution at level {n}", level=n)
        stats["solves"] += 1
        mv[n] = mass @ V[n]
        av[n] = stiff @ V[n]
    t_march = time.perf_counter()

    U = V + u0h
    errors = None
    if record_errors and problem.exact is not None:
        errors = np.array(
            [l2_norm_error(space, U[n], lambda *x, _t=times[n]: problem.exact(*x, _t)) for n in range(n_steps + 1)]
        )
    t_end = time.perf_counter()

    metadata = {
        "problem": problem.name,
        "gamma": problem.gamma,
        "kappa": problem.kappa,
        "mu": problem.mu,
        "family_gamma": config.scheme_gamma.family.value,
        "family_kappa": config.scheme_kappa.family.value,
        "theta_gamma": config.scheme_gamma.theta,
        "theta_kappa": config.scheme_kappa.theta,
        "tau": tau,
        "n_steps": n_steps,
        "dim": space.mesh.dim,
        "n_cells": space.mesh.n_cells,
        "h": space.mesh.h,
        "correction": config.correction.as_dict(),
        "laplacian_approximate": loads.approximate,
        "norm": "L2 (Gauss quadrature, order %d per axis)" % space.default_quad_order,
    }
    timings = {
        "setup": t_setup - t_start,
        "march": t_march - t_setup,
        "errors": t_end - t_march,
        "total": t_end - t_start,
    }
    logger.debug("run finished: %s", timings)
    return SolveResult(times, V, U, errors, timings, stats, metadata)


def solution_norms(space: FemSpace, result: SolveResult) -> np.ndarray:
    """``||U^n||`` for every level."""
    return np.array([l2_norm(space, u) for u in result.U])
