"""Symbols of the theta-method generating functions and Toeplitz positivity checks.

For a weight sequence ``w_k`` the symbol is the real function
``f(x) = w_0 + sum_{k>=1} w_k cos(kx) = Re w(exp(ix))``.  The symmetric
Toeplitz matrix ``D_n`` with diagonal ``w_0`` and off-diagonals ``w_k / 2``
has ``f`` as its symbol, so ``f >= 0`` makes the quadratic form
``sum_jk w_|j-k| v_j v_k`` nonnegative.

Closed forms factor ``w(exp(ix))`` into a magnitude and a phase:
``1 - exp(ix) = 2 sin(x/2) exp(i(x - pi)/2)`` and
``1 - lam exp(ix) = |.| exp(i phi(lam))`` with
``phi(lam) = atan2(-lam sin x, 1 - lam cos x)``.  The sign of ``f`` is
carried by the phase factor ``g = cos(total phase)``.  The phase is
evaluated in a form free of cancellation near ``x = 0``, where the
symbol vanishes and ``ln f`` has to stay accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import BudgetExceededError, ParameterError, PositivityViolation
from .linalg import DENSE_EIGEN_BUDGET, sym_eigen_dense
from .weights import Family, ThetaScheme, WeightTable, scheme_weights

__all__ = [
    "SymbolEvaluation",
    "ToeplitzSpec",
    "symbol_series",
    "symbol_closed_form",
    "symbol_parts",
    "h_theta",
    "h_theta_range_check",
    "phase_factor",
    "H_of",
    "H_grid",
    "fbn_admissible_grid",
    "toeplitz_min_eigen",
    "determinant_ratios",
    "szego_epsilon0",
]

_GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)


@dataclass(frozen=True)
class SymbolEvaluation:
    scheme: ThetaScheme
    x: float
    f_value: float
    g_value: float
    h_value: Optional[float] = None


@dataclass(frozen=True)
class ToeplitzSpec:
    """Symmetric Toeplitz matrix with diagonal ``c0`` and ``c_k`` on the k-th off-diagonals."""

    c0: float
    ck: np.ndarray
    n: int

    def __post_init__(self):
        ck = np.asarray(self.ck, dtype=float)
        if self.n < 1:
            raise ParameterError(f"matrix order must be positive, got {self.n}")
        if ck.size < self.n - 1:
            raise ParameterError(f"need {self.n - 1} off-diagonal coefficients, got {ck.size}")
        object.__setattr__(self, "ck", ck)

    @classmethod
    def from_weights(cls, weights: WeightTable, n: int) -> "ToeplitzSpec":
        if weights.n_max < n - 1:
            raise ParameterError(f"weights cover index {weights.n_max}, matrix order {n} needs {n - 1}")
        return cls(float(weights.omega[0]), 0.5 * weights.omega[1:n], n)

    def to_dense(self) -> np.ndarray:
        col = np.concatenate([[self.c0], self.ck[: self.n - 1]])
        idx = np.abs(np.subtract.outer(np.arange(self.n), np.arange(self.n)))
        return col[idx]


def symbol_series(scheme: ThetaScheme, x, k_max: int):
    """Truncated cosine series ``w_0 + sum_{k=1..k_max} w_k cos(kx)``."""
    if k_max < 1:
        raise ParameterError(f"k_max must be at least 1, got {k_max}")
    w = scheme_weights(scheme, k_max).omega
    x = np.asarray(x, dtype=float)
    k = np.arange(k_max + 1)
    vals = np.cos(np.multiply.outer(x, k)) @ w
    return float(vals) if vals.ndim == 0 else vals


def _mod(lam, x):
    """``|1 - lam e^{ix}|`` as a sum of nonnegative terms (no cancellation near its zero)."""
    if lam >= 0:
        return np.sqrt((1.0 - lam) ** 2 + 4.0 * lam * np.sin(0.5 * x) ** 2)
    return np.sqrt((1.0 + lam) ** 2 - 4.0 * lam * np.cos(0.5 * x) ** 2)


def _lambdas(scheme: ThetaScheme):
    a, th = scheme.alpha, scheme.theta
    lam2 = (1.0 - 2.0 * th) / (3.0 - 2.0 * th)
    if scheme.family is Family.FBT:
        lam1 = th / (th - 1.0)
    else:
        lam1 = a * th / (1.0 + a * th)
    return lam1, lam2


def _phase_terms(family: Family, alpha, theta):
    """Coefficients ``c_k, r_k`` with ``delta(x) = sum_k c_k atan(r_k tan(x/2))``.

    Uses ``arg(1 - lam e^{ix}) = x/2 - atan(r tan(x/2))``, ``r = (1+lam)/(1-lam)``.
    ``sum_k c_k r_k = 0`` for both families, so ``delta = O(x^3)``.
    ``alpha`` and ``theta`` may be arrays; the term index is the last axis.
    """
    a = np.asarray(alpha, dtype=float)
    th = np.asarray(theta, dtype=float)
    one = np.ones(np.broadcast(a, th).shape)
    if family is Family.FBT:
        c = np.stack([one, one, -one], axis=-1)
        r = np.stack([one, 1.0 - 2.0 * th * one, 2.0 - 2.0 * th * one], axis=-1)
    else:
        c = np.stack([2.0 * a + one, -one, -a * one], axis=-1)
        r = np.stack([one, 1.0 + 2.0 * a * th, 2.0 - 2.0 * th * one], axis=-1)
    return c, r


def _phase_delta(c, r, x):
    """Deviation of the symbol's phase from its ``x -> 0+`` limit, for ``x in [0, pi]``.

    ``c`` and ``r`` carry the term index on their last axis and broadcast
    against ``x``.
    """
    t = np.tan(0.5 * np.asarray(x, dtype=float))
    out = np.sum(c * np.arctan(r * t[..., None]), axis=-1)
    # the direct sum cancels to O(t^3); expand atan where the series converges fast
    small = t * np.max(np.abs(r), axis=-1) < 0.5
    if np.any(small):
        ts = np.where(small, t, 0.0)
        acc = np.zeros(np.broadcast(ts, out).shape)
        for m in range(1, 30):
            k = 2 * m + 1
            acc += (-1.0) ** m * np.sum(c * r**k, axis=-1) * ts**k / k
        out = np.where(small, acc, out)
    return out


def _fold(x):
    # the symbol is even about pi
    x = np.asarray(x, dtype=float)
    return np.minimum(x, 2.0 * np.pi - x)


def h_theta(theta: float, x):
    """Phase function of the FBT symbol, ``x/2 - pi/2 + phi(lam2) - phi(lam1)`` for ``x in [0, pi]``."""
    ThetaScheme(Family.FBT, 1.0, theta)
    c, r = _phase_terms(Family.FBT, 1.0, theta)
    return _phase_delta(c, r, x) - 0.5 * np.pi


def phase_factor(scheme: ThetaScheme, x):
    """``g(x) = cos(arg w(exp(ix)))``, the sign-carrying factor of the symbol."""
    return _phase_factor(scheme.family, scheme.alpha, scheme.theta, x)


def _phase_factor(family, alpha, theta, x):
    c, r = _phase_terms(family, alpha, theta)
    a = np.asarray(alpha, dtype=float)
    delta = _phase_delta(c, r, _fold(x))
    if family is Family.FBT:
        delta = a * delta
    # cos(delta - a pi/2), with cos(a pi/2) written so that it is exactly 0 at a = 1
    return np.sin(0.5 * np.pi * (1.0 - a)) * np.cos(delta) + np.sin(0.5 * np.pi * a) * np.sin(delta)


def symbol_parts(scheme: ThetaScheme, x):
    """Magnitude ``|w(exp(ix))|`` and phase factor ``g`` on an array of ``x``."""
    a, th = scheme.alpha, scheme.theta
    lam1, lam2 = _lambdas(scheme)
    x = np.asarray(x, dtype=float)
    base = np.abs(2.0 * np.sin(0.5 * x)) * _mod(lam2, x)
    if scheme.family is Family.FBT:
        scale = (1.5 - th) / (1.0 - th)
        mag = (scale * base / _mod(lam1, x)) ** a
    else:
        mag = (1.0 + a * th) * _mod(lam1, x) * ((1.5 - th) * base) ** a
    return mag, phase_factor(scheme, x)


def symbol_closed_form(scheme: ThetaScheme, x: float) -> SymbolEvaluation:
    """Symbol value at one point via the magnitude-phase factorization.

    At ``x = 0`` and ``x = 2 pi`` the symbol vanishes; ``g`` and ``h`` are
    the one-sided limits there.
    """
    x = float(x)
    if not 0.0 <= x <= 2.0 * np.pi:
        raise ParameterError(f"x must lie in [0, 2 pi], got {x}")
    # one-sided limits at the ends of the period
    xe = x if x < 2.0 * np.pi else x - 2.0 * np.pi
    mag, g = symbol_parts(scheme, xe)
    f = 0.0 if x in (0.0, 2.0 * np.pi) else float(mag * g)
    h = float(h_theta(scheme.theta, x)) if scheme.family is Family.FBT else None
    return SymbolEvaluation(scheme, x, f, float(g), h)


def h_theta_range_check(theta: float, n_samples: int = 1001):
    """Sample ``h_theta`` on ``[0, pi]``: ``(min, max, nondecreasing)``."""
    if not theta < 0.5:
        raise ParameterError(f"h_theta is defined for theta < 1/2, got {theta}")
    if n_samples < 2:
        raise ParameterError(f"n_samples must be at least 2, got {n_samples}")
    h = h_theta(theta, np.linspace(0.0, np.pi, n_samples))
    return float(h.min()), float(h.max()), bool(np.all(np.diff(h) >= -1e-12))


def _golden_min(fun, lo, hi, tol=1e-10, max_iter=200):
    """Vectorized golden-section search; ``fun`` maps an array of abscissae to values."""
    a, b = np.array(lo, dtype=float), np.array(hi, dtype=float)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if np.all(b - a < tol):
            break
        left = fc < fd
        # left: keep [a, d]; otherwise keep [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _GOLDEN * (b - a)
        new_d = a + _GOLDEN * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        f_new = fun(np.where(left, new_c, new_d))
        fc, fd = np.where(left, f_new, fd), np.where(left, fc, f_new)
        c, d = c_next, d_next
    return np.minimum(fc, fd)


def _H_rows(family, alpha, thetas, x_grid, refine):
    # one alpha, several theta: grid minimum plus golden refinement, all vectorized
    thetas = np.asarray(thetas, dtype=float)
    x = np.linspace(0.0, np.pi, x_grid)
    g = _phase_factor(family, alpha, thetas[:, None], x[None, :])
    i = np.argmin(g, axis=1)
    best = g[np.arange(thetas.size), i]
    if refine:
        lo = x[np.maximum(i - 1, 0)]
        hi = x[np.minimum(i + 1, x_grid - 1)]
        best = np.minimum(best, _golden_min(lambda t: _phase_factor(family, alpha, thetas, t), lo, hi))
    return best


def H_of(alpha: float, theta: float, method="fbn", x_grid: int = 2001, refine: bool = True) -> float:
    """``min_{0 <= x <= pi} g(x)`` for the scheme ``(method, alpha, theta)``.

    Grid minimum over ``x_grid`` points, refined by golden-section search
    inside the bracketing cells when ``refine`` is set.
    """
    scheme = ThetaScheme(method, alpha, theta)
    return float(_H_rows(scheme.family, scheme.alpha, [scheme.theta], x_grid, refine)[0])


def fbn_admissible_grid(n_alpha: int = 41, n_theta: int = 41, alpha_min: float = 0.025):
    """Grid over ``alpha in [alpha_min, 1]``, ``theta in [-1/(2 alpha), 1]`` (theta mapped per alpha)."""
    alphas = np.linspace(alpha_min, 1.0, n_alpha)
    frac = np.linspace(0.0, 1.0, n_theta)
    lows = -0.5 / alphas
    thetas = lows[:, None] + frac[None, :] * (1.0 - lows[:, None])
    return alphas, np.clip(thetas, lows[:, None], 1.0)


def H_grid(alphas, thetas, method="fbn", x_grid: int = 2001, refine: bool = True) -> np.ndarray:
    """``H`` at every ``(alphas[i], thetas[i, j])``."""
    family = Family(method)
    alphas = np.asarray(alphas, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    out = np.empty(thetas.shape)
    for i, a in enumerate(alphas):
        for th in thetas[i]:
            ThetaScheme(family, a, th)
        out[i] = _H_rows(family, a, thetas[i], x_grid, refine)
    return out


def toeplitz_min_eigen(weights: WeightTable, n: int, shift_last: float = 0.0) -> float:
    """Smallest eigenvalue of ``D_n - shift_last * E_n``.

    ``E_n`` is zero except for a one in the last diagonal entry.  Orders
    above the dense budget raise ``BudgetExceededError``.
    """
    if n > DENSE_EIGEN_BUDGET:
        raise BudgetExceededError(f"dense eigensolve limited to order {DENSE_EIGEN_BUDGET}, got {n}")
    d = ToeplitzSpec.from_weights(weights, n).to_dense()
    d[-1, -1] -= shift_last
    return float(sym_eigen_dense(d)[0])


def determinant_ratios(weights: WeightTable, n_max: int) -> np.ndarray:
    """``det D_n / det D_{n-1}`` for ``n = 2..n_max`` from eigenvalue products."""
    logdet = np.empty(n_max + 1)
    logdet[0] = 0.0
    for n in range(1, n_max + 1):
        ev = sym_eigen_dense(ToeplitzSpec.from_weights(weights, n).to_dense())
        if ev[0] <= 0:
            raise PositivityViolation(f"D_{n} is not positive definite (min eigenvalue {ev[0]:.3e})")
        logdet[n] = float(np.sum(np.log(ev)))
    return np.exp(np.diff(logdet)[1:])


def _graded_panels(a, b, levels):
    # panels shrinking by 2 toward both ends of [a, b]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    cuts = half * 0.5 ** np.arange(levels)
    left = np.concatenate([[a], a + cuts[::-1], [mid]])
    right = np.concatenate([b - cuts, [b]])
    edges = np.unique(np.concatenate([left, right]))
    return edges[:-1], edges[1:]


def _log_symbol_mean(scheme, levels, order):
    xi, wi = np.polynomial.legendre.leggauss(order)
    lo, hi = _graded_panels(0.0, np.pi, levels)
    mid = 0.5 * (lo + hi)[:, None]
    rad = 0.5 * (hi - lo)[:, None]
    x = (mid + rad * xi[None, :]).ravel()
    w = (rad * wi[None, :]).ravel()
    mag, g = symbol_parts(scheme, x)
    f = mag * g
    if np.min(f) < -1e-12:
        raise PositivityViolation(f"symbol is negative ({np.min(f):.3e}) for {scheme}")
    # f is even about pi, so the mean over [0, 2 pi] is the mean over [0, pi]
    return float(np.dot(w, np.log(np.maximum(f, np.finfo(float).tiny)))) / np.pi


def szego_epsilon0(scheme: ThetaScheme, quad_tol: float = 1e-10, levels: int = 40, order: int = 16) -> float:
    """``exp((1/2 pi) int_0^{2 pi} ln f(x) dx)``, the limit of ``det D_n / det D_{n-1}``.

    Composite Gauss quadrature on panels graded geometrically toward the
    zeros of ``f`` at ``x = 0`` (and ``x = pi``, where some FBN members
    vanish).  The estimate is compared against a finer rule; a mismatch
    above ``quad_tol`` raises ``ArithmeticError``.
    """
    coarse = _log_symbol_mean(scheme, levels, order)
    fine = _log_symbol_mean(scheme, levels + 20, order + 8)
    if abs(math.exp(fine) - math.exp(coarse)) > quad_tol:
        raise ArithmeticError(
            f"log-symbol quadrature not converged: {math.exp(coarse):.15g} vs {math.exp(fine):.15g}"
        )
    return math.exp(fine)
