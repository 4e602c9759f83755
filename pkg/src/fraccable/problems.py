"""Benchmark problems with closed-form solutions.

Source terms are obtained with the Riemann-Liouville power rule
``D^beta t^sigma = Gamma(sigma+1)/Gamma(sigma+1-beta) t^(sigma-beta)``,
which also covers the constant term (``sigma = 0``).
"""

from __future__ import annotations

import enum
from functools import lru_cache

import numpy as np

from .solver import CableProblem
from .specfun import MLSeriesParams, gamma_fn, mittag_leffler_neg

__all__ = [
    "BenchmarkCase",
    "manufactured_source_1d",
    "manufactured_source_2d",
    "weak_1d_exact",
    "smooth_2d_exact",
    "example1_problem",
    "mittag_leffler_problem",
    "example2_problem",
    "make_problem",
]

TWO_PI = 2.0 * np.pi


class BenchmarkCase(str, enum.Enum):
    EXAMPLE1_1D_WEAK = "Example1_1D_weak"
    EXAMPLE1_ML = "Example1_ML"
    EXAMPLE2_2D_SMOOTH = "Example2_2D_smooth"


def _rl_power(beta, sigma, t):
    return gamma_fn(sigma + 1.0) / gamma_fn(sigma + 1.0 - beta) * t ** (sigma - beta)


def weak_1d_exact(gamma, kappa):
    def u(x, t):
        return (1.0 + t**gamma + t**kappa + t**3) * np.sin(TWO_PI * x)

    return u


def manufactured_source_1d(gamma, kappa, mu, x, t):
    """Source for ``u = (1 + t^gamma + t^kappa + t^3) sin(2 pi x)`` on ``(0, 1)``."""
    exponents = (0.0, gamma, kappa, 3.0)
    u_t = gamma * t ** (gamma - 1.0) + kappa * t ** (kappa - 1.0) + 3.0 * t * t
    d_gamma = sum(_rl_power(1.0 - gamma, s, t) for s in exponents)
    d_kappa = sum(_rl_power(1.0 - kappa, s, t) for s in exponents)
    # lap u = -(2 pi)^2 u
    return (u_t + TWO_PI**2 * d_gamma + mu * mu * d_kappa) * np.sin(TWO_PI * x)


def smooth_2d_exact(x, y, t):
    return (1.0 + 3.0 * t**3) * np.sin(TWO_PI * x) * np.sin(TWO_PI * y)


def manufactured_source_2d(gamma, kappa, mu, x, y, t):
    """Closed-form source for ``u = (1 + 3t^3) sin(2 pi x) sin(2 pi y)``."""
    g, k = gamma, kappa
    amp = (
        9.0 * t * t
        + 8.0 * t ** (g - 1.0) * np.pi**2 * (g**3 + 3 * g**2 + 2 * g + 18.0 * t**3) / gamma_fn(g + 3.0)
        + mu * mu * t ** (k - 1.0) * (k**3 + 3 * k**2 + 2 * k + 18.0 * t**3) / gamma_fn(k + 3.0)
    )
    return amp * np.sin(TWO_PI * x) * np.sin(TWO_PI * y)


def example1_problem(gamma, kappa, mu=1.0) -> CableProblem:
    """Weakly singular 1D solution on ``(0, 1)``, ``T = 1``."""
    return CableProblem(
        gamma=gamma,
        kappa=kappa,
        mu=mu,
        f=lambda x, t: manufactured_source_1d(gamma, kappa, mu, x, t),
        u0=lambda x: np.sin(TWO_PI * x),
        laplacian_u0=lambda x: -(TWO_PI**2) * np.sin(TWO_PI * x),
        exact=weak_1d_exact(gamma, kappa),
        T=1.0,
        dim=1,
        length=1.0,
        name=BenchmarkCase.EXAMPLE1_1D_WEAK.value,
        regularity=(gamma, kappa, 3.0),
    )


def mittag_leffler_problem(gamma, rel_tol=1e-15) -> CableProblem:
    """Zero-source problem on ``(0, pi)`` with ``mu = 0``, solved by ``E_gamma(-t^gamma) sin x``.

    ``kappa`` plays no role since ``mu = 0``; it is set to ``gamma``.
    """
    params = MLSeriesParams(gamma, rel_tol=rel_tol)

    @lru_cache(maxsize=4096)
    def amplitude(t):
        return mittag_leffler_neg(params, float(t))

    def exact(x, t):
        return amplitude(float(t)) * np.sin(x)

    return CableProblem(
        gamma=gamma,
        kappa=gamma,
        mu=0.0,
        f=lambda x, t: np.zeros_like(x),
        u0=np.sin,
        laplacian_u0=lambda x: -np.sin(x),
        exact=exact,
        T=1.0,
        dim=1,
        length=np.pi,
        name=BenchmarkCase.EXAMPLE1_ML.value,
        # E_gamma(-t^gamma) - 1 is a power series in t^gamma
        regularity=tuple(k * gamma for k in range(1, 7)),
    )


def example2_problem(gamma, kappa, mu=1.0) -> CableProblem:
    """Smooth 2D solution on the unit square, ``T = 1``."""
    return CableProblem(
        gamma=gamma,
        kappa=kappa,
        mu=mu,
        f=lambda x, y, t: manufactured_source_2d(gamma, kappa, mu, x, y, t),
        u0=lambda x, y: np.sin(TWO_PI * x) * np.sin(TWO_PI * y),
        laplacian_u0=lambda x, y: -2.0 * TWO_PI**2 * np.sin(TWO_PI * x) * np.sin(TWO_PI * y),
        exact=smooth_2d_exact,
        T=1.0,
        dim=2,
        length=1.0,
        name=BenchmarkCase.EXAMPLE2_2D_SMOOTH.value,
        regularity=(3.0,),
    )


def make_problem(case, gamma, kappa=None, mu=None) -> CableProblem:
    case = BenchmarkCase(case)
    if case is BenchmarkCase.EXAMPLE1_ML:
        return mittag_leffler_problem(gamma)
    kappa = gamma if kappa is None else kappa
    mu = 1.0 if mu is None else mu
    if case is BenchmarkCase.EXAMPLE1_1D_WEAK:
        return example1_problem(gamma, kappa, mu)
    return example2_problem(gamma, kappa, mu)
