"""Convolution weights of the fractional theta-methods and their starting weights.

Both families are defined through generating functions

* FBT: ``w(xi) = (1 - theta + theta*xi)**(-alpha) * q(xi)**alpha``
* FBN: ``w(xi) = (1 + alpha*theta - alpha*theta*xi) * q(xi)**alpha``

with ``q(xi) = (3/2 - theta) - (2 - 2 theta) xi + (1/2 - theta) xi**2``.
The weights are produced by a three-term recursion in O(n) work; an
independent brute-force expansion (:func:`gf_expand_oracle`) is kept
for verification.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import IllConditionedWarning, ParameterError
from .specfun import gamma_fn

__all__ = [
    "Family",
    "ThetaScheme",
    "WeightTable",
    "StartingWeights",
    "fbt_weights",
    "fbn_weights",
    "scheme_weights",
    "gf_expand_oracle",
    "starting_weights",
    "starting_weight_table",
    "apply_discrete_operator",
    "rl_power_derivative",
    "MAX_STARTING_TERMS",
]

MAX_STARTING_TERMS = 4
_COND_LIMIT = 1e12


class Family(str, enum.Enum):
    FBT = "fbt"
    FBN = "fbn"


@dataclass(frozen=True)
class ThetaScheme:
    """One member of a theta-method family at fractional order ``alpha``."""

    family: Family
    alpha: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        a, th = self.alpha, self.theta
        if not 0.0 < a <= 1.0:
            raise ParameterError(f"alpha must lie in (0, 1], got {a}")
        if self.family is Family.FBT and not th < 0.5:
            raise ParameterError(f"FBT requires theta < 1/2, got {th}")
        if self.family is Family.FBN and not -1.0 / (2.0 * a) <= th <= 1.0:
            raise ParameterError(
                f"FBN requires -1/(2 alpha) <= theta <= 1, got theta={th}, alpha={a}"
            )

    @property
    def omega0(self) -> float:
        a, th = self.alpha, self.theta
        if self.family is Family.FBT:
            return ((3.0 - 2.0 * th) / (2.0 - 2.0 * th)) ** a
        return 2.0 ** (-a) * (1.0 + a * th) * (3.0 - 2.0 * th) ** a

    @property
    def recursion_constants(self):
        """The pair ``(phi, psi)`` of the weight recursion.

        ``phi`` has three entries and ``psi`` four; the recursion reads
        ``k psi0 w_k = sum_{j=1..3} (phi_{j-1} - (k-j) psi_j) w_{k-j}``.
        """
        a, th = self.alpha, self.theta
        if self.family is Family.FBT:
            phi = (
                -0.5 * a * (2.0 * th * th - 5.0 * th + 4.0),
                -a * (2.0 * th - 1.0) * (1.0 - th),
                -0.5 * a * th * (2.0 * th - 1.0),
            )
            psi = (
                0.5 * (3.0 - 2.0 * th) * (1.0 - th),
                0.5 * (1.0 - 2.0 * th) * (3.0 * th - 4.0),
                0.5 * (1.0 - th) * (1.0 - 6.0 * th),
                0.5 * th * (1.0 - 2.0 * th),
            )
        else:
            at = a * th
            phi = (
                2.0 * a * (th - 1.0) * (at + 1.0) + at * (th - 1.5),
                -a * (2.0 * th * th - 3.0 * at + 4.0 * at * th - 1.0),
                -at * (0.5 - th + a - 2.0 * at),
            )
            psi = (
                0.5 * (3.0 - 2.0 * th) * (1.0 + at),
                -0.5 * at * (3.0 - 2.0 * th) - 2.0 * (1.0 - th) * (at + 1.0),
                -0.5 * (at + 1.0) * (2.0 * th - 1.0) - 2.0 * at * (th - 1.0),
                -0.5 * at * (1.0 - 2.0 * th),
            )
        return phi, psi

    def weights(self, n_max: int) -> "WeightTable":
        return scheme_weights(self, n_max)


@dataclass(frozen=True)
class WeightTable:
    """Convolution weights ``omega[0..n_max]`` of one scheme (read-only)."""

    scheme: ThetaScheme
    omega: np.ndarray

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float)
        omega.setflags(write=False)
        object.__setattr__(self, "omega", omega)

    @property
    def n_max(self) -> int:
        return self.omega.size - 1

    @property
    def alpha(self) -> float:
        return self.scheme.alpha


@dataclass(frozen=True)
class StartingWeights:
    """Starting weights ``per_level[n, j-1] = omega_{n,j}`` for ``n = 0..n_max``.

    Row 0 is unused and kept at zero so rows index time levels directly.
    """

    sigma: tuple
    per_level: np.ndarray
    condition_number: float = 1.0

    @property
    def s(self) -> int:
        return len(self.sigma)

    @property
    def n_max(self) -> int:
        return self.per_level.shape[0] - 1


def _recursion(scheme: ThetaScheme, n_max: int) -> np.ndarray:
    if n_max < 0:
        raise ParameterError(f"n_max must be nonnegative, got {n_max}")
    phi, psi = scheme.recursion_constants
    w = np.zeros(n_max + 1)
    w[0] = scheme.omega0
    if n_max >= 1:
        w[1] = phi[0] * w[0] / psi[0]
    if n_max >= 2:
        w[2] = ((phi[0] - psi[1]) * w[1] + phi[1] * w[0]) / (2.0 * psi[0])
    for k in range(3, n_max + 1):
        w[k] = (
            (phi[0] - (k - 1) * psi[1]) * w[k - 1]
            + (phi[1] - (k - 2) * psi[2]) * w[k - 2]
            + (phi[2] - (k - 3) * psi[3]) * w[k - 3]
        ) / (k * psi[0])
    return w


def fbt_weights(alpha: float, theta: float, n_max: int) -> WeightTable:
    """FBT-theta convolution weights ``omega_0 .. omega_{n_max}``."""
    scheme = ThetaScheme(Family.FBT, alpha, theta)
    return WeightTable(scheme, _recursion(scheme, n_max))


def fbn_weights(alpha: float, theta: float, n_max: int) -> WeightTable:
    """FBN-theta convolution weights ``omega_0 .. omega_{n_max}``."""
    scheme = ThetaScheme(Family.FBN, alpha, theta)
    return WeightTable(scheme, _recursion(scheme, n_max))


def scheme_weights(scheme: ThetaScheme, n_max: int) -> WeightTable:
    return WeightTable(scheme, _recursion(scheme, n_max))


def _binomial_series(lam: float, power: float, n_max: int) -> np.ndarray:
    # coefficients of (1 - lam*xi)**power
    c = np.empty(n_max + 1)
    c[0] = 1.0
    for k in range(1, n_max + 1):
        c[k] = c[k - 1] * (k - 1 - power) / k * lam
    return c


def _truncated_product(a: np.ndarray, b: np.ndarray, n_max: int) -> np.ndarray:
    out = np.zeros(n_max + 1)
    for k in range(n_max + 1):
        for j in range(k + 1):
            out[k] += a[j] * b[k - j]
    return out


def gf_expand_oracle(scheme: ThetaScheme, n_max: int) -> WeightTable:
    """Weights by brute-force expansion of the factored generating function.

    Each factor ``(1 - lam xi)**p`` is expanded by the generalized binomial
    series and the series are multiplied term by term (O(n_max**2)).
    """
    a, th = scheme.alpha, scheme.theta
    lam2 = (1.0 - 2.0 * th) / (3.0 - 2.0 * th)
    series = _binomial_series(1.0, a, n_max)
    series = _truncated_product(series, _binomial_series(lam2, a, n_max), n_max)
    if scheme.family is Family.FBT:
        lam1 = th / (th - 1.0)
        series = _truncated_product(series, _binomial_series(lam1, -a, n_max), n_max)
        scale = ((3.0 - 2.0 * th) / (2.0 - 2.0 * th)) ** a
    else:
        lam1 = a * th / (1.0 + a * th)
        linear = np.zeros(n_max + 1)
        linear[0] = 1.0
        if n_max >= 1:
            linear[1] = -lam1
        series = _truncated_product(series, linear, n_max)
        scale = (1.5 - th) ** a * (1.0 + a * th)
    return WeightTable(scheme, scale * series)


def rl_power_derivative(sigma: float, alpha: float, t):
    """Riemann-Liouville derivative of order ``alpha`` of ``t**sigma``."""
    return gamma_fn(sigma + 1.0) / gamma_fn(sigma + 1.0 - alpha) * np.power(t, sigma - alpha)


def _check_sigma(sigma: Sequence[float]) -> tuple:
    sigma = tuple(float(s) for s in sigma)
    if not 1 <= len(sigma) <= MAX_STARTING_TERMS:
        raise ParameterError(
            f"need between 1 and {MAX_STARTING_TERMS} correction exponents, got {len(sigma)}"
        )
    if sigma[0] <= 0.0 or any(b <= a for a, b in zip(sigma, sigma[1:])):
        raise ParameterError(f"correction exponents must be positive and increasing: {sigma}")
    return sigma


def _starting_system(weights: WeightTable, sigma: tuple, levels: np.ndarray):
    """Matrix and right-hand sides of the exactness conditions at ``levels``."""
    omega = weights.omega
    alpha = weights.alpha
    s = len(sigma)
    j = np.arange(1, s + 1, dtype=float)
    mat = np.power.outer(j, sigma).T  # mat[i, j-1] = j**sigma_i
    rhs = np.empty((levels.size, s))
    for i, sg in enumerate(sigma):
        exact = rl_power_derivative(sg, alpha, levels.astype(float))
        for row, n in enumerate(levels):
            k = np.arange(n + 1, dtype=float)
            rhs[row, i] = exact[row] - np.dot(omega[n::-1], k**sg)
    return mat, rhs


def starting_weight_table(weights: WeightTable, sigma: Sequence[float], n_max: int) -> StartingWeights:
    """Starting weights for every level ``1..n_max``.

    At each level the weights make the discrete operator exact on
    ``t**sigma_i``; the ``tau`` powers cancel, so the system depends
    only on the level index.  Its matrix ``j**sigma_i`` does not depend on
    the level and is factored once.
    """
    sigma = _check_sigma(sigma)
    if n_max > weights.n_max:
        raise ParameterError(f"weights cover up to {weights.n_max}, need {n_max}")
    levels = np.arange(1, n_max + 1)
    mat, rhs = _starting_system(weights, sigma, levels)
    cond = float(np.linalg.cond(mat))
    if cond > _COND_LIMIT:
        warnings.warn(
            f"starting-weight system condition number {cond:.2e}", IllConditionedWarning, stacklevel=2
        )
    per_level = np.zeros((n_max + 1, len(sigma)))
    if n_max >= 1:
        per_level[1:] = np.linalg.solve(mat, rhs.T).T
    return StartingWeights(sigma, per_level, cond)


def starting_weights(weights: WeightTable, sigma: Sequence[float], n: int) -> np.ndarray:
    """Starting weights ``(omega_{n,1}, ..., omega_{n,s})`` at a single level ``n >= 1``."""
    if n < 1:
        raise ParameterError(f"starting weights are defined for n >= 1, got {n}")
    return starting_weight_table(weights, sigma, n).per_level[n]


def apply_discrete_operator(
    weights: WeightTable,
    starting: Optional[StartingWeights],
    samples,
    tau: float,
    n: Optional[int] = None,
) -> float:
    """Discrete fractional derivative at level ``n``.

    Returns ``tau**-alpha * (sum_{k<=n} omega_{n-k} phi^k + sum_j omega_{n,j} phi^j)``.
    ``samples`` holds ``phi^0, phi^1, ...``; ``n`` defaults to the last index.
    At levels ``n < s`` the starting part reads samples past ``n``, so
    ``samples`` must then extend to index ``s``.
    """
    phi = np.asarray(samples, dtype=float)
    if n is None:
        n = phi.size - 1
    if n < 0 or n >= phi.size:
        raise ParameterError(f"level {n} outside the {phi.size} samples given")
    if n > weights.n_max:
        raise ParameterError(f"weights cover up to index {weights.n_max}, got level {n}")
    total = float(np.dot(weights.omega[n::-1], phi[: n + 1]))
    if starting is not None and n >= 1:
        if n > starting.n_max:
            raise ParameterError(f"starting weights cover levels up to {starting.n_max}, got {n}")
        s = starting.s
        if phi.size <= s:
            raise ParameterError(f"starting part needs samples up to index {s}")
        total += float(np.dot(starting.per_level[n], phi[1 : s + 1]))
    return tau ** (-weights.alpha) * total
