import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraccable.exceptions import IllConditionedWarning, ParameterError
from fraccable.specfun import gamma_fn
from fraccable.weights import (
    Family,
    ThetaScheme,
    apply_discrete_operator,
    fbn_weights,
    fbt_weights,
    gf_expand_oracle,
    rl_power_derivative,
    scheme_weights,
    starting_weight_table,
    starting_weights,
)

FBT_GRID = [(a, th) for a in (0.1, 0.5, 0.9) for th in (-2.0, 0.0, 0.3)] + [(1.0, 0.49)]
FBN_GRID = [(a, th) for a in (0.2, 0.6, 1.0) for th in (-0.5, 0.5, 1.0)] + [(0.25, -2.0)]
GRID_20 = [(Family.FBT, a, th) for a, th in FBT_GRID] + [(Family.FBN, a, th) for a, th in FBN_GRID]


def _unfactored_gf(family, alpha, theta):
    a, th = mpmath.mpf(alpha), mpmath.mpf(theta)

    def q(x):
        return (mpmath.mpf(3) / 2 - th) - (2 - 2 * th) * x + (mpmath.mpf(1) / 2 - th) * x * x

    if family is Family.FBT:
        return lambda x: (1 - th + th * x) ** (-a) * q(x) ** a
    return lambda x: (1 + a * th - a * th * x) * q(x) ** a


def test_grid_has_twenty_schemes():
    assert len(GRID_20) == 20
    for fam, a, th in GRID_20:
        ThetaScheme(fam, a, th)


@pytest.mark.parametrize("family, alpha, theta", GRID_20)
def test_recursion_matches_series_oracle(family, alpha, theta):
    scheme = ThetaScheme(family, alpha, theta)
    rec = scheme_weights(scheme, 50).omega
    ref = gf_expand_oracle(scheme, 50).omega
    assert np.max(np.abs(rec - ref)) <= 1e-12


@pytest.mark.parametrize("family, alpha, theta", [(Family.FBT, 0.5, -0.5), (Family.FBT, 0.3, 0.25), (Family.FBN, 0.4, -1.0), (Family.FBN, 0.7, 0.8)])
def test_recursion_matches_mpmath_taylor(family, alpha, theta):
    # fully independent of the package: Taylor coefficients of the unfactored generating function
    mpmath.mp.dps = 50
    ref = [float(c) for c in mpmath.taylor(_unfactored_gf(family, alpha, theta), 0, 12)]
    got = scheme_weights(ThetaScheme(family, alpha, theta), 12).omega
    assert np.max(np.abs(got - np.array(ref))) <= 1e-13


def test_fbt_omega0():
    assert fbt_weights(0.3, 0.0, 0).omega[0] == pytest.approx(1.5**0.3, rel=1e-15)


def test_fbn_omega0():
    assert fbn_weights(0.5, 1.0, 0).omega[0] == pytest.approx(1.0606601717798212, rel=1e-15)


@pytest.mark.parametrize("make", [fbt_weights, fbn_weights])
def test_bdf2_reduction(make):
    w = make(1.0, 0.0, 40).omega
    expected = np.zeros(41)
    expected[:3] = (1.5, -2.0, 0.5)
    assert np.max(np.abs(w - expected)) <= 1e-14


@pytest.mark.parametrize("alpha", np.round(np.arange(1, 11) / 10, 1))
def test_families_coincide_at_theta_zero(alpha):
    d = fbt_weights(alpha, 0.0, 50).omega - fbn_weights(alpha, 0.0, 50).omega
    assert np.max(np.abs(d)) <= 1e-12


@pytest.mark.parametrize("family, alpha, theta", GRID_20[::3])
@pytest.mark.parametrize("m", [64, 256, 1024])
def test_partial_sums_decay(family, alpha, theta, m):
    w = scheme_weights(ThetaScheme(family, alpha, theta), m).omega
    assert abs(w.sum()) <= 10 * m ** (-alpha) * abs(w[0])


def test_oracle_polynomial_case():
    got = gf_expand_oracle(ThetaScheme(Family.FBT, 1.0, 0.0), 2).omega
    assert np.allclose(got, (1.5, -2.0, 0.5), atol=1e-15)


@pytest.mark.parametrize(
    "family, alpha, theta",
    [(Family.FBT, 0.5, 0.5), (Family.FBT, 0.5, 0.7), (Family.FBN, 0.5, -1.01), (Family.FBN, 0.5, 1.01), (Family.FBT, 0.0, 0.0), (Family.FBN, 1.1, 0.0)],
)
def test_inadmissible_parameters_rejected(family, alpha, theta):
    with pytest.raises(ParameterError):
        ThetaScheme(family, alpha, theta)


def test_theta_049_is_legal():
    ThetaScheme(Family.FBT, 0.5, 0.49)


def test_weight_table_is_read_only():
    w = fbt_weights(0.5, 0.0, 5)
    with pytest.raises(ValueError):
        w.omega[0] = 1.0


def test_negative_n_max_rejected():
    with pytest.raises(ParameterError):
        fbt_weights(0.5, 0.0, -1)


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(0.05, 1.0), frac=st.floats(0.0, 1.0), fbn=st.booleans())
def test_recursion_oracle_property(alpha, frac, fbn):
    if fbn:
        lo = -0.5 / alpha
        scheme = ThetaScheme(Family.FBN, alpha, lo + frac * (1.0 - lo))
    else:
        scheme = ThetaScheme(Family.FBT, alpha, -3.0 + 3.45 * frac)
    rec = scheme_weights(scheme, 30).omega
    ref = gf_expand_oracle(scheme, 30).omega
    assert np.max(np.abs(rec - ref)) <= 1e-12


# starting weights


def _residual(weights, sigma, n, vec):
    omega, alpha = weights.omega, weights.alpha
    out = []
    for sg in sigma:
        lhs = sum(j**sg * vec[j - 1] for j in range(1, len(sigma) + 1))
        rhs = gamma_fn(sg + 1) / gamma_fn(sg + 1 - alpha) * n ** (sg - alpha) - sum(omega[n - k] * k**sg for k in range(n + 1))
        out.append(abs(lhs - rhs) / max(1.0, abs(rhs)))
    return max(out)


@pytest.mark.parametrize("alpha, theta", [(0.5, 0.0), (0.3, -1.0), (0.8, 0.4)])
def test_single_term_closed_form(alpha, theta):
    w = fbt_weights(alpha, theta, 1)
    got = starting_weights(w, [alpha], 1)
    assert got[0] == pytest.approx(gamma_fn(alpha + 1) - w.omega[0], rel=1e-13)


def test_two_term_fbt_residual():
    w = fbt_weights(0.7, 0.0, 10)
    vec = starting_weights(w, [0.3, 0.9], 10)
    assert _residual(w, (0.3, 0.9), 10, vec) <= 1e-10


def test_two_term_fbn_residual():
    w = fbn_weights(0.5, 0.5, 5)
    vec = starting_weights(w, [0.5, 1.5], 5)
    assert _residual(w, (0.5, 1.5), 5, vec) <= 1e-10


def test_table_rows_match_single_level():
    w = fbn_weights(0.4, -0.5, 20)
    table = starting_weight_table(w, [0.2, 0.6, 1.4], 20)
    for n in (1, 7, 20):
        assert np.allclose(table.per_level[n], starting_weights(w, [0.2, 0.6, 1.4], n), rtol=1e-13)
    assert np.all(table.per_level[0] == 0)


@pytest.mark.parametrize("sigma", [[], [0.5, 0.5], [0.9, 0.3], [-0.1], [0.1, 0.2, 0.3, 0.4, 0.5]])
def test_bad_sigma_rejected(sigma):
    with pytest.raises(ParameterError):
        starting_weights(fbt_weights(0.5, 0.0, 5), sigma, 3)


def test_starting_level_zero_rejected():
    with pytest.raises(ParameterError):
        starting_weights(fbt_weights(0.5, 0.0, 5), [0.5], 0)


def test_ill_conditioned_system_warns():
    with pytest.warns(IllConditionedWarning):
        starting_weight_table(fbt_weights(0.5, 0.0, 10), [0.1, 0.1 + 1e-7, 0.1 + 2e-7], 10)


# discrete operator


def test_operator_of_zero_is_zero():
    w = fbt_weights(0.5, 0.0, 10)
    assert apply_discrete_operator(w, None, np.zeros(11), 0.1) == 0.0


@pytest.mark.parametrize("family", [Family.FBT, Family.FBN])
@pytest.mark.parametrize("alpha, theta", [(0.7, 0.0), (0.1, 0.3), (0.6, -0.5)])
def test_correction_exact_on_powers(family, alpha, theta):
    sigma = (0.3, 0.9)
    n_max, tau = 100, 1.0 / 100
    w = scheme_weights(ThetaScheme(family, alpha, theta), n_max)
    sw = starting_weight_table(w, sigma, n_max)
    t = tau * np.arange(n_max + 1)
    for sg in sigma:
        phi = t**sg
        for n in range(1, n_max + 1):
            got = apply_discrete_operator(w, sw, phi, tau, n)
            exact = rl_power_derivative(sg, alpha, t[n])
            assert abs(got - exact) <= 1e-9 * abs(exact)


def test_uncorrected_operator_second_order_on_smooth_power():
    sg, alpha = 3.5, 0.5
    w = fbt_weights(alpha, 0.0, 160)
    errs = []
    for n in (20, 40, 80, 160):
        tau = 1.0 / n
        phi = (tau * np.arange(n + 1)) ** sg
        errs.append(abs(apply_discrete_operator(w, None, phi, tau) - rl_power_derivative(sg, alpha, 1.0)))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert all(abs(p - 2.0) <= 0.15 for p in orders), orders


def test_operator_length_checks():
    w = fbt_weights(0.5, 0.0, 4)
    with pytest.raises(ParameterError):
        apply_discrete_operator(w, None, np.zeros(3), 0.1, n=5)
    with pytest.raises(ParameterError):
        apply_discrete_operator(w, None, np.zeros(10), 0.1)


def test_operator_linearity():
    rng = np.random.default_rng(3)
    w = fbn_weights(0.3, 0.2, 30)
    sw = starting_weight_table(w, [0.3], 30)
    a, b = rng.normal(size=31), rng.normal(size=31)
    lhs = apply_discrete_operator(w, sw, 2 * a - 3 * b, 0.05)
    rhs = 2 * apply_discrete_operator(w, sw, a, 0.05) - 3 * apply_discrete_operator(w, sw, b, 0.05)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
