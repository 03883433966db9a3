import math

import numpy as np
import pytest

from zzlab.bspoly import (TrigPoly, bs_diagnostics, fourier_coeff, indicator,
                          selberg_pair, trig_eval)


def test_c0_exact_identity():
    minus, plus = selberg_pair(0.3, 10)
    assert plus.coeffs[0] == 0.3 + 1 / 11
    assert minus.coeffs[0] == 0.3 - 1 / 11


def test_interior_point_ordering():
    minus, plus = selberg_pair(0.3, 10)
    assert trig_eval(plus, 0.0) >= 1.0
    assert trig_eval(minus, 0.0) <= 1.0


def test_degree_support():
    _, plus = selberg_pair(0.3, 10)
    assert fourier_coeff(plus, 11) == 0.0
    assert fourier_coeff(plus, 10) != 0.0
    assert fourier_coeff(plus, -3) == fourier_coeff(plus, 3)


def test_evenness():
    minus, plus = selberg_pair(0.25, 16)
    xs = np.linspace(0, 0.5, 101)
    for T in (minus, plus):
        assert np.allclose(trig_eval(T, xs), trig_eval(T, -xs), atol=1e-12)


def test_constant_polynomial():
    T = TrigPoly(1, 0.3, "plus", (0.3, 0.0))
    for x in (0.0, 0.2, 0.9):
        assert trig_eval(T, x) == pytest.approx(0.3)


def test_domain_errors():
    with pytest.raises(ValueError):
        selberg_pair(0.0, 8)
    with pytest.raises(ValueError):
        selberg_pair(1.0, 8)
    with pytest.raises(ValueError):
        selberg_pair(0.3, 0)


def test_sandwich_dense_grid():
    for K in (8, 64):
        for beta in (0.1, 0.25, 0.4):
            minus, plus = selberg_pair(beta, K)
            xs = np.arange(10000) / 10000
            ind = indicator(beta, xs)
            assert np.max(ind - trig_eval(plus, xs)) <= 1e-10
            assert np.max(trig_eval(minus, xs) - ind) <= 1e-10


def test_grid_refinement_stable():
    minus, plus = selberg_pair(0.25, 64)
    d3 = bs_diagnostics((minus, plus), 1000, q=3)
    d4 = bs_diagnostics((minus, plus), 10000, q=3)
    assert d4.sandwich_violation <= d3.sandwich_violation + 1e-10


def test_diagnostics_bounds():
    d = bs_diagnostics(selberg_pair(0.25, 64), 10000, q=3)
    assert d.log_checks_apply
    assert d.sandwich_violation <= 1e-10
    assert d.even_coeff_sum <= 10
    assert d.log_identity_dev <= 10
    assert d.max_coeff_n <= 10
    assert d.prime_sum_dev <= 10
    assert d.c0_error_minus <= 1e-15 and d.c0_error_plus <= 1e-15


def test_small_k_beta_flagged():
    d = bs_diagnostics(selberg_pair(0.1, 8), 1000, q=3)
    assert not d.log_checks_apply  # K beta = 0.8 <= 1


def test_coefficient_decay_bound():
    # |c(n)| <= 1/(K+1) + min(beta, pi/n)
    for K, beta in ((16, 0.25), (64, 0.1)):
        minus, plus = selberg_pair(beta, K)
        for T in (minus, plus):
            for n in range(1, K + 1):
                bound = 1 / (K + 1) + min(beta, math.pi / n)
                assert abs(T.coeffs[n]) <= bound + 1e-12
