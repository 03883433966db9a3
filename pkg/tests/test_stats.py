import math

import numpy as np
import pytest

from zzlab.bspoly import selberg_pair, trig_eval
from zzlab.family import (enumerate_members, frobenius_value, make_member,
                          sample_members)
from zzlab.groups import conjugate_representatives, dual_group
from zzlab.lfun import MemberKernel, angles, l_polynomial
from zzlab.poly import Place, places_up_to
from zzlab.stats import (bs_degree_schedule, clt_report,
                         decomposition_residual, delta_statistic,
                         ensemble_moments, mean_density_report, n_interval,
                         run_ensemble, smooth_count_identity, t_statistic,
                         t_moment_reference)


def _rho(spec):
    return dual_group(spec.group)[1]


def test_n_interval_examples():
    assert n_interval(np.array([-0.25, 0.25]), 0.6)[0] == 2
    assert n_interval(np.array([]), 0.3)[0] == 0
    count, ties = n_interval(np.array([-0.25, 0.25]), 0.5)
    assert count == 2 and ties == 2          # closed endpoints
    with pytest.raises(ValueError):
        n_interval(np.array([0.1]), 0.0)


def test_bs_degree_schedule():
    assert bs_degree_schedule(14) == 5
    assert bs_degree_schedule(16) == 6
    assert bs_degree_schedule(1) == 4        # clipped low
    assert bs_degree_schedule(10**6) == 256  # clipped high


def test_t_statistic_hand_sum(spec_q3_z2):
    """T for the conductor-2 member, summed by hand over places."""
    x, x1 = Place.finite((0, 1)), Place.finite((1, 1))
    m = make_member(spec_q3_z2, {x: (1,), x1: (1,)}, (0,), (0,))
    rho = _rho(spec_q3_z2)
    minus, plus = selberg_pair(0.25, 4)
    for bs in (minus, plus):
        expected = 0.0
        for v in places_up_to(spec_q3_z2.field, 4):
            val = frobenius_value(m, rho, v)
            if val is None:
                continue
            c = bs.coeffs[v.degree] if v.degree <= bs.degree else 0.0
            expected += -c * v.degree * 3 ** (-v.degree / 2) \
                * 2 * val.render().real
        got = t_statistic(m, rho, bs)
        assert got == pytest.approx(expected, abs=1e-10)


def test_t_zero_when_everything_ramified(spec_q5_z22):
    # all degree <= l places ramified never happens here, but a constant
    # kernel twist makes every unramified value 1: T is then deterministic
    x, x1 = Place.finite((0, 1)), Place.finite((1, 1))
    m = make_member(spec_q5_z22, {x: (1, 0), x1: (1, 0)}, (0, 0), (0, 0))
    rho = [r for r in dual_group(spec_q5_z22.group)
           if r.exponents == (1, 0)][0]
    minus, _ = selberg_pair(0.25, 4)
    got = t_statistic(m, rho, minus)
    assert isinstance(got, float)


def test_delta_statistic_real(spec_q3_z2):
    m = enumerate_members(spec_q3_z2, 4)[5]
    rho = _rho(spec_q3_z2)
    minus, plus = selberg_pair(0.25, 6)
    for bs in (minus, plus):
        d = delta_statistic(m, rho, bs)
        assert isinstance(d, float)


def test_trivial_character_rejected(spec_q3_z2):
    m = enumerate_members(spec_q3_z2, 2)[0]
    minus, _ = selberg_pair(0.25, 4)
    with pytest.raises(ValueError):
        t_statistic(m, dual_group(spec_q3_z2.group)[0], minus)


def test_two_way_identity_and_decomposition(spec_q3_z2):
    rho = _rho(spec_q3_z2)
    minus, plus = selberg_pair(0.25, 5)
    for m in enumerate_members(spec_q3_z2, 6)[:80]:
        kernel = MemberKernel(m)
        L = l_polynomial(m, rho, kernel=kernel)
        aset = angles(L)
        for bs in (minus, plus):
            a, b = smooth_count_identity(m, rho, bs, aset, L, kernel)
            assert abs(a - b) <= 1e-6
            assert decomposition_residual(m, rho, bs, aset, L, kernel) <= 1e-6


def test_sandwich_per_member(spec_q3_z2):
    rho = _rho(spec_q3_z2)
    beta = 0.25
    minus, plus = selberg_pair(beta, 5)
    for m in enumerate_members(spec_q3_z2, 6)[:80]:
        L = l_polynomial(m, rho)
        aset = angles(L)
        n, _ = n_interval(aset.thetas, beta)
        lo = math.fsum(trig_eval(minus, t) for t in aset.thetas)
        hi = math.fsum(trig_eval(plus, t) for t in aset.thetas)
        assert lo - 1e-9 <= n <= hi + 1e-9


def test_ensemble_determinism(spec_q3_z2):
    reps = conjugate_representatives(spec_q3_z2.group)
    ms = sample_members(spec_q3_z2, 8, 12, seed=9)
    r1 = run_ensemble(ms, reps, 0.25, conductor_degree=8)
    r2 = run_ensemble(ms, reps, 0.25, conductor_degree=8)
    assert [vars(a) for a in r1.rows] == [vars(b) for b in r2.rows]


def test_moment_reference_values():
    # r = 2, order-2 character: 2 log(l beta) / pi^2
    assert t_moment_reference(2, 2, 8, 0.5) == pytest.approx(
        2 * math.log(4) / math.pi**2)
    # odd moments vanish
    assert t_moment_reference(2, 3, 8, 0.5) == 0.0
    assert t_moment_reference(1, 3, 8, 0.5) == 0.0
    # r = 4: w^2 * 4! / (4 pi^4 2!) log^2
    assert t_moment_reference(1, 4, 8, 0.5) == pytest.approx(
        24 / (4 * math.pi**4 * 2) * math.log(4) ** 2)


def test_ensemble_reports(spec_q3_z2):
    reps = conjugate_representatives(spec_q3_z2.group)
    ms = sample_members(spec_q3_z2, 10, 50, seed=4)
    res = run_ensemble(ms, reps, 0.25, conductor_degree=10)
    rep = clt_report(res, "per-rho")
    assert rep["per_rho"][0]["n"] == 50
    assert "quantiles" in rep["per_rho"][0]
    tot = clt_report(res, "total")
    assert tot["total"]["variance_constant"] == pytest.approx(2 / math.pi**2)
    md = mean_density_report(res)
    assert md["per_rho"][0]["n"] == 50
    mom = ensemble_moments(res, [2])
    assert mom.n_members == 50
    assert mom.empirical_delta <= 25.0
    with pytest.raises(ValueError):
        ensemble_moments(res, [2, 2])
    with pytest.raises(ValueError):
        run_ensemble(ms, reps, 0.8, conductor_degree=10)


def test_product_moment_reference(spec_q5_z22):
    reps = conjugate_representatives(spec_q5_z22.group)
    ms = sample_members(spec_q5_z22, 6, 10, seed=2)
    res = run_ensemble(ms, reps, 0.25, l=6, conductor_degree=6)
    mom = ensemble_moments(res, [2, 2, 0])
    ref_single = t_moment_reference(2, 2, 6, 0.25)
    assert mom.reference_t == pytest.approx(ref_single**2)
