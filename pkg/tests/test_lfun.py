import numpy as np
import pytest

from zzlab.family import (enumerate_members, is_constant_type, make_member,
                          sample_members, twist_conductor_degree)
from zzlab.groups import conjugate_representatives, dual_group
from zzlab.lfun import (ConstantTypeTwist, MemberKernel, NonGeometricMember,
                        angles, explicit_formula_check, genus_from_twists,
                        genus_of_member, genus_riemann_hurwitz, l_polynomial,
                        l_polynomial_euler, power_sums_from_coeffs)
from zzlab.poly import Place, irreducibles


def _rho(spec, idx=1):
    return dual_group(spec.group)[idx]


def _circular_match(ta, tb, tol=1e-8):
    ta, tb = np.sort(ta), np.sort(tb)
    if len(ta) != len(tb):
        return False
    d = np.abs(ta - tb)
    return np.all(np.minimum(d, 1 - d) < tol)


def test_degree_zero_example(spec_q3_z2):
    x, x1 = Place.finite((0, 1)), Place.finite((1, 1))
    m = make_member(spec_q3_z2, {x: (1,), x1: (1,)}, (0,), (0,))
    L = l_polynomial(m, _rho(spec_q3_z2))
    assert L.degree == 0
    assert len(angles(L)) == 0


def test_two_quadratics_example(spec_q3_z2):
    quads = irreducibles(spec_q3_z2.field, 2)
    m = make_member(spec_q3_z2, {Place.finite(quads[0]): (1,),
                                 Place.finite(quads[1]): (1,)}, (0,), (0,))
    L = l_polynomial(m, _rho(spec_q3_z2))
    assert L.degree == 2
    a = angles(L)
    assert a.rh_residual <= 1e-10


def test_pure_quadratic_angle_values(spec_q3_z2):
    # any L of the form 1 + 3 u^2 has angles exactly +-1/4
    m = None
    rho = _rho(spec_q3_z2)
    for cand in enumerate_members(spec_q3_z2, 4):
        try:
            L = l_polynomial(cand, rho)
        except ConstantTypeTwist:
            continue
        if L.degree == 2 and L.coeffs[1].is_zero() and L.coeffs[2] == 3:
            m = cand
            break
    assert m is not None, "no member with L = 1 + 3u^2 at d = 4"
    ts = angles(l_polynomial(m, rho)).thetas
    assert _circular_match(ts, np.array([-0.25, 0.25]))


def test_degree_law(spec_q3_z2):
    rho = _rho(spec_q3_z2)
    for d in (2, 4, 6):
        for m in enumerate_members(spec_q3_z2, d)[:200]:
            if is_constant_type(m, rho):
                continue
            L = l_polynomial(m, rho)
            assert L.degree == twist_conductor_degree(m, rho) - 2
            assert not L.coeffs[-1].is_zero()


def test_routes_agree(spec_q3_z2, spec_q5_z4, spec_q7_z3):
    # character-sum, functional-equation, and Euler-product routes all match
    for spec, d in ((spec_q3_z2, 6), (spec_q5_z4, 5), (spec_q7_z3, 4)):
        for m in sample_members(spec, d, 4, seed=13):
            for rho in conjugate_representatives(spec.group):
                if is_constant_type(m, rho):
                    continue
                L1 = l_polynomial(m, rho, use_functional_equation=False)
                L2 = l_polynomial(m, rho, use_functional_equation=True)
                L3 = l_polynomial_euler(m, rho)
                assert [c.c for c in L1.coeffs] == [c.c for c in L2.coeffs]
                assert [c.c for c in L1.coeffs] == [c.c for c in L3.coeffs]


def test_leading_coefficient_magnitude(spec_q5_z4):
    for m in sample_members(spec_q5_z4, 7, 6, seed=3):
        for rho in conjugate_representatives(spec_q5_z4.group):
            if is_constant_type(m, rho):
                continue
            L = l_polynomial(m, rho)
            if L.degree:
                lead = abs(L.coeffs[-1].render())
                assert lead == pytest.approx(5 ** (L.degree / 2), rel=1e-8)


def test_conjugate_angles(spec_q7_z3):
    rho = _rho(spec_q7_z3, 1)
    rho_inv = _rho(spec_q7_z3, 2)
    for m in sample_members(spec_q7_z3, 5, 5, seed=21):
        if is_constant_type(m, rho):
            continue
        ta = angles(l_polynomial(m, rho)).thetas
        tb = angles(l_polynomial(m, rho_inv)).thetas
        folded = (-tb + 0.5) % 1.0 - 0.5
        assert _circular_match(ta, folded)


def test_explicit_formula_example(spec_q3_z2):
    x, x1 = Place.finite((0, 1)), Place.finite((1, 1))
    m = make_member(spec_q3_z2, {x: (1,), x1: (1,)}, (0,), (0,))
    c = explicit_formula_check(m, _rho(spec_q3_z2), 1)
    assert c.lhs == 0
    assert abs(c.rhs) < 1e-12


def test_explicit_formula_sweep(spec_q5_z4):
    for m in sample_members(spec_q5_z4, 8, 3, seed=5):
        kernel = MemberKernel(m)
        for rho in conjugate_representatives(spec_q5_z4.group):
            if is_constant_type(m, rho):
                continue
            L = l_polynomial(m, rho, kernel=kernel)
            aset = angles(L)
            for n in range(1, 2 * L.degree + 5):
                c = explicit_formula_check(m, rho, n, angle_set=aset, L=L,
                                           kernel=kernel)
                assert c.residual <= 1e-6, (n, c.residual)
            cp = explicit_formula_check(m, rho, 2, angle_set=aset, L=L,
                                        kernel=kernel)
            cn = explicit_formula_check(m, rho, -2, angle_set=aset, L=L,
                                        kernel=kernel)
            assert cp.lhs == pytest.approx(cn.lhs.conjugate())
            assert cp.rhs == pytest.approx(cn.rhs.conjugate())


def test_explicit_formula_n_zero_rejected(spec_q3_z2):
    m = enumerate_members(spec_q3_z2, 2)[0]
    with pytest.raises(ValueError):
        explicit_formula_check(m, _rho(spec_q3_z2), 0)


def test_power_sums_match_roots(spec_q3_z2):
    rho = _rho(spec_q3_z2)
    for m in enumerate_members(spec_q3_z2, 6)[:20]:
        if is_constant_type(m, rho):
            continue
        L = l_polynomial(m, rho)
        if L.degree == 0:
            continue
        c = L.complex_coeffs()[::-1]
        roots = np.roots(c)
        gammas = 1 / roots
        ps = power_sums_from_coeffs(L, 6)
        for n in range(1, 7):
            assert ps[n - 1].render() == pytest.approx(
                complex(np.sum(gammas**n)), abs=1e-6)


def test_genus_examples(spec_q3_z2):
    x, x1 = Place.finite((0, 1)), Place.finite((1, 1))
    m = make_member(spec_q3_z2, {x: (1,), x1: (1,)}, (0,), (0,))
    assert genus_of_member(m) == 0
    quads = irreducibles(spec_q3_z2.field, 2)
    m2 = make_member(spec_q3_z2, {Place.finite(quads[0]): (1,),
                                  Place.finite(quads[1]): (1,)}, (0,), (0,))
    assert genus_of_member(m2) == 1
    triv = make_member(spec_q3_z2, {}, (0,), (0,))
    with pytest.raises(NonGeometricMember):
        genus_of_member(triv)


def test_genus_agreement(spec_q5_z22):
    for m in enumerate_members(spec_q5_z22, 3):
        try:
            g1 = genus_from_twists(m)
        except NonGeometricMember:
            continue
        assert g1 == genus_riemann_hurwitz(m)


def test_constant_type_raises(spec_q3_z2):
    m = make_member(spec_q3_z2, {}, (0,), (1,))  # constant-field member
    with pytest.raises(ConstantTypeTwist):
        l_polynomial(m, _rho(spec_q3_z2))
    with pytest.raises(ValueError):
        l_polynomial(m, dual_group(spec_q3_z2.group)[0])  # trivial character


def test_serialization(spec_q3_z2):
    quads = irreducibles(spec_q3_z2.field, 2)
    m = make_member(spec_q3_z2, {Place.finite(quads[0]): (1,),
                                 Place.finite(quads[1]): (1,)}, (0,), (0,))
    L = l_polynomial(m, _rho(spec_q3_z2))
    rec = L.to_record()
    assert rec["degree"] == 2 and rec["coeff_vectors"][0] == [1]
    arec = angles(L).to_record()
    assert len(arec["thetas"]) == 2


def test_extension_field_route():
    """Prime-power base field exercises the scalar character-sum path."""
    from zzlab import FamilySpec, FiniteField, GroupSpec, enumerate_members
    spec = FamilySpec(FiniteField(4), GroupSpec((3,)))
    rho = _rho(spec)
    found = 0
    for m in enumerate_members(spec, 2):
        if is_constant_type(m, rho):
            continue
        L = l_polynomial(m, rho)
        Le = l_polynomial_euler(m, rho)
        assert [c.c for c in L.coeffs] == [c.c for c in Le.coeffs]
        a = angles(L)
        assert a.rh_residual <= 1e-8
        c = explicit_formula_check(m, rho, 3, angle_set=a, L=L)
        assert c.residual <= 1e-6 and c.source == "coeff-recursion"
        found += 1
        if found >= 4:
            break
    assert found


def test_scalar_vs_batched_dirichlet_sums(spec_q5_z4):
    from zzlab.lfun import _scalar_dirichlet_sum
    for m in sample_members(spec_q5_z4, 6, 3, seed=8):
        kernel = MemberKernel(m)
        for rho in conjugate_representatives(spec_q5_z4.group):
            for j in range(0, 4):
                assert kernel.dirichlet_sum(rho, j) == \
                    _scalar_dirichlet_sum(m, rho, j)
