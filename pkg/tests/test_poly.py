import itertools

import pytest

from zzlab.field import FiniteField
from zzlab.poly import (INFINITY, Place, add, deg, eval_poly, gcd,
                        irreducibles, is_irreducible, mul, mulmod,
                        place_count, places_up_to, poly_str, powmod)


def test_product_example(F3):
    # (x+1)(x+2) = x^2 + 2 over F_3
    assert mul(F3, (1, 1), (2, 1)) == (2, 0, 1)


def test_powmod_example(F3):
    # x = -1 = 2 mod (x+1)
    assert powmod(F3, (0, 1), 1, (1, 1)) == (2,)


def test_gcd_example(F3):
    assert gcd(F3, (1, 0, 1), (0, 1)) == (1,)


def test_is_irreducible_examples(F3):
    assert is_irreducible(F3, (1, 0, 1))          # x^2 + 1
    assert not is_irreducible(F3, (2, 0, 1))      # (x+1)(x+2)
    assert is_irreducible(F3, (0, 1))             # x
    with pytest.raises(ValueError):
        is_irreducible(F3, (1,))


def _trial_division_irreducible(F, f):
    from zzlab.poly import polymod
    for d in range(1, deg(f)):
        for low in itertools.product(range(F.q), repeat=d):
            g = low + (1,)
            if not polymod(F, f, g):
                return False
    return True


@pytest.mark.parametrize("q", [2, 3, 5])
def test_irreducible_vs_trial_division(q):
    F = FiniteField(q)
    for n in range(1, 5):
        for low in itertools.product(range(q), repeat=n):
            f = low + (1,)
            assert is_irreducible(F, f) == _trial_division_irreducible(F, f)


def test_place_count_examples():
    assert place_count(3, 1) == 3
    assert place_count(3, 2) == 3
    assert place_count(3, 4) == 18
    assert place_count(3, 4) == (81 - 9) // 4
    with pytest.raises(ValueError):
        place_count(3, 0)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_roots_of_frobenius_identity(q):
    # sum over d | n of d * place_count(d) = q^n  (roots of x^(q^n) - x)
    for n in range(1, 13):
        total = sum(d * place_count(q, d) for d in range(1, n + 1) if n % d == 0)
        assert total == q**n


def test_irreducibles_match_predicate(F3, F5):
    for F in (F3, F5):
        for n in (1, 2, 3, 4):
            got = irreducibles(F, n)
            assert len(got) == place_count(F.q, n)
            assert all(is_irreducible(F, f) for f in got)
            assert got == sorted(got, key=lambda f: tuple(f[:-1]))


def test_places_up_to(F3):
    p1 = places_up_to(F3, 1)
    assert [str(p) for p in p1] == ["x", "x+1", "x+2", "inf"]
    p2 = places_up_to(F3, 2)
    assert len(p2) == 4 + 3
    assert len(places_up_to(FiniteField(2), 1)) == 3
    for D in (1, 2, 3):
        assert len(places_up_to(F3, D)) == 1 + sum(
            place_count(3, n) for n in range(1, D + 1))
    with pytest.raises(ValueError):
        places_up_to(F3, 0)


def test_eval_and_divmod(F3):
    f = (2, 0, 1)  # x^2 + 2
    assert eval_poly(F3, f, 1) == 0
    assert mulmod(F3, (1, 1), (2, 1), f) == add(F3, (0,), ())  # (x+1)(x+2) = f


def test_place_ordering_and_str(F3):
    assert INFINITY.at_infinity and INFINITY.degree == 1
    assert str(Place.finite((2, 0, 1))) == "x^2+2"
    assert poly_str((0, 2, 1)) == "x^2+2x"


def test_zero_modulus_errors(F3):
    with pytest.raises(ZeroDivisionError):
        mulmod(F3, (1,), (1,), ())
    with pytest.raises(ZeroDivisionError):
        powmod(F3, (0, 1), 3, ())
