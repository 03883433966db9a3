import random

import numpy as np
import pytest

from zzlab.field import FiniteField
from zzlab.poly import irreducibles, mul, normalize
from zzlab.symbols import (mulmod_batch, power_residue_symbol, powmod_batch,
                           reduce_batch, symbol_batch,
                           symbol_fixed_base_batch)


def test_symbol_examples(F3):
    x = (0, 1)
    assert power_residue_symbol(F3, (2, 1), x, 2) == 1      # x+2 at x: value -1
    assert power_residue_symbol(F3, (1,), x, 2) == 0        # 1 is a square
    assert power_residue_symbol(F3, (0, 2), x, 2) is None   # ramified
    with pytest.raises(ValueError):
        power_residue_symbol(F3, (1, 1), x, 4)              # 4 does not divide 2


def _random_poly(rng, q, d):
    return normalize(tuple(rng.randrange(q) for _ in range(d)) + (1,))


@pytest.mark.parametrize("q,n", [(3, 2), (5, 2), (5, 4), (7, 3), (7, 6), (9, 4)])
def test_multiplicativity(q, n):
    F = FiniteField(q)
    rng = random.Random(q * 100 + n)
    Qs = irreducibles(F, 2) + irreducibles(F, 3)
    for _ in range(40):
        Q = Qs[rng.randrange(len(Qs))]
        h1 = _random_poly(rng, q, rng.randrange(1, 5))
        h2 = _random_poly(rng, q, rng.randrange(1, 5))
        s1 = power_residue_symbol(F, h1, Q, n)
        s2 = power_residue_symbol(F, h2, Q, n)
        s12 = power_residue_symbol(F, mul(F, h1, h2), Q, n)
        if s1 is None or s2 is None:
            assert s12 is None
        else:
            assert s12 == (s1 + s2) % n
            # n-th powers have trivial symbol
            hp = h1
            for _ in range(n - 1):
                hp = mul(F, hp, h1)
            assert power_residue_symbol(F, hp, Q, n) == 0


@pytest.mark.parametrize("q", [5, 7])
def test_compatibility_across_orders(q):
    # for n' | n, the mu_n' value is the (n/n')-th power of the mu_n value,
    # i.e. the symbol reduces mod n'
    F = FiniteField(q)
    rng = random.Random(q)
    divisors = [n for n in range(1, q) if (q - 1) % n == 0]
    for _ in range(30):
        Q = irreducibles(F, 2)[rng.randrange(len(irreducibles(F, 2)))]
        h = _random_poly(rng, q, 3)
        for n in divisors:
            sn = power_residue_symbol(F, h, Q, n)
            if sn is None:
                continue
            for np_ in divisors:
                if n % np_ == 0:
                    assert power_residue_symbol(F, h, Q, np_) == sn % np_


@pytest.mark.parametrize("q,degQ,n", [(3, 1, 2), (3, 4, 2), (5, 3, 4), (7, 2, 6)])
def test_batch_matches_scalar(q, degQ, n):
    F = FiniteField(q)
    rng = random.Random(degQ * q)
    Q = irreducibles(F, degQ)[0]
    H = np.array([[rng.randrange(q) for _ in range(6)] for _ in range(120)],
                 dtype=np.int64)
    got = symbol_batch(F, H, Q, n)
    for i in range(120):
        want = power_residue_symbol(F, tuple(int(v) for v in H[i]), Q, n)
        assert got[i] == (-1 if want is None else want)


def test_fixed_base_batch_matches_scalar(F5):
    from zzlab.poly import irreducible_coeffs
    rng = random.Random(9)
    h = _random_poly(rng, 5, 3)
    for D in (1, 2, 3):
        Qs = irreducible_coeffs(5, D)
        got = symbol_fixed_base_batch(F5, h, Qs, 4)
        for i, row in enumerate(Qs):
            Q = tuple(int(v) for v in row) + (1,)
            want = power_residue_symbol(F5, h, Q, 4)
            assert got[i] == (-1 if want is None else want)


def test_batch_mulmod_powmod(F5):
    rng = random.Random(3)
    Q = irreducibles(F5, 4)[2]
    Qc = np.array(Q[:4], dtype=np.int64)
    from zzlab.poly import mulmod, powmod
    A = np.array([[rng.randrange(5) for _ in range(4)] for _ in range(50)],
                 dtype=np.int64)
    B = np.array([[rng.randrange(5) for _ in range(4)] for _ in range(50)],
                 dtype=np.int64)
    got = mulmod_batch(A, B, Qc, 5)
    gp = powmod_batch(A, 37, Qc, 5)
    for i in range(50):
        a = tuple(int(v) for v in A[i])
        b = tuple(int(v) for v in B[i])
        w = mulmod(F5, a, b, Q)
        w = w + (0,) * (4 - len(w))
        assert tuple(got[i]) == w
        wp = powmod(F5, a, 37, Q)
        wp = wp + (0,) * (4 - len(wp))
        assert tuple(gp[i]) == wp


def test_reduce_batch(F3):
    Q = (1, 0, 1)  # x^2 + 1
    Qc = np.array(Q[:2], dtype=np.int64)
    H = np.array([[0, 0, 1, 2]], dtype=np.int64)  # x^2 + 2x^3
    got = reduce_batch(H, Qc, 3)
    from zzlab.poly import polymod
    w = polymod(F3, (0, 0, 1, 2), Q)
    w = w + (0,) * (2 - len(w))
    assert tuple(got[0]) == w
