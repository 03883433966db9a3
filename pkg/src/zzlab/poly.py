"""Dense polynomial arithmetic over F_q and the places of F_q(x).

Polynomials are tuples of element codes, constant term first, with no
trailing zeros (the zero polynomial is the empty tuple).  A place of the
rational function field is either a monic irreducible polynomial or the
degree-one place at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .field import FiniteField, factorize

Poly = tuple  # tuple of int element codes, c0 first


def normalize(c) -> Poly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def deg(a: Poly) -> int:
    return len(a) - 1


def add(F: FiniteField, a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out[i] = F.add(x, y)
    return normalize(out)


def neg(F: FiniteField, a: Poly) -> Poly:
    return tuple(F.neg(x) for x in a)


def sub(F: FiniteField, a: Poly, b: Poly) -> Poly:
    return add(F, a, neg(F, b))


def mul(F: FiniteField, a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = F.add(out[i + j], F.mul(ai, bj))
    return normalize(out)


def scale(F: FiniteField, a: Poly, s: int) -> Poly:
    return normalize([F.mul(x, s) for x in a])


def divmod_poly(F: FiniteField, a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    binv = F.inv(b[-1])
    for k in range(len(a) - len(b), -1, -1):
        if len(r) <= k + len(b) - 1:
            continue
        t = F.mul(r[k + len(b) - 1], binv)
        if t:
            q[k] = t
            for j in range(len(b)):
                r[k + j] = F.sub(r[k + j], F.mul(t, b[j]))
    return normalize(q), normalize(r)


def polymod(F: FiniteField, a: Poly, b: Poly) -> Poly:
    return divmod_poly(F, a, b)[1]


def mulmod(F: FiniteField, a: Poly, b: Poly, m: Poly) -> Poly:
    if not m:
        raise ZeroDivisionError("zero modulus")
    return polymod(F, mul(F, a, b), m)


def powmod(F: FiniteField, a: Poly, k: int, m: Poly) -> Poly:
    if not m:
        raise ZeroDivisionError("zero modulus")
    if k < 0:
        raise ValueError("negative exponent")
    r: Poly = (1,)
    base = polymod(F, a, m)
    while k:
        if k & 1:
            r = mulmod(F, r, base, m)
        base = mulmod(F, base, base, m)
        k >>= 1
    return r


def gcd(F: FiniteField, a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, polymod(F, a, b)
    if a:
        a = scale(F, a, F.inv(a[-1]))
    return a


def eval_poly(F: FiniteField, a: Poly, x: int) -> int:
    r = 0
    for c in reversed(a):
        r = F.add(F.mul(r, x), c)
    return r


def monic(F: FiniteField, a: Poly) -> Poly:
    if not a:
        return a
    return scale(F, a, F.inv(a[-1]))


def is_irreducible(F: FiniteField, f: Poly) -> bool:
    """x^(q^i) gcd criterion; degree must be >= 1."""
    n = deg(f)
    if n < 1:
        raise ValueError("irreducibility undefined for constants")
    if n == 1:
        return True
    x: Poly = (0, 1)
    xq = x
    for _ in range(n):
        xq = powmod(F, xq, F.q, f)
    if xq != polymod(F, x, f):
        return False
    for r in factorize(n):
        w = x
        for _ in range(n // r):
            w = powmod(F, w, F.q, f)
        if deg(gcd(F, sub(F, w, x), f)) > 0:
            return False
    return True


# -- places ---------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Place:
    """A place of F_q(x): a monic irreducible, or infinity (poly None)."""

    degree: int
    at_infinity: bool
    poly: Poly | None

    @staticmethod
    def finite(f: Poly) -> "Place":
        return Place(deg(f), False, f)

    @staticmethod
    def infinity() -> "Place":
        return Place(1, True, None)

    def norm(self, q: int) -> int:
        return q**self.degree

    def __str__(self):
        return "inf" if self.at_infinity else poly_str(self.poly)


INFINITY = Place.infinity()


def poly_str(a: Poly | None) -> str:
    if a is None:
        return "inf"
    if not a:
        return "0"
    parts = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if c == 0:
            continue
        if i == 0:
            parts.append(str(c))
        else:
            xs = "x" if i == 1 else f"x^{i}"
            parts.append(xs if c == 1 else f"{c}{xs}")
    return "+".join(parts)


def moebius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def place_count(q: int, n: int) -> int:
    """Number of monic irreducibles of degree n over F_q (Moebius formula)."""
    if n <= 0:
        raise ValueError("degree must be positive")
    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            total += moebius(d) * q ** (n // d)
    return total // n


def monic_codes(q: int, n: int) -> np.ndarray:
    """Codes 0..q^n-1 for monic degree-n polynomials, constant-term-major lex."""
    return np.arange(q**n, dtype=np.int64)


def code_digits(codes: np.ndarray, q: int, n: int) -> np.ndarray:
    """Lower coefficients (codes, n): column i is c_i, c_0 lex-major."""
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty(codes.shape + (n,), dtype=np.int64)
    for i in range(n):
        out[..., i] = (codes // q ** (n - 1 - i)) % q
    return out


def digits_code(digits: np.ndarray, q: int) -> np.ndarray:
    n = digits.shape[-1]
    pows = np.array([q ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    return digits @ pows


@lru_cache(maxsize=None)
def _irreducible_codes_cached(q: int, n: int) -> np.ndarray:
    F = FiniteField(q)
    if n == 1:
        return np.arange(q, dtype=np.int64)
    if F.e > 1:
        # small general-field fallback: direct tests
        codes = []
        for c in range(q**n):
            coeffs = tuple(int(x) for x in code_digits(np.int64(c), q, n)) + (1,)
            if is_irreducible(F, normalize(coeffs)):
                codes.append(c)
        return np.array(codes, dtype=np.int64)
    # sieve: a reducible monic of degree n has an irreducible factor of
    # degree <= n/2; mark all products P * (monic of degree n - deg P)
    composite = np.zeros(q**n, dtype=bool)
    for dp in range(1, n // 2 + 1):
        pc = irreducible_coeffs(q, dp)           # (Np, dp) lower coeffs
        m = n - dp
        mc = code_digits(monic_codes(q, m), q, m)  # (L, m) lower coeffs
        L = mc.shape[0]
        pf = np.concatenate([pc, np.ones((pc.shape[0], 1), dtype=np.int64)], axis=1)
        mf = np.concatenate([mc, np.ones((L, 1), dtype=np.int64)], axis=1)
        for row in pf:
            prod = np.zeros((L, n + 1), dtype=np.int64)
            for i in range(dp + 1):
                if row[i]:
                    prod[:, i:i + m + 1] += row[i] * mf
            prod %= q
            composite[digits_code(prod[:, :n], q)] = True
    return np.nonzero(~composite)[0].astype(np.int64)


def irreducible_coeffs(q: int, n: int) -> np.ndarray:
    """Lower coefficients (count, n) of all monic irreducibles of degree n."""
    codes = _irreducible_codes_cached(q, n)
    return code_digits(codes, q, n)


def irreducibles(F: FiniteField, n: int) -> list[Poly]:
    rows = irreducible_coeffs(F.q, n)
    return [normalize(tuple(int(x) for x in row) + (1,)) for row in rows]


def places_up_to(F: FiniteField, D: int) -> list[Place]:
    """All places of degree <= D, finite ones sorted by (degree, lex), then
    infinity appended among degree 1."""
    if D < 1:
        raise ValueError("D must be >= 1")
    out: list[Place] = []
    for n in range(1, D + 1):
        for f in irreducibles(F, n):
            out.append(Place.finite(f))
        if n == 1:
            out.append(INFINITY)
    return out
