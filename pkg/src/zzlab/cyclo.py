"""Exact arithmetic with roots of unity and cyclotomic integers.

Values of all characters in this project live in mu_N for a single small
N, so Z[zeta_N] in the power basis modulo the N-th cyclotomic polynomial
is enough.  All coefficients are arbitrary-precision ints; complex floats
appear only through explicit render() calls.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    # exact division of integer polynomials, den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(num) - len(den), -1, -1):
        t = num[k + len(den) - 1]
        out[k] = t
        if t:
            for j in range(len(den)):
                num[k + j] -= t * den[j]
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(N: int) -> tuple:
    """Integer coefficients of Phi_N, constant term first."""
    num = [-1] + [0] * (N - 1) + [1]  # X^N - 1
    for d in range(1, N):
        if N % d == 0:
            num = _poly_div_exact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


@lru_cache(maxsize=None)
def _context(N: int):
    phi_poly = cyclotomic_polynomial(N)
    phi = len(phi_poly) - 1
    # X^a mod Phi_N for 0 <= a < N
    rows = []
    cur = [1] + [0] * (phi - 1)
    for _ in range(N):
        rows.append(tuple(cur))
        nxt = [0] + cur[:-1]
        t = cur[-1]
        if t:
            for j in range(phi):
                nxt[j] -= t * phi_poly[j]
        cur = nxt
    return phi, phi_poly, tuple(rows)


class RootOfUnity:
    """zeta_N^a, exact; multiplication is exponent addition mod N."""

    __slots__ = ("N", "a")

    def __init__(self, N: int, a: int):
        self.N = N
        self.a = a % N

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        if self.N != other.N:
            raise ValueError("mixed root orders")
        return RootOfUnity(self.N, self.a + other.a)

    def __pow__(self, k: int) -> "RootOfUnity":
        return RootOfUnity(self.N, self.a * k)

    def inv(self) -> "RootOfUnity":
        return RootOfUnity(self.N, -self.a)

    def is_one(self) -> bool:
        return self.a == 0

    def render(self) -> complex:
        return cmath.exp(2j * cmath.pi * self.a / self.N)

    def as_cyclotomic(self) -> "CyclotomicInt":
        return CyclotomicInt.from_root(self.N, self.a)

    def __eq__(self, other):
        return (isinstance(other, RootOfUnity)
                and other.N == self.N and other.a == self.a)

    def __hash__(self):
        return hash((self.N, self.a))

    def __repr__(self):
        return f"zeta_{self.N}^{self.a}"


class CyclotomicInt:
    """Element of Z[zeta_N] in the power basis mod Phi_N."""

    __slots__ = ("N", "c")

    def __init__(self, N: int, coords):
        phi = _context(N)[0]
        c = tuple(coords)
        if len(c) != phi:
            raise ValueError("coordinate length mismatch")
        self.N = N
        self.c = c

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, N: int) -> "CyclotomicInt":
        return cls(N, (0,) * _context(N)[0])

    @classmethod
    def integer(cls, N: int, n: int) -> "CyclotomicInt":
        phi = _context(N)[0]
        return cls(N, (n,) + (0,) * (phi - 1))

    @classmethod
    def from_root(cls, N: int, a: int) -> "CyclotomicInt":
        return cls(N, _context(N)[2][a % N])

    @classmethod
    def from_counts(cls, N: int, counts) -> "CyclotomicInt":
        """Sum of counts[a] * zeta_N^a over 0 <= a < N."""
        phi, _, rows = _context(N)
        out = [0] * phi
        for a, m in enumerate(counts):
            if m:
                row = rows[a % N]
                for j in range(phi):
                    out[j] += m * row[j]
        return cls(N, out)

    # -- ring operations -------------------------------------------------------

    def _check(self, other):
        if self.N != other.N:
            raise ValueError("mixed cyclotomic orders")

    def __add__(self, other):
        if isinstance(other, int):
            other = CyclotomicInt.integer(self.N, other)
        self._check(other)
        return CyclotomicInt(self.N, tuple(x + y for x, y in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicInt(self.N, tuple(-x for x in self.c))

    def __sub__(self, other):
        if isinstance(other, int):
            other = CyclotomicInt.integer(self.N, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicInt(self.N, tuple(x * other for x in self.c))
        if isinstance(other, RootOfUnity):
            return self.times_root(other.a)
        self._check(other)
        phi, phi_poly, _ = _context(self.N)
        prod = [0] * (2 * phi - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    if y:
                        prod[i + j] += x * y
        for k in range(2 * phi - 2, phi - 1, -1):
            t = prod[k]
            if t:
                prod[k] = 0
                for j in range(phi):
                    prod[k - phi + j] -= t * phi_poly[j]
        return CyclotomicInt(self.N, prod[:phi])

    __rmul__ = __mul__

    def times_root(self, a: int) -> "CyclotomicInt":
        """Multiply by zeta_N^a."""
        phi, phi_poly, _ = _context(self.N)
        a %= self.N
        prod = [0] * (phi + a)
        for i, x in enumerate(self.c):
            prod[i + a] += x
        for k in range(len(prod) - 1, phi - 1, -1):
            t = prod[k]
            if t:
                prod[k] = 0
                for j in range(phi):
                    prod[k - phi + j] -= t * phi_poly[j]
        return CyclotomicInt(self.N, prod[:phi])

    def conj(self) -> "CyclotomicInt":
        """Complex conjugation (zeta -> zeta^-1)."""
        phi, _, rows = _context(self.N)
        out = [0] * phi
        for j, x in enumerate(self.c):
            if x:
                row = rows[(-j) % self.N]
                for i in range(phi):
                    out[i] += x * row[i]
        return CyclotomicInt(self.N, out)

    # -- queries ----------------------------------------------------------------

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.c)

    def rational_part(self) -> int:
        if any(self.c[1:]):
            raise ValueError(f"not a rational integer: {self}")
        return self.c[0]

    def render(self) -> complex:
        return sum(x * cmath.exp(2j * cmath.pi * j / self.N)
                   for j, x in enumerate(self.c) if x)

    def __eq__(self, other):
        if isinstance(other, int):
            return not any(self.c[1:]) and self.c[0] == other
        return (isinstance(other, CyclotomicInt)
                and other.N == self.N and other.c == self.c)

    def __hash__(self):
        return hash((self.N, self.c))

    def __repr__(self):
        return f"Cyc{self.N}{list(self.c)}"


def solve_divide(a: CyclotomicInt, b: CyclotomicInt) -> list[Fraction]:
    """Coordinates of a/b in Q(zeta_N); raises if b = 0."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero cyclotomic")
    N = a.N
    phi = _context(N)[0]
    # columns of the multiplication-by-b matrix in the power basis
    M = []
    for j in range(phi):
        bx = CyclotomicInt(N, tuple(1 if i == j else 0 for i in range(phi))) * b
        M.append([Fraction(x) for x in bx.c])
    # solve M^T x = a  (column j of the system is M[j])
    n = phi
    A = [[M[j][i] for j in range(n)] + [Fraction(a.c[i])] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        A[col] = [x / pv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[i][n] for i in range(n)]


def divide_exact(a: CyclotomicInt, b: CyclotomicInt) -> CyclotomicInt:
    """a/b when it lies in Z[zeta_N]; raises ArithmeticError otherwise."""
    x = solve_divide(a, b)
    if any(f.denominator != 1 for f in x):
        raise ArithmeticError("quotient is not integral")
    return CyclotomicInt(a.N, tuple(int(f) for f in x))
