"""Arithmetic in the small finite fields F_q, q = p^e.

Elements are plain ints in 0..q-1.  For prime q the int is the residue
itself; for prime powers it encodes the coefficient vector of
F_p[t]/(m(t)) in base p.  A fixed multiplicative generator ``gamma`` is
chosen once per field; every root-of-unity computation downstream is
bookkeeping relative to this generator, so it must never change between
runs (it is chosen deterministically).
"""

from __future__ import annotations

import numpy as np

MAX_Q = 1 << 20


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (n is small here)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


def _prime_poly_mulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    # dense schoolbook product mod monic m, all over F_p; bootstrap only
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    e = len(m) - 1
    for k in range(len(prod) - 1, e - 1, -1):
        t = prod[k]
        if t:
            prod[k] = 0
            for j in range(e):
                prod[k - e + j] = (prod[k - e + j] - t * m[j]) % p
    prod = prod[:e]
    return prod + [0] * (e - len(prod))


def _find_irreducible(p: int, e: int) -> list[int]:
    """Lexicographically first monic irreducible of degree e over F_p.

    Uses the x^(p^i) - x gcd criterion, with arithmetic done inline so the
    field can be built before any polynomial module exists.
    """

    def powx(i: int, m: list[int]) -> list[int]:
        # x^(p^i) mod m by repeated Frobenius
        r = [0, 1] + [0] * (e - 2) if e > 1 else [0]
        r = r[:e]
        for _ in range(i):
            acc = [1] + [0] * (e - 1)
            base = r
            k = p
            while k:
                if k & 1:
                    acc = _prime_poly_mulmod(acc, base, m, p)
                base = _prime_poly_mulmod(base, base, m, p)
                k >>= 1
            r = acc
        return r

    def gcd_deg(a: list[int], m: list[int]) -> int:
        # degree of gcd(a(x), m(x)) over F_p
        u = [c % p for c in m]
        v = list(a)

        def deg(c):
            d = len(c) - 1
            while d >= 0 and c[d] == 0:
                d -= 1
            return d

        while deg(v) >= 0:
            dv, du = deg(v), deg(u)
            if du < dv:
                u, v = v, u
                continue
            lead = u[deg(u)] * pow(v[deg(v)], p - 2, p) % p
            shift = deg(u) - deg(v)
            for j in range(deg(v) + 1):
                u[j + shift] = (u[j + shift] - lead * v[j]) % p
        return deg(u)

    for code in range(p**e):
        m = [(code // p**i) % p for i in range(e)] + [1]
        # irreducible iff x^(p^e) = x mod m and gcd(x^(p^(e/r)) - x, m) = 1
        xpe = powx(e, m)
        if xpe != ([0, 1] + [0] * (e - 2))[:e]:
            continue
        ok = True
        for r in factorize(e):
            w = powx(e // r, m)
            w = list(w)
            w[1] = (w[1] - 1) % p
            if gcd_deg(w, m) > 0:
                ok = False
                break
        if ok:
            return m
    raise RuntimeError(f"no irreducible of degree {e} over F_{p}")


class FiniteField:
    """F_q with a fixed generator and log/antilog tables.

    Attributes
    ----------
    q, p, e : field size, characteristic, extension degree
    gamma   : code of the fixed multiplicative generator
    exp     : ndarray, exp[k] = gamma^k for 0 <= k < q-1
    log     : ndarray, log[exp[k]] = k (log[0] = -1)
    """

    def __init__(self, q: int):
        if q < 2 or q > MAX_Q:
            raise ValueError(f"field size {q} outside [2, {MAX_Q}]")
        fac = factorize(q)
        if len(fac) != 1:
            raise ValueError(f"{q} is not a prime power")
        (self.p, self.e), = fac.items()
        self.q = q
        if self.e == 1:
            self.modulus = None
            self._pows = None
        else:
            self.modulus = _find_irreducible(self.p, self.e)
            self._pows = np.array([self.p**i for i in range(self.e)], dtype=np.int64)
        self.gamma = self._find_generator()
        self._build_tables()

    # -- construction helpers -------------------------------------------------

    def _mul_raw(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        da = [(a // self.p**i) % self.p for i in range(self.e)]
        db = [(b // self.p**i) % self.p for i in range(self.e)]
        dc = _prime_poly_mulmod(da, db, self.modulus, self.p)
        return sum(c * self.p**i for i, c in enumerate(dc))

    def _pow_raw(self, a: int, k: int) -> int:
        r, base = 1, a
        while k:
            if k & 1:
                r = self._mul_raw(r, base)
            base = self._mul_raw(base, base)
            k >>= 1
        return r

    def _find_generator(self) -> int:
        primes = list(factorize(self.q - 1))
        for g in range(1, self.q):
            if all(self._pow_raw(g, (self.q - 1) // r) != 1 for r in primes):
                return g
        raise RuntimeError("no generator found")

    def _build_tables(self):
        exp = np.empty(self.q - 1, dtype=np.int64)
        log = np.full(self.q, -1, dtype=np.int64)
        x = 1
        for k in range(self.q - 1):
            exp[k] = x
            log[x] = k
            x = self._mul_raw(x, self.gamma)
        if x != 1:
            raise RuntimeError("generator order mismatch")
        self.exp = exp
        self.log = log

    # -- scalar arithmetic -----------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        s = (self._digits(a) + self._digits(b)) % self.p
        return int(s @ self._pows)

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        d = (-self._digits(a)) % self.p
        return int(d @ self._pows)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[(self.log[a] + self.log[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return int(self.exp[(-self.log[a]) % (self.q - 1)])

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("negative power of 0")
            return 0 if k else 1
        return int(self.exp[(self.log[a] * k) % (self.q - 1)])

    def dlog(self, a: int) -> int:
        """k with gamma^k = a; raises on a = 0."""
        if a == 0:
            raise ZeroDivisionError("dlog of 0")
        return int(self.log[a])

    def _digits(self, a: int) -> np.ndarray:
        return (a // self._pows) % self.p

    # -- batched arithmetic (numpy arrays of element codes) --------------------

    def add_vec(self, a: np.ndarray, b) -> np.ndarray:
        if self.e == 1:
            return (a + b) % self.p
        da = (a[..., None] // self._pows) % self.p
        db = (np.asarray(b)[..., None] // self._pows) % self.p
        return ((da + db) % self.p) @ self._pows

    def mul_vec(self, a: np.ndarray, b) -> np.ndarray:
        if self.e == 1:
            return (a * b) % self.p
        a = np.asarray(a)
        b = np.broadcast_to(np.asarray(b), a.shape)
        out = np.zeros(a.shape, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        out[nz] = self.exp[(self.log[a[nz]] + self.log[b[nz]]) % (self.q - 1)]
        return out

    def neg_vec(self, a: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return (-a) % self.p
        da = (np.asarray(a)[..., None] // self._pows) % self.p
        return ((-da) % self.p) @ self._pows

    def __repr__(self):
        return f"FiniteField(q={self.q}, gamma={self.gamma})"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and other.q == self.q

    def __hash__(self):
        return hash(("FiniteField", self.q))
