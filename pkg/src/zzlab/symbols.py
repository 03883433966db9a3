"""Tame power-residue symbols.

For a finite place Q, n | q-1 and h coprime to Q, the symbol is the
m in Z/n with  h^((|Q|-1)/n) = gamma^(m (q-1)/n)  (mod Q), i.e. the
discrete log of the n-th power-residue value taken in mu_n(F_q) with
base gamma^((q-1)/n).  It is completely multiplicative in h and is the
local character evaluation every Euler factor in this package is built
from, so there are batched numpy kernels beside the scalar routine:
the character-sum sizes grow like q^(d/2) per member.

Batched kernels assume a prime field (all production runs use one);
scalar routines are fully general.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .field import FiniteField
from .poly import Poly, deg, mulmod, polymod, powmod


def power_residue_symbol(F: FiniteField, h: Poly, Q: Poly, n: int) -> int | None:
    """Symbol of h at the place Q in Z/n; None when Q divides h.

    Requires n | q-1; Q must be monic irreducible (not checked here,
    callers validate their ramification data once).
    """
    if n < 1 or (F.q - 1) % n != 0:
        raise ValueError(f"n = {n} does not divide q - 1 = {F.q - 1}")
    r = polymod(F, h, Q)
    if not r:
        return None
    e = (F.q ** deg(Q) - 1) // n
    v = powmod(F, r, e, Q)
    if deg(v) > 0:
        raise ArithmeticError("power residue not a constant; Q reducible?")
    c = F.dlog(v[0])
    step = (F.q - 1) // n
    if c % step != 0:
        raise ArithmeticError("power residue outside mu_n; Q reducible?")
    return (c // step) % n


# -- batched kernels (prime q) ----------------------------------------------


def _require_prime(F: FiniteField):
    if F.e != 1:
        raise NotImplementedError("batched kernels require a prime field")


def reduce_batch(H: np.ndarray, Qc: np.ndarray, q: int) -> np.ndarray:
    """Reduce rows of H (length W, c0 first, true coefficients) mod monic Q.

    Qc holds the D lower coefficients of Q (c0..c_{D-1}); it may be 1-D
    (one modulus for every row) or 2-D (a modulus per row).
    """
    D = Qc.shape[-1]
    H = np.asarray(H, dtype=np.int64) % q
    W = H.shape[1]
    if W < D:
        out = np.zeros((H.shape[0], D), dtype=np.int64)
        out[:, :W] = H
        return out
    acc = H.copy()
    for k in range(W - 1, D - 1, -1):
        t = acc[:, k] % q
        acc[:, k - D:k] -= t[:, None] * Qc
        acc[:, k - D:k] %= q
        acc[:, k] = 0
    return acc[:, :D] % q


def _fits_delayed_mod(q: int, D: int) -> bool:
    # worst-case growth when reduction skips intermediate mods
    return D * (q - 1) ** 2 * q**D < (1 << 62)


def mulmod_batch(A: np.ndarray, B: np.ndarray, Qc: np.ndarray, q: int) -> np.ndarray:
    """Rowwise (A*B) mod Q for residue rows of width D = deg Q."""
    D = A.shape[1]
    L = A.shape[0]
    prod = np.zeros((L, 2 * D - 1), dtype=np.int64)
    for i in range(D):
        ai = A[:, i]
        prod[:, i:i + D] += ai[:, None] * B
    if _fits_delayed_mod(q, D):
        for k in range(2 * D - 2, D - 1, -1):
            t = prod[:, k]
            prod[:, k - D:k] -= t[:, None] * Qc
        return prod[:, :D] % q
    prod %= q
    for k in range(2 * D - 2, D - 1, -1):
        t = prod[:, k]
        prod[:, k - D:k] -= t[:, None] * Qc
        prod[:, k - D:k] %= q
        prod[:, k] = 0
    return prod[:, :D]


def powmod_batch(A: np.ndarray, e: int, Qc: np.ndarray, q: int) -> np.ndarray:
    """Rowwise A^e mod Q (e >= 0, shared across rows)."""
    D = A.shape[1]
    L = A.shape[0]
    out = np.zeros((L, D), dtype=np.int64)
    out[:, 0] = 1
    base = A % q
    while e:
        if e & 1:
            out = mulmod_batch(out, base, Qc, q)
        e >>= 1
        if e:
            base = mulmod_batch(base, base, Qc, q)
    return out


@lru_cache(maxsize=4096)
def _frobenius_matrix(Q: Poly, q: int) -> np.ndarray:
    """Row i holds the residue of x^(i q) mod Q: the q-power Frobenius as a
    matrix acting on residue coefficient rows from the right."""
    F = FiniteField(q)
    D = deg(Q)
    xq = powmod(F, (0, 1), q, Q)
    rows = []
    cur: Poly = (1,)
    for _ in range(D):
        rows.append(list(cur) + [0] * (D - len(cur)))
        cur = mulmod(F, cur, xq, Q)
    return np.array(rows, dtype=np.int64)


def _frobenius_power(Q: Poly, q: int, t: int, cache: dict) -> np.ndarray:
    if t in cache:
        return cache[t]
    if t == 1:
        m = _frobenius_matrix(Q, q)
    elif t % 2 == 0:
        h = _frobenius_power(Q, q, t // 2, cache)
        m = (h @ h) % q
    else:
        m = (_frobenius_power(Q, q, t - 1, cache) @ _frobenius_matrix(Q, q)) % q
    cache[t] = m
    return m


def norm_batch(R: np.ndarray, Q: Poly, q: int) -> np.ndarray:
    """Residue-field norms down to F_q of the residue rows R (mod Q), via a
    Frobenius doubling ladder: O(log D) batched products."""
    D = deg(Q)
    if D == 1:
        return R[:, 0] % q
    Qc = np.array(Q[:D], dtype=np.int64)
    fcache: dict = {}

    def frob(M: np.ndarray, t: int) -> np.ndarray:
        return (M @ _frobenius_power(Q, q, t, fcache)) % q

    # (t, P_t) with P_t = prod_{i<t} Frob^i(R); doubling P_{2t} = P_t Frob^t(P_t),
    # increment P_{t+1} = P_t Frob^t(R); scan the bits of D from the top
    R = R % q
    t, P = 1, R
    for b in bin(D)[3:]:
        P = mulmod_batch(P, frob(P, t), Qc, q)
        t *= 2
        if b == "1":
            P = mulmod_batch(P, frob(R, t), Qc, q)
            t += 1
    if D > 1 and np.any(P[:, 1:]):
        raise ArithmeticError("norm is not a constant; Q reducible?")
    return P[:, 0]


def symbol_batch(F: FiniteField, H: np.ndarray, Q: Poly, n: int) -> np.ndarray:
    """Symbols of every row of H (true coefficient rows) at the place Q.

    The symbol is dlog_gamma of the residue-field norm, reduced mod n.
    Returns int64 values in 0..n-1, with -1 marking rows divisible by Q.
    """
    _require_prime(F)
    if n < 1 or (F.q - 1) % n != 0:
        raise ValueError(f"n = {n} does not divide q - 1 = {F.q - 1}")
    q = F.q
    D = deg(Q)
    Qc = np.array(Q[:D], dtype=np.int64)
    R = reduce_batch(H, Qc, q)
    v = norm_batch(R, Q, q)
    out = np.full(v.shape, -1, dtype=np.int64)
    nz = v != 0
    out[nz] = F.log[v[nz]] % n
    return out


def symbol_fixed_base_batch(F: FiniteField, h: Poly, Qs: np.ndarray, n: int) -> np.ndarray:
    """Symbols of one h at many degree-D places (rows of Qs, lower coeffs)."""
    _require_prime(F)
    q = F.q
    L, D = Qs.shape
    hw = max(len(h), 1)
    H = np.tile(np.array(list(h) + [0] * (hw - len(h)), dtype=np.int64), (L, 1))
    R = reduce_batch(H, Qs, q)
    e = (q**D - 1) // n
    P = powmod_batch(R, e, Qs, q)
    if D > 1 and np.any(P[:, 1:]):
        raise ArithmeticError("power residue not constant; reducible modulus?")
    v = P[:, 0]
    out = np.full(v.shape, -1, dtype=np.int64)
    nz = v != 0
    c = F.log[v[nz]]
    step = (q - 1) // n
    if np.any(c % step):
        raise ArithmeticError("power residue outside mu_n")
    out[nz] = (c // step) % n
    return out
