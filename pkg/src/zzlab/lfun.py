"""L-polynomials of family twists, their zero angles, and the explicit
formula relating angle power sums to place sums.

A nontrivial twist of conductor degree D has an L-function that is a
polynomial of degree D - 2 in T = q^(-s), constant term 1, all roots on
|u| = q^(-1/2).  Coefficients are computed as exact cyclotomic character
sums over monic polynomials of low degree; the upper half of the
coefficient vector comes from the functional equation, whose constant is
solved from a nonvanishing middle coefficient (never assumed).  Every
polynomial produced here is cross-examined by the root-modulus and
explicit-formula tests downstream, so a wrong sign convention cannot
survive quietly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cyclo import CyclotomicInt, divide_exact
from .family import (FamilyMember, frobenius_exponent, is_constant_type,
                     twist_conductor_degree)
from .groups import DualChar, dual_group
from .poly import (INFINITY, Place, code_digits, irreducible_coeffs,
                   place_count)
from .symbols import symbol_batch

FULL_EXPANSION_LANES = 60_000     # below this, skip the functional equation
PLACE_ORACLE_LANES = 20_000       # cumulative place budget for place sums


class ConstantTypeTwist(ValueError):
    """Everywhere-unramified twist: L is a shifted zeta, not a polynomial."""


class NonGeometricMember(ValueError):
    """Member with a constant-field direction; total genus is undefined here."""


@dataclass
class LPolynomial:
    member: FamilyMember
    rho: DualChar
    coeffs: list  # CyclotomicInt, length degree + 1, coeffs[0] = 1

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def complex_coeffs(self) -> np.ndarray:
        return np.array([c.render() for c in self.coeffs], dtype=complex)

    def to_record(self) -> dict:
        return {
            "degree": self.degree,
            "cyclotomic_order": self.member.spec.group.exponent,
            "coeff_vectors": [list(c.c) for c in self.coeffs],
            "coeff_complex": [[c.render().real, c.render().imag] for c in self.coeffs],
        }


@dataclass
class AngleSet:
    """Zero angles theta in [-1/2, 1/2) with u_root = q^(-1/2) e(-theta)."""

    thetas: np.ndarray
    rh_residual: float

    def __len__(self):
        return len(self.thetas)

    def to_record(self) -> dict:
        return {"thetas": [float(t) for t in self.thetas],
                "rh_residual": float(self.rh_residual)}


class MemberKernel:
    """Per-member cache of batched symbol tables.

    Symbol arrays depend only on (ramified place, its inertia order), so
    one kernel serves every character twist of the member: monic tables
    feed the L coefficient sums, place tables feed the explicit formula.
    """

    def __init__(self, member: FamilyMember):
        self.member = member
        self.spec = member.spec
        self.F = member.spec.field
        self.G = member.spec.group
        self.N = self.G.exponent
        self.ram = [(p, g, self.G.elem_order(g)) for p, g in member.ram]
        self._monic_syms: dict[int, list[np.ndarray]] = {}
        self._place_syms: dict[int, list[np.ndarray]] = {}

    # -- symbol tables ---------------------------------------------------------

    def monic_symbols(self, j: int) -> list[np.ndarray]:
        """Symbols of all monic degree-j polynomials at each ramified place."""
        if j not in self._monic_syms:
            q = self.F.q
            if j == 0:
                rows = np.ones((1, 1), dtype=np.int64)
            else:
                low = code_digits(np.arange(q**j, dtype=np.int64), q, j)
                rows = np.concatenate(
                    [low, np.ones((q**j, 1), dtype=np.int64)], axis=1)
            self._monic_syms[j] = [
                symbol_batch(self.F, rows, p.poly, n) for p, _, n in self.ram]
        return self._monic_syms[j]

    def place_symbols(self, D: int) -> list[np.ndarray]:
        """Symbols of all degree-D places at each ramified place; the lane
        matching a ramified place itself carries -1."""
        if D not in self._place_syms:
            q = self.F.q
            low = irreducible_coeffs(q, D)
            rows = np.concatenate(
                [low, np.ones((low.shape[0], 1), dtype=np.int64)], axis=1)
            self._place_syms[D] = [
                symbol_batch(self.F, rows, p.poly, n) for p, _, n in self.ram]
        return self._place_syms[D]

    # -- per-twist combinations --------------------------------------------------

    def _twist_data(self, rho: DualChar):
        if rho.is_trivial():
            raise ValueError("twists need a nontrivial character")
        exps = [rho.eval_exponent(g) for _, g, _ in self.ram]
        w_exp = rho.eval_exponent(self.member.h_inf)
        inf_exp = rho.eval_exponent(self.member.g_inf)
        return exps, w_exp, inf_exp

    def dirichlet_sum(self, rho: DualChar, j: int) -> CyclotomicInt:
        """S_j = sum over monic degree-j h of the twist value at h, exact."""
        exps, w_exp, _ = self._twist_data(rho)
        syms = self.monic_symbols(j)
        L = syms[0].shape[0] if syms else self.F.q**j if j else 1
        expo = np.full(L, (j * w_exp) % self.N, dtype=np.int64)
        valid = np.ones(L, dtype=bool)
        for s, e in zip(syms, exps):
            if e == 0:
                continue
            valid &= s >= 0
            expo = (expo - s * e) % self.N
        counts = np.bincount(expo[valid], minlength=self.N)
        return CyclotomicInt.from_counts(self.N, [int(x) for x in counts])

    def place_exponents(self, rho: DualChar, D: int) -> np.ndarray:
        """Twist exponents at all degree-D places; -1 marks ramified lanes."""
        exps, w_exp, _ = self._twist_data(rho)
        syms = self.place_symbols(D)
        L = irreducible_coeffs(self.F.q, D).shape[0]
        expo = np.full(L, (D * w_exp) % self.N, dtype=np.int64)
        valid = np.ones(L, dtype=bool)
        for s, e in zip(syms, exps):
            ram_lane = s < 0
            if e == 0:
                continue
            valid &= ~ram_lane
            expo = (expo - np.where(ram_lane, 0, s) * e) % self.N
        out = np.where(valid, expo, -1)
        return out


def _scalar_dirichlet_sum(member, rho, j) -> CyclotomicInt:
    # general-field fallback; only used off the prime fast path
    from itertools import product as iproduct
    from .family import frobenius_exponent_monic
    N = member.spec.group.exponent
    q = member.spec.field.q
    counts = [0] * N
    for low in iproduct(range(q), repeat=j):
        h = tuple(low) + (1,) if j else (1,)
        a = frobenius_exponent_monic(member, rho, h)
        if a is not None:
            counts[a] += 1
    return CyclotomicInt.from_counts(N, counts)


def l_polynomial(member: FamilyMember, rho: DualChar,
                 kernel: MemberKernel | None = None,
                 use_functional_equation: bool | None = None) -> LPolynomial:
    """Exact L-polynomial of the (member, rho) twist.

    Raises ConstantTypeTwist when the twist is everywhere unramified.
    """
    if rho.is_trivial():
        raise ValueError("L-polynomial needs a nontrivial character")
    if is_constant_type(member, rho):
        raise ConstantTypeTwist(
            f"twist of {member} by {rho.exponents} has conductor 0")
    spec = member.spec
    N = spec.group.exponent
    q = spec.field.q
    D = twist_conductor_degree(member, rho)
    if D == 1:
        raise ArithmeticError("conductor degree 1 cannot occur for valid members")
    m = D - 2
    one = CyclotomicInt.integer(N, 1)
    if m == 0:
        return LPolynomial(member, rho, [one])

    w_exp = rho.eval_exponent(member.h_inf)
    inf_ramified = rho.eval_exponent(member.g_inf) != 0

    if use_functional_equation is None:
        full_cost = sum(q**j for j in range(m + 1))
        use_functional_equation = full_cost > FULL_EXPANSION_LANES

    honest_upto = m if not use_functional_equation else (m + 1) // 2
    if kernel is None:
        kernel = MemberKernel(member)
    scalar = spec.field.e > 1

    def sum_j(j):
        return (_scalar_dirichlet_sum(member, rho, j) if scalar
                else kernel.dirichlet_sum(rho, j))

    def ell_from_sums(sums):
        # L = (finite Dirichlet part) / (1 - w T) unless infinity is ramified
        ell = []
        for j, s in enumerate(sums):
            fp = s  # w^deg is already inside the twist value
            if inf_ramified or j == 0:
                ell.append(fp)
            else:
                ell.append(fp + ell[j - 1].times_root(w_exp))
        return ell

    sums = [sum_j(j) for j in range(min(honest_upto, m) + 1)]
    ell = ell_from_sums(sums)

    while len(ell) <= m:
        # find a pivot pair (j*, m - j*) inside the honest range with a
        # nonvanishing coefficient; escalate the honest range if needed
        J = len(ell) - 1
        pivot = None
        for jstar in range(m - J, J + 1):
            if m - jstar <= J and not ell[jstar].is_zero():
                pivot = jstar
                break
        if pivot is None:
            nxt = J + 1
            sums.append(sum_j(nxt))
            ell = ell_from_sums(sums)
            continue
        num_known = ell[m - pivot]
        den = ell[pivot].conj()
        coeffs = list(ell) + [None] * (m - J)
        for j in range(0, m - J):
            target = m - j
            qpow = q ** (pivot - j)
            coeffs[target] = divide_exact(num_known * ell[j].conj() * qpow, den)
        ell = coeffs
        break

    ell = ell[:m + 1]
    if ell[0] != one:
        raise ArithmeticError("L-polynomial constant term is not 1")
    if ell[m].is_zero():
        raise ArithmeticError("degree drop: leading coefficient vanished")
    return LPolynomial(member, rho, ell)


def l_polynomial_euler(member: FamilyMember, rho: DualChar) -> LPolynomial:
    """Independent route: truncated Euler product over places of degree <= m.

    Exponential in m; used to cross-examine the character-sum route.
    """
    if is_constant_type(member, rho):
        raise ConstantTypeTwist("conductor 0")
    spec = member.spec
    N = spec.group.exponent
    m = twist_conductor_degree(member, rho) - 2
    one = CyclotomicInt.integer(N, 1)
    if m == 0:
        return LPolynomial(member, rho, [one])
    coeffs = [one] + [CyclotomicInt.zero(N) for _ in range(m)]

    def mul_factor(coeffs, a_exp, d):
        # multiply by (1 - zeta^a T^d)^(-1) = sum_k zeta^(ak) T^(dk)
        out = [CyclotomicInt.zero(N) for _ in range(m + 1)]
        for i in range(m + 1):
            if coeffs[i].is_zero():
                continue
            k = 0
            while i + d * k <= m:
                out[i + d * k] = out[i + d * k] + coeffs[i].times_root(a_exp * k)
                k += 1
        return out

    from .poly import irreducibles
    for d in range(1, m + 1):
        for f in irreducibles(spec.field, d):
            a = frobenius_exponent(member, rho, Place.finite(f))
            if a is not None:
                coeffs = mul_factor(coeffs, a, d)
        if d == 1:
            a = frobenius_exponent(member, rho, INFINITY)
            if a is not None:
                coeffs = mul_factor(coeffs, a, 1)
    return LPolynomial(member, rho, coeffs)


# -- roots and angles -----------------------------------------------------------


def _aberth(c: np.ndarray, roots: np.ndarray, iters: int = 60) -> np.ndarray:
    dc = np.polyder(c)
    for _ in range(iters):
        p = np.polyval(c, roots)
        dp = np.polyval(dc, roots)
        newton = p / dp
        diff = roots[:, None] - roots[None, :]
        np.fill_diagonal(diff, np.inf)
        corr = newton / (1 - newton * np.sum(1.0 / diff, axis=1))
        roots = roots - corr
        if np.max(np.abs(corr)) < 1e-14:
            break
    return roots


def _refine_clusters(c: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Multiple roots split the companion eigenvalues by about eps^(1/k);
    refine each cluster of k nearby roots by Newton on the (k-1)-th
    derivative, where the common root is simple.  Falls back to the raw
    roots when the refined point fails a residual check."""
    m = len(c) - 1
    order = np.argsort(np.angle(roots))
    roots = roots[order]
    tol = 5e-5
    clusters: list[list[int]] = []
    for i in range(len(roots)):
        if clusters and abs(roots[i] - roots[clusters[-1][-1]]) < tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    if clusters and len(clusters) > 1 and \
            abs(roots[clusters[0][0]] - roots[clusters[-1][-1]]) < tol:
        clusters[0] = clusters.pop() + clusters[0]
    derivs = [c]
    for _ in range(m):
        derivs.append(np.polyder(derivs[-1]))
    out = np.array(roots, dtype=complex)
    bound = np.sum(np.abs(c))
    for idx in clusters:
        k = len(idx)
        if k == 1:
            continue
        z = complex(np.mean(roots[idx]))
        for _ in range(80):
            dp = np.polyval(derivs[k], z)
            if dp == 0:
                break
            step = np.polyval(derivs[k - 1], z) / dp
            z -= step
            if abs(step) < 1e-15:
                break
        if abs(np.polyval(c, z)) <= 1e-7 * bound:
            out[idx] = z
    return out


def angles(L: LPolynomial) -> AngleSet:
    """Zero angles of L; the root-modulus deviation from q^(-1/2) is reported
    (and asserted small by the callers that implement acceptance checks)."""
    m = L.degree
    q = L.member.spec.field.q
    if m == 0:
        return AngleSet(np.array([]), 0.0)
    c = L.complex_coeffs()[::-1]  # highest degree first for numpy
    roots = np.roots(c)
    dc = np.polyder(c)
    for _ in range(3):  # Newton polish of the eigenvalue starts
        dp = np.polyval(dc, roots)
        step = np.where(dp != 0, np.polyval(c, roots) / np.where(dp == 0, 1, dp), 0)
        roots = roots - step
    resid = np.abs(np.polyval(c, roots))
    scale = np.abs(c[0]) * np.abs(roots) ** m
    if np.any(resid > 1e-10 * np.maximum(scale, 1.0)):
        roots = _aberth(c, roots)
    roots = _refine_clusters(c, roots)
    sq = math.sqrt(q)
    rh_residual = float(np.max(np.abs(np.abs(roots) * sq - 1.0)))
    theta = (-np.angle(roots * sq) / (2 * math.pi) + 0.5) % 1.0 - 0.5
    theta = np.where(theta >= 0.5, theta - 1.0, theta)
    return AngleSet(np.sort(theta), rh_residual)


def power_sums_from_coeffs(L: LPolynomial, n_max: int) -> list[CyclotomicInt]:
    """p_n = sum of n-th powers of the inverse roots, by Newton's recursion."""
    N = L.member.spec.group.exponent
    ell = L.coeffs
    m = L.degree
    p: list[CyclotomicInt] = []
    for n in range(1, n_max + 1):
        acc = CyclotomicInt.zero(N)
        if n <= m:
            acc = acc + ell[n] * (-n)
        for i in range(1, min(n - 1, m) + 1):
            acc = acc - ell[i] * p[n - i - 1]
        p.append(acc)
    return p


# -- explicit formula ------------------------------------------------------------


def place_oracle_max_degree(q: int, budget: int = PLACE_ORACLE_LANES) -> int:
    total, n = 0, 0
    while True:
        nxt = total + place_count(q, n + 1)
        if nxt > budget:
            return max(n, 1)
        n += 1
        total = nxt


@dataclass
class ExplicitFormulaCheck:
    n: int
    lhs: complex
    rhs: complex
    residual: float
    source: str  # "places" or "coeff-recursion"


def explicit_place_sum(member: FamilyMember, rho: DualChar, n: int,
                       kernel: MemberKernel) -> complex:
    """Place-sum side of the explicit formula at n >= 1 (literal evaluation)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    q = member.spec.field.q
    N = member.spec.group.exponent
    zpow = np.exp(2j * math.pi * np.arange(N) / N)
    total = 0j
    for Dv in range(1, n + 1):
        if n % Dv:
            continue
        expo = kernel.place_exponents(rho, Dv)
        live = expo >= 0
        k = n // Dv
        total += Dv * complex(np.sum(zpow[(expo[live] * k) % N]))
    a_inf = frobenius_exponent(member, rho, INFINITY)
    if a_inf is not None:
        total += complex(zpow[(a_inf * n) % N])
    return -(q ** (-n / 2)) * total


def explicit_formula_check(member: FamilyMember, rho: DualChar, n: int,
                           angle_set: AngleSet | None = None,
                           L: LPolynomial | None = None,
                           kernel: MemberKernel | None = None,
                           place_budget: int | None = None) -> ExplicitFormulaCheck:
    """Compare sum_i e(n theta_i) with the weighted place sum.

    The place-sum side is evaluated literally whenever all needed place
    tables fit the lane budget; beyond that the exact coefficient
    recursion supplies the right-hand side (the angle side is still the
    object under test).  n may be negative (conjugate symmetry).
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    q = member.spec.field.q
    if L is None:
        L = l_polynomial(member, rho, kernel=kernel)
    if angle_set is None:
        angle_set = angles(L)
    na = abs(n)
    lhs = complex(np.sum(np.exp(2j * math.pi * na * angle_set.thetas))) if len(angle_set) else 0j

    budget = PLACE_ORACLE_LANES if place_budget is None else place_budget
    max_deg = place_oracle_max_degree(q, budget)
    if na <= max_deg and member.spec.field.e == 1:
        if kernel is None:
            kernel = MemberKernel(member)
        rhs = explicit_place_sum(member, rho, na, kernel)
        source = "places"
    else:
        p = power_sums_from_coeffs(L, na)
        rhs = p[na - 1].render() * q ** (-na / 2)
        source = "coeff-recursion"
    if n < 0:
        lhs, rhs = lhs.conjugate(), rhs.conjugate()
    return ExplicitFormulaCheck(n, lhs, rhs, abs(lhs - rhs), source)


# -- genus ------------------------------------------------------------------------


def genus_from_twists(member: FamilyMember) -> int:
    """Half the total twist L-degree over all nontrivial characters."""
    G = member.spec.group
    total = 0
    for rho in dual_group(G):
        if rho.is_trivial():
            continue
        if is_constant_type(member, rho):
            raise NonGeometricMember(
                f"{member} has a constant-field direction at {rho.exponents}")
        total += twist_conductor_degree(member, rho) - 2
    if total % 2:
        raise ArithmeticError("odd total twist degree")
    g = total // 2
    if g < 0:
        raise ArithmeticError("negative genus")
    return g


def genus_riemann_hurwitz(member: FamilyMember) -> int:
    """Tame ramification genus: 2g - 2 = -2 kappa + sum (kappa - kappa/e_v) deg v."""
    G = member.spec.group
    kappa = G.order
    rhs = -2 * kappa
    for p, g in member.ram:
        e = G.elem_order(g)
        rhs += (kappa - kappa // e) * p.degree
    if member.g_inf != G.identity:
        e = G.elem_order(member.g_inf)
        rhs += kappa - kappa // e
    if rhs % 2:
        raise ArithmeticError("Riemann-Hurwitz parity failure")
    g = (rhs + 2) // 2
    if g < 0:
        raise ArithmeticError("negative genus")
    return g


def genus_of_member(member: FamilyMember) -> int:
    g1 = genus_from_twists(member)
    g2 = genus_riemann_hurwitz(member)
    if g1 != g2:
        raise ArithmeticError(f"genus mismatch: twists {g1}, ramification {g2}")
    return g1
