"""Exact conductor-counting generating functions and their predictions.

The member count at each conductor degree is the coefficient of an Euler
product averaged over twist classes of the global units: a character of
the idele group is trivial on units iff its unit twists average to one.
Unmarked local factors depend on a place only through its degree, so the
global product is taken degree-by-degree with exact integer (cyclotomic)
coefficients; this is what makes degree 40 coefficients cheap.

Marked places (unramified with a Frobenius weight, or forced ramified)
enlarge the unit group by the marked primes themselves; the twist classes
then carry free parts and unmarked factors need per-place symbol counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iproduct
from math import comb, log1p

import numpy as np

from .cyclo import CyclotomicInt, RootOfUnity
from .family import FamilySpec
from .groups import DualChar, GroupElem
from .poly import Place, irreducible_coeffs, place_count
from .symbols import power_residue_symbol, symbol_fixed_base_batch


@dataclass(frozen=True)
class EpsilonClass:
    """Class of a constant unit gamma^(a_i) modulo n_i-th powers, per factor."""

    exponents: tuple

    def is_trivial(self) -> bool:
        return all(a == 0 for a in self.exponents)


def epsilon_classes(spec: FamilySpec) -> list[EpsilonClass]:
    ns = spec.group.invariant_factors
    return [EpsilonClass(e) for e in iproduct(*[range(n) for n in ns])]


def dot_epsilon(spec: FamilySpec, degree: int, g: GroupElem,
                eps: EpsilonClass) -> RootOfUnity:
    """Value of the unit twist at a degree-`degree` place whose tame inertia
    image is g: the symbol of gamma^(a_i) there is a_i (q^deg-1)/(q-1)."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    G = spec.group
    N = G.exponent
    M = spec.degree_coeff(degree)
    a = sum((N // n) * ((ai * M % n) * gi)
            for ai, gi, n in zip(eps.exponents, g, G.invariant_factors)) % N
    return RootOfUnity(N, a)


def unmarked_local_sum(spec: FamilySpec, degree: int, eps: EpsilonClass) -> int:
    """Sum of the unit-twist values over nonzero inertia images; always a
    rational integer: kappa * [twist trivial at this degree] - 1."""
    G = spec.group
    M = spec.degree_coeff(degree)
    trivial = all((ai * M) % n == 0
                  for ai, n in zip(eps.exponents, G.invariant_factors))
    return (G.order if trivial else 0) - 1


class TruncatedSeries:
    """Power series in T truncated beyond degree D, cyclotomic coefficients."""

    __slots__ = ("N", "D", "c")

    def __init__(self, N: int, D: int, coeffs=None):
        self.N = N
        self.D = D
        if coeffs is None:
            self.c = [CyclotomicInt.zero(N) for _ in range(D + 1)]
        else:
            self.c = [x if isinstance(x, CyclotomicInt) else CyclotomicInt.integer(N, x)
                      for x in coeffs]
            self.c += [CyclotomicInt.zero(N)] * (D + 1 - len(self.c))

    @classmethod
    def one(cls, N: int, D: int) -> "TruncatedSeries":
        s = cls(N, D)
        s.c[0] = CyclotomicInt.integer(N, 1)
        return s

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        out = TruncatedSeries(self.N, self.D)
        for i, x in enumerate(self.c):
            if x.is_zero():
                continue
            for j in range(self.D + 1 - i):
                y = other.c[j]
                if not y.is_zero():
                    out.c[i + j] = out.c[i + j] + x * y
        return out

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        out = TruncatedSeries(self.N, self.D)
        out.c = [x + y for x, y in zip(self.c, other.c)]
        return out

    def scale(self, k: int) -> "TruncatedSeries":
        out = TruncatedSeries(self.N, self.D)
        out.c = [x * k for x in self.c]
        return out


def binomial_factor(N: int, D: int, s, n: int, count: int) -> TruncatedSeries:
    """(1 + s T^n)^count truncated at D, s an int or CyclotomicInt."""
    out = TruncatedSeries(N, D)
    top = D // n
    if isinstance(s, CyclotomicInt):
        sk: CyclotomicInt | int = CyclotomicInt.integer(N, 1)
        for k in range(top + 1):
            out.c[n * k] = sk * comb(count, k)
            sk = sk * s
    else:
        for k in range(top + 1):
            out.c[n * k] = CyclotomicInt.integer(N, comb(count, k) * s**k)
    return out


# -- marks ---------------------------------------------------------------------


@dataclass(frozen=True)
class UnramMark:
    """Restrict to members where the place is unramified in the rho-twist,
    weighting by the power of the Frobenius value there."""
    rho: DualChar
    power: int


@dataclass(frozen=True)
class RamMark:
    """Restrict to members where the place is ramified in the rho-twist."""
    rho: DualChar


Mark = UnramMark | RamMark


@dataclass(frozen=True)
class _FreeEps:
    """Unit-twist class with free parts over the marked finite primes:
    ``gamma_part[i]`` in Z/n_i, ``prime_part[i][j]`` in Z/n_i for prime j."""
    gamma_part: tuple
    prime_part: tuple  # tuple of tuples, one inner tuple per group factor


def _char_sum_over(G, elems, s_exps) -> int:
    """Sum over `elems` of prod_i zeta_{n_i}^(g_i s_i): the subgroup size
    when the character is trivial on all of `elems`, else zero."""
    N = G.exponent
    trivial_on_all = all(
        sum((N // n) * (g[i] * s_exps[i])
            for i, n in enumerate(G.invariant_factors)) % N == 0
        for g in elems)
    return len(elems) if trivial_on_all else 0


@lru_cache(maxsize=None)
def _kernel_elems(rho: DualChar) -> tuple:
    return tuple(g for g in rho.group.elements() if rho.eval_exponent(g) == 0)


def _marked_finite_factor(spec, place, mark, s_exps, b_col, D) -> TruncatedSeries:
    """Euler factor at a marked finite place.

    s_exps[i]: symbol exponent of the unit-twist's prime-to-place part;
    b_col[i]: valuation exponents of the twist class at this place.
    """
    G = spec.group
    N = G.exponent
    ns = G.invariant_factors
    rho = mark.rho
    # uniformizer-direction sum: kappa iff the combined character is trivial
    if isinstance(mark, UnramMark):
        lam = mark.power
        h_trivial = all((lam * m + b) % n == 0
                        for m, b, n in zip(rho.exponents, b_col, ns))
    else:
        h_trivial = all(b % n == 0 for b, n in zip(b_col, ns))
    if not h_trivial:
        return TruncatedSeries(N, D)  # factor vanishes
    deg = place.degree
    kappa = G.order
    if isinstance(mark, UnramMark):
        ker = _kernel_elems(rho)
        ker_sum = _char_sum_over(G, ker, s_exps)
        coeffs = {0: kappa, deg: kappa * (ker_sum - 1)}
    else:
        full_sum = _char_sum_over(G, tuple(G.elements()), s_exps)
        ker_sum = _char_sum_over(G, _kernel_elems(rho), s_exps)
        coeffs = {deg: kappa * (full_sum - ker_sum)}
    out = TruncatedSeries(N, D)
    for k, v in coeffs.items():
        if k <= D:
            out.c[k] = CyclotomicInt.integer(N, v)
    return out


def _infinity_factor(spec, eps: _FreeEps, marked_deg_sum, inf_mark, D) -> TruncatedSeries:
    G = spec.group
    N = G.exponent
    ns = G.invariant_factors
    kappa = G.order
    # ord_inf of the class component i is -sum_j b_{i,j} deg P_j
    ords = [(-sum(b * d for b, d in zip(eps.prime_part[i], marked_deg_sum))) % ns[i]
            for i in range(len(ns))]
    a = eps.gamma_part
    if inf_mark is None:
        h_ok = all(o % n == 0 for o, n in zip(ords, ns))
        if not h_ok:
            return TruncatedSeries(N, D)
        g_sum = kappa if all(x % n == 0 for x, n in zip(a, ns)) else 0
        out = TruncatedSeries(N, D)
        out.c[0] = CyclotomicInt.integer(N, kappa)
        if D >= 1:
            out.c[1] = CyclotomicInt.integer(N, kappa * (g_sum - 1))
        return out
    rho = inf_mark.rho
    if isinstance(inf_mark, UnramMark):
        lam = inf_mark.power
        h_trivial = all((lam * m + o) % n == 0
                        for m, o, n in zip(rho.exponents, ords, ns))
        if not h_trivial:
            return TruncatedSeries(N, D)
        ker_sum = _char_sum_over(G, _kernel_elems(rho), a)
        out = TruncatedSeries(N, D)
        out.c[0] = CyclotomicInt.integer(N, kappa)
        if D >= 1:
            out.c[1] = CyclotomicInt.integer(N, kappa * (ker_sum - 1))
        return out
    h_trivial = all(o % n == 0 for o, n in zip(ords, ns))
    if not h_trivial:
        return TruncatedSeries(N, D)
    full_sum = _char_sum_over(G, tuple(G.elements()), a)
    ker_sum = _char_sum_over(G, _kernel_elems(rho), a)
    out = TruncatedSeries(N, D)
    if D >= 1:
        out.c[1] = CyclotomicInt.integer(N, kappa * (full_sum - ker_sum))
    return out


def local_factor_series(spec: FamilySpec, degree: int, eps: EpsilonClass,
                        D: int, mark: Mark | None = None) -> TruncatedSeries:
    """Euler factor of the twisted counting series at a degree-`degree`
    finite place (constant-unit twist classes only)."""
    N = spec.group.exponent
    if mark is None:
        s = unmarked_local_sum(spec, degree, eps)
        out = TruncatedSeries(N, D)
        out.c[0] = CyclotomicInt.integer(N, 1)
        if degree <= D:
            out.c[degree] = CyclotomicInt.integer(N, s)
        return out
    M = spec.degree_coeff(degree)
    ns = spec.group.invariant_factors
    s_exps = tuple((ai * M) % n for ai, n in zip(eps.exponents, ns))
    b_col = (0,) * len(ns)
    place = Place(degree, False, None)  # degree is all that matters here
    return _marked_finite_factor(spec, place, mark, s_exps, b_col, D)


def _free_eps_classes(spec, r):
    ns = spec.group.invariant_factors
    gamma_parts = list(iproduct(*[range(n) for n in ns]))
    prime_cols = list(iproduct(*[list(iproduct(*[range(n) for _ in range(r)]))
                                 for n in ns]))
    for gp in gamma_parts:
        for pp in prime_cols:
            yield _FreeEps(gp, pp)


def _symbol_table(spec, h, degree) -> np.ndarray:
    """Symbols of h (mod exp(G)) at every degree-`degree` place; -1 if h
    vanishes there."""
    F = spec.field
    N = spec.group.exponent
    if F.e == 1:
        Qs = irreducible_coeffs(F.q, degree)
        return symbol_fixed_base_batch(F, h, Qs, N)
    from .poly import irreducibles
    out = []
    for f in irreducibles(F, degree):
        s = power_residue_symbol(F, h, f, N)
        out.append(-1 if s is None else s)
    return np.array(out, dtype=np.int64)


def family_count_series(spec: FamilySpec, D: int,
                        marks: tuple = ()) -> list[CyclotomicInt]:
    """Exact coefficients a_0..a_D of the conductor-counting series.

    With no marks, a_d is the number of valid members at conductor degree
    d (a plain integer).  Marks restrict and weight the count per place.
    Coefficients are exact; non-integral averages raise (they would mean
    an arithmetic bug, the average is a count of restricted characters).
    """
    G = spec.group
    N = G.exponent
    q = spec.field.q
    kappa = G.order
    ns = G.invariant_factors
    marks = tuple(marks)
    for place, mark in marks:
        if mark.rho.is_trivial():
            raise ValueError("marks need nontrivial characters")
    finite_marks = [(p, mk) for p, mk in marks if not p.at_infinity]
    inf_marks = [mk for p, mk in marks if p.at_infinity]
    if len(inf_marks) > 1 or len({p for p, _ in finite_marks}) != len(finite_marks):
        raise ValueError("marked places must be distinct")
    inf_mark = inf_marks[0] if inf_marks else None
    marked_places = [p for p, _ in finite_marks]
    marked_degs = [p.degree for p in marked_places]
    r = len(finite_marks)

    # symbol tables: sym_pj_at[j][n] = symbols of P_j at all degree-n places
    sym_tables = [[None] * (D + 1) for _ in range(r)]
    marked_codes_by_deg: dict[int, set] = {}
    for j, p in enumerate(marked_places):
        marked_codes_by_deg.setdefault(p.degree, set()).add(p.poly)

    def place_rows(n):
        return irreducible_coeffs(q, n)

    total = TruncatedSeries(N, D)
    for eps in _free_eps_classes(spec, r):
        pure_gamma = all(all(b == 0 for b in col) for col in eps.prime_part)
        series = _infinity_factor(spec, eps, marked_degs, inf_mark, D)
        if all(x.is_zero() for x in series.c):
            continue
        # unmarked finite places, degree by degree
        dead = False
        for n in range(1, D + 1):
            n_places = place_count(q, n)
            n_marked_here = sum(1 for p in marked_places if p.degree == n)
            n_free = n_places - n_marked_here
            if n_free == 0:
                continue
            M = spec.degree_coeff(n)
            if pure_gamma:
                s = unmarked_local_sum(spec, n,
                                       EpsilonClass(tuple(eps.gamma_part)))
                series = series * binomial_factor(N, D, s, n, n_free)
                continue
            # per-place indicator: twist symbols all vanish
            ok = np.ones(n_places, dtype=bool)
            for i, ni in enumerate(ns):
                base = (eps.gamma_part[i] * M) % ni
                si = np.full(n_places, base, dtype=np.int64)
                for j in range(r):
                    b = eps.prime_part[i][j]
                    if b:
                        if sym_tables[j][n] is None:
                            sym_tables[j][n] = _symbol_table(
                                spec, marked_places[j].poly, n)
                        si = si + b * (sym_tables[j][n] % ni)
                ok &= (si % ni) == 0
            if n in marked_codes_by_deg:
                # drop the marked places themselves from the unmarked product
                rows = place_rows(n)
                keep = np.array([tuple(int(x) for x in row) + (1,)
                                 not in marked_codes_by_deg[n]
                                 for row in rows])
                n1 = int(np.count_nonzero(ok & keep))
                n0 = int(np.count_nonzero(keep)) - n1
            else:
                n1 = int(np.count_nonzero(ok))
                n0 = n_places - n1
            series = series * binomial_factor(N, D, kappa - 1, n, n1)
            series = series * binomial_factor(N, D, -1, n, n0)
            if all(x.is_zero() for x in series.c):
                dead = True
                break
        if dead:
            continue
        # marked finite factors
        for j, (p, mk) in enumerate(finite_marks):
            Mp = spec.degree_coeff(p.degree)
            s_exps = []
            for i, ni in enumerate(ns):
                s = (eps.gamma_part[i] * Mp) % ni
                for l in range(r):
                    if l == j:
                        continue
                    b = eps.prime_part[i][l]
                    if b:
                        sv = power_residue_symbol(
                            spec.field, marked_places[l].poly, p.poly, ni)
                        s = (s + b * sv) % ni
                s_exps.append(s)
            b_col = tuple(eps.prime_part[i][j] for i in range(len(ns)))
            series = series * _marked_finite_factor(
                spec, p, mk, tuple(s_exps), b_col, D)
        total = total + series

    denom = kappa ** (1 + r)
    out = []
    for x in total.c:
        if any(v % denom for v in x.c):
            raise ArithmeticError("twist average failed to be integral")
        out.append(CyclotomicInt(N, tuple(v // denom for v in x.c)))
    return out


def count_series_ints(spec: FamilySpec, D: int) -> list[int]:
    """Unmarked member counts a_0..a_D as plain ints."""
    return [c.rational_part() for c in family_count_series(spec, D)]


# -- predictions ---------------------------------------------------------------


@dataclass(frozen=True)
class EulerConstant:
    value: float
    truncation_degree: int
    tail_bound: float


def euler_H(spec: FamilySpec, tol: float = 1e-12) -> EulerConstant:
    """H = prod over all places of (1+(kappa-1)|v|^-1)(1-|v|^-1)^(kappa-1),
    computed degree-aggregated with a certified truncation tail."""
    q = spec.field.q
    kappa = spec.group.order
    log_h = 0.0
    n = 0
    while True:
        n += 1
        cnt = place_count(q, n) + (1 if n == 1 else 0)  # infinity has degree 1
        x = q ** (-n)
        # log1p keeps the near-cancelling pair accurate: the combined factor
        # is O(kappa^2 x^2) while each log alone is O(x)
        log_h += cnt * (log1p((kappa - 1) * x) + (kappa - 1) * log1p(-x))
        # per-place log factor is O(kappa^2 x^2); summed tail (crude, safe):
        if kappa * q ** (-(n + 1)) < 0.5:
            tail = 4 * kappa**2 * q ** (-(n + 1)) / (1 - 1 / q)
            if tail < tol:
                return EulerConstant(float(np.exp(log_h)), n, tail)
        if n > 6000:
            raise RuntimeError("Euler product truncation failed to certify")


def c_k_constant(q: int, genus: int = 0, class_number: int = 1) -> float:
    return class_number * q ** (-genus) / (q - 1)


@dataclass(frozen=True)
class PredictedCount:
    main_term: float
    H: float
    c_k: float
    binom: int
    q_power_exponent: int


def predicted_count(spec: FamilySpec, d: int, tol: float = 1e-12) -> PredictedCount:
    """Smooth main term H binom(d+kappa-2, kappa-2) c_k^(kappa-1) q^(d+kappa-1)."""
    kappa = spec.group.order
    q = spec.field.q
    H = euler_H(spec, tol).value
    ck = c_k_constant(q)
    b = comb(d + kappa - 2, kappa - 2)
    return PredictedCount(H * b * ck ** (kappa - 1) * float(q) ** (d + kappa - 1),
                          H, ck, b, d + kappa - 1)


def h_sigma0(spec: FamilySpec, marks: tuple) -> float:
    """Local correction for unramified marks."""
    kappa = spec.group.order
    q = spec.field.q
    out = 1.0
    for place, mk in marks:
        nv = place.norm(q)
        out *= (1 + (mk.rho.kernel_size() - 1) / nv) / (1 + (kappa - 1) / nv)
    return out


def h_sigma0_prime(spec: FamilySpec, marks: tuple) -> float:
    """Local correction for ramified marks (includes the kappa - #ker factor)."""
    kappa = spec.group.order
    q = spec.field.q
    out = 1.0
    for place, mk in marks:
        nv = place.norm(q)
        out *= (kappa - mk.rho.kernel_size()) / nv / (1 + (kappa - 1) / nv)
    return out


@dataclass(frozen=True)
class AverageResult:
    mode: str
    exact: CyclotomicInt | None
    exact_int: int | None
    predicted: float | None
    ratio: float | None
    resource_limited: bool


def ab_averages(spec: FamilySpec, d: int, rhos: list, places: list,
                powers: list | None, mode: str,
                budget: int | None = None) -> AverageResult:
    """Brute-force family sum against its smooth main term.

    mode "A": sum of prod_i rho_i(Frob_{v_i})^{lambda_i} (zero at members
    ramified in any rho_i-twist); "B_unram"/"B_ram": indicator counts.
    The prediction is the main term when it exists (all orders divide the
    powers for mode A), else None.
    """
    from .family import (enumerate_members, frobenius_exponent,
                         ResourceLimitError)

    if len(set(places)) != len(places):
        raise ValueError("marked places must be distinct")
    N = spec.group.exponent
    if mode == "A":
        if powers is None:
            raise ValueError("mode A needs powers")
        tau_ok = all((p % rho.order) == 0 for rho, p in zip(rhos, powers))
        marks = tuple((v, UnramMark(rho, lam))
                      for v, rho, lam in zip(places, rhos, powers))
    elif mode == "B_unram":
        powers = [0] * len(rhos)
        tau_ok = True
        marks = tuple((v, UnramMark(rho, 0)) for v, rho in zip(places, rhos))
    elif mode == "B_ram":
        marks = tuple((v, RamMark(rho)) for v, rho in zip(places, rhos))
        tau_ok = None
    else:
        raise ValueError(f"unknown mode {mode}")

    base = predicted_count(spec, d)
    if mode == "B_ram":
        predicted = base.main_term * h_sigma0_prime(spec, marks)
    else:
        predicted = base.main_term * h_sigma0(spec, marks) if tau_ok else None

    exact_cyc: CyclotomicInt | None = None
    limited = False
    try:
        members = enumerate_members(spec, d, budget=budget)
        acc = CyclotomicInt.zero(N)
        for m in members:
            if mode == "B_ram":
                if all(_is_ramified_at(m, rho, v) for rho, v in zip(rhos, places)):
                    acc = acc + 1
                continue
            term_exp = 0
            ok = True
            for rho, v, lam in zip(rhos, places, powers):
                a = frobenius_exponent(m, rho, v)
                if a is None:
                    ok = False
                    break
                term_exp = (term_exp + lam * a) % N
            if ok:
                acc = acc + CyclotomicInt.from_root(N, term_exp)
        exact_cyc = acc
    except ResourceLimitError:
        limited = True

    exact_int = None
    if exact_cyc is not None:
        try:
            exact_int = exact_cyc.rational_part()
        except ValueError:
            exact_int = None
    ratio = None
    if exact_int is not None and predicted:
        ratio = exact_int / predicted
    return AverageResult(mode, exact_cyc, exact_int, predicted, ratio, limited)


def _is_ramified_at(m, rho, v: Place) -> bool:
    from .family import frobenius_exponent
    return frobenius_exponent(m, rho, v) is None
