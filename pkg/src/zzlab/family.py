"""Conductor-ordered families of tame abelian G-extensions of F_q(x).

A family member is the finite data of an idele-class character into G:
nonzero tame inertia images g_P at finitely many finite places, a tame
inertia image g_inf at infinity, and the image h_inf of the uniformizer
1/x at infinity.  Triviality on the constants F_q^* imposes the single
reciprocity constraint

    sum_P ((|P|-1)/(q-1)) * g_P + g_inf = 0   in G,

and every valid datum corresponds to exactly one extension-with-embedding.
Conductor degree (tame, so squarefree) orders the family.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
from dataclasses import dataclass
from math import comb

from .cyclo import RootOfUnity
from .field import FiniteField
from .groups import DualChar, GroupElem, GroupSpec
from .poly import (Place, Poly, deg, divmod_poly, is_irreducible, normalize,
                   place_count, irreducibles)
from .symbols import power_residue_symbol

DEFAULT_BUDGET = 10_000_000


class ResourceLimitError(RuntimeError):
    """Enumeration would exceed the configured member budget."""


def enumeration_budget() -> int:
    return int(os.environ.get("ZZLAB_BUDGET", DEFAULT_BUDGET))


@dataclass(frozen=True)
class FamilySpec:
    field: FiniteField
    group: GroupSpec

    def __post_init__(self):
        if (self.field.q - 1) % self.group.exponent != 0:
            raise ValueError(
                f"tameness requires q = 1 mod exp(G): q = {self.field.q}, "
                f"exp(G) = {self.group.exponent}")

    def degree_coeff(self, degree: int) -> int:
        """(q^degree - 1)/(q - 1), the constants' transfer coefficient."""
        q = self.field.q
        return (q**degree - 1) // (q - 1)


@dataclass(frozen=True)
class FamilyMember:
    """One tame character: ram maps finite places to nonzero inertia images."""

    spec: FamilySpec
    ram: tuple  # ((Place, GroupElem), ...) canonically sorted
    g_inf: GroupElem
    h_inf: GroupElem

    def conductor_degree(self) -> int:
        d = sum(p.degree for p, _ in self.ram)
        if self.g_inf != self.spec.group.identity:
            d += 1
        return d

    def ramified_places(self) -> list[Place]:
        out = [p for p, _ in self.ram]
        if self.g_inf != self.spec.group.identity:
            out.append(Place.infinity())
        return out

    def __str__(self):
        parts = [f"{p}:{g}" for p, g in self.ram]
        return f"Member({', '.join(parts)}; g_inf={self.g_inf}, h_inf={self.h_inf})"


def make_member(spec: FamilySpec, ram: dict | list, g_inf, h_inf,
                check: bool = True) -> FamilyMember:
    G = spec.group
    items = sorted(ram.items() if isinstance(ram, dict) else ram)
    ram_t = tuple((p, G.reduce(g)) for p, g in items)
    m = FamilyMember(spec, ram_t, G.reduce(g_inf), G.reduce(h_inf))
    if check and not validate_member(m):
        raise ValueError(f"reciprocity constraint fails for {m}")
    return m


def reciprocity_defect(m: FamilyMember) -> GroupElem:
    G = m.spec.group
    s = m.g_inf
    for p, g in m.ram:
        s = G.add(s, G.scale(m.spec.degree_coeff(p.degree), g))
    return s


def validate_member(m: FamilyMember) -> bool:
    """True iff all inertia images are nonzero, places are distinct finite
    irreducibles, and the constants' reciprocity constraint holds."""
    G = m.spec.group
    F = m.spec.field
    seen = set()
    for p, g in m.ram:
        if p.at_infinity or p.poly is None:
            raise ValueError("ram keys must be finite places")
        if not is_irreducible(F, p.poly):
            raise ValueError(f"ram key {p} is not irreducible")
        if p in seen:
            raise ValueError(f"duplicate ramified place {p}")
        seen.add(p)
        if g == G.identity:
            return False
    return reciprocity_defect(m) == G.identity


def twist_conductor_degree(m: FamilyMember, rho: DualChar) -> int:
    """Conductor degree of the twist: places where rho kills the inertia
    image drop out (tame, exponent one everywhere else)."""
    if rho.is_trivial():
        raise ValueError("twist conductor undefined for the trivial character")
    d = sum(p.degree for p, g in m.ram if rho.eval_exponent(g) != 0)
    if rho.eval_exponent(m.g_inf) != 0:
        d += 1
    return d


def is_constant_type(m: FamilyMember, rho: DualChar) -> bool:
    """Everywhere-unramified twist: its L-series is a shifted zeta, not a
    polynomial; such twists are excluded from zero statistics."""
    return twist_conductor_degree(m, rho) == 0


def frobenius_exponent(m: FamilyMember, rho: DualChar, v: Place) -> int | None:
    """Exponent a with (rho o chi)(Frob_v) = zeta_N^a; None when v is
    ramified in the twist (the Euler factor is then 1)."""
    if rho.is_trivial():
        raise ValueError("frobenius value undefined for the trivial character")
    G = m.spec.group
    N = G.exponent
    w_exp = rho.eval_exponent(m.h_inf)
    if v.at_infinity:
        return None if rho.eval_exponent(m.g_inf) != 0 else w_exp
    a = (v.degree * w_exp) % N
    for q_place, g in m.ram:
        e_rho = rho.eval_exponent(g)
        if q_place == v:
            if e_rho != 0:
                return None
            continue
        if e_rho == 0:
            continue
        n_q = G.elem_order(g)
        s = power_residue_symbol(m.spec.field, v.poly, q_place.poly, n_q)
        if s is None:
            # v equals a ramified place only when v == q_place, handled above
            raise AssertionError("distinct irreducibles cannot divide")
        a = (a - s * e_rho) % N
    return a


def frobenius_value(m: FamilyMember, rho: DualChar, v: Place) -> RootOfUnity | None:
    a = frobenius_exponent(m, rho, v)
    return None if a is None else RootOfUnity(m.spec.group.exponent, a)


def frobenius_exponent_monic(m: FamilyMember, rho: DualChar, h: Poly) -> int | None:
    """Completely multiplicative extension to monic h (None encodes 0)."""
    if rho.is_trivial():
        raise ValueError("frobenius value undefined for the trivial character")
    F = m.spec.field
    G = m.spec.group
    N = G.exponent
    a = (deg(h) * rho.eval_exponent(m.h_inf)) % N
    for q_place, g in m.ram:
        e_rho = rho.eval_exponent(g)
        hq = h
        mult = 0
        while True:
            quo, rem = divmod_poly(F, hq, q_place.poly)
            if rem:
                break
            hq = quo
            mult += 1
        if mult > 0 and e_rho != 0:
            return None
        if e_rho != 0:
            s = power_residue_symbol(F, hq, q_place.poly, G.elem_order(g))
            a = (a - s * e_rho) % N
    return a


def image_subgroup(m: FamilyMember) -> frozenset:
    G = m.spec.group
    gens = [g for _, g in m.ram] + [m.g_inf, m.h_inf]
    return G.subgroup_generated(gens)


def is_surjective(m: FamilyMember) -> bool:
    return len(image_subgroup(m)) == m.spec.group.order


# -- shapes, exact counts, enumeration, sampling -----------------------------


def _nonzero_elems(G: GroupSpec) -> list[GroupElem]:
    return [g for g in G.elements() if g != G.identity]


def _assignment_counts_by_sum(spec: FamilySpec, degs: tuple) -> dict:
    """Count assignments (nonzero g per place degree) by their weighted sum."""
    G = spec.group
    counts = {G.identity: 1}
    for d in degs:
        c = spec.degree_coeff(d)
        nxt: dict = {}
        for s, k in counts.items():
            for g in _nonzero_elems(G):
                t = G.add(s, G.scale(c, g))
                nxt[t] = nxt.get(t, 0) + k
        counts = nxt
    return counts


def assignment_count(spec: FamilySpec, degs: tuple, with_inf: bool) -> int:
    by_sum = _assignment_counts_by_sum(spec, degs)
    G = spec.group
    if with_inf:
        return sum(k for s, k in by_sum.items() if s != G.identity)
    return by_sum.get(G.identity, 0)


def _shapes(spec: FamilySpec, total: int):
    """Multisets of finite-place degrees summing to `total`, multiplicity
    capped by the number of places of each degree; ascending tuples."""
    q = spec.field.q

    def rec(remaining, min_deg):
        if remaining == 0:
            yield ()
            return
        for d in range(min_deg, remaining + 1):
            cap = min(remaining // d, place_count(q, d))
            for mult in range(1, cap + 1):
                for rest in rec(remaining - mult * d, d + 1):
                    yield (d,) * mult + rest

    yield from rec(total, 1)


def shape_table(spec: FamilySpec, d: int) -> list[tuple[tuple, bool, int]]:
    """All (degree-shape, infinity-flag, exact member count) at conductor d."""
    q = spec.field.q
    kappa = spec.group.order
    out = []
    for with_inf in (False, True):
        total = d - 1 if with_inf else d
        if total < 0:
            continue
        for shape in sorted(_shapes(spec, total)):
            n_assign = assignment_count(spec, shape, with_inf)
            if n_assign == 0:
                continue
            n_support = 1
            for dd in set(shape):
                n_support *= comb(place_count(q, dd), shape.count(dd))
            out.append((shape, with_inf, n_support * n_assign * kappa))
    return out


def count_members(spec: FamilySpec, d: int) -> int:
    """Exact number of valid members at conductor degree d."""
    if d < 0:
        raise ValueError("conductor degree must be >= 0")
    if d == 0:
        return spec.group.order
    return sum(w for _, _, w in shape_table(spec, d))


def _supports_for_shape(spec: FamilySpec, shape: tuple):
    """Distinct-place supports realizing a degree shape, lexicographic."""
    from itertools import combinations, product as iproduct

    by_deg: dict[int, int] = {}
    for dd in shape:
        by_deg[dd] = by_deg.get(dd, 0) + 1
    degree_lists = []
    for dd in sorted(by_deg):
        places = [Place.finite(f) for f in irreducibles(spec.field, dd)]
        degree_lists.append(list(combinations(places, by_deg[dd])))
    for combo in iproduct(*degree_lists):
        yield tuple(p for grp in combo for p in grp)


def enumerate_members(spec: FamilySpec, d: int, surjective_only: bool = False,
                      budget: int | None = None) -> list[FamilyMember]:
    """All valid members at conductor degree d, deterministically ordered.

    With surjective_only, keeps members whose character image is all of G.
    Raises ResourceLimitError when the exact count exceeds the budget
    (env ZZLAB_BUDGET); sample_members handles those sizes.
    """
    if d < 0:
        raise ValueError("conductor degree must be >= 0")
    limit = enumeration_budget() if budget is None else budget
    n_total = count_members(spec, d)
    if n_total > limit:
        raise ResourceLimitError(
            f"{n_total} members at conductor degree {d} exceeds budget {limit}; "
            "use sample_members instead")
    G = spec.group
    out: list[FamilyMember] = []
    if d == 0:
        for h in G.elements():
            out.append(FamilyMember(spec, (), G.identity, h))
        return [m for m in out if not surjective_only or is_surjective(m)]
    from itertools import product as iproduct
    nonzero = _nonzero_elems(G)
    for with_inf in (False, True):
        total = d - 1 if with_inf else d
        if total < 0:
            continue
        for shape in sorted(_shapes(spec, total)):
            coeffs = [spec.degree_coeff(dd) for dd in shape]
            for support in _supports_for_shape(spec, shape):
                for gs in iproduct(nonzero, repeat=len(support)):
                    s = G.identity
                    for c, g in zip(coeffs, gs):
                        s = G.add(s, G.scale(c, g))
                    if with_inf:
                        if s == G.identity:
                            continue
                        g_inf = G.neg(s)
                    else:
                        if s != G.identity:
                            continue
                        g_inf = G.identity
                    ram = tuple(sorted(zip(support, gs)))
                    for h in G.elements():
                        out.append(FamilyMember(spec, ram, g_inf, h))
    if surjective_only:
        out = [m for m in out if is_surjective(m)]
    return out


def _index_rng(seed: int, index: int) -> random.Random:
    key = hashlib.sha256(f"zzlab:{seed}:{index}".encode()).digest()
    return random.Random(int.from_bytes(key[:16], "big"))


def _random_irreducible(F: FiniteField, degree: int, rng: random.Random) -> Poly:
    while True:
        coeffs = [rng.randrange(F.q) for _ in range(degree)] + [1]
        f = normalize(coeffs)
        if deg(f) == degree and is_irreducible(F, f):
            return f


def _sample_assignment(spec: FamilySpec, degs: list, with_inf: bool,
                       rng: random.Random) -> tuple[list, GroupElem]:
    """Uniform assignment via suffix-count dynamic programming."""
    G = spec.group
    nonzero = _nonzero_elems(G)
    suffix = [None] * (len(degs) + 1)
    suffix[len(degs)] = {G.identity: 1}
    for j in range(len(degs) - 1, -1, -1):
        c = spec.degree_coeff(degs[j])
        cur: dict = {}
        for s, k in suffix[j + 1].items():
            for g in nonzero:
                t = G.add(s, G.scale(c, g))
                cur[t] = cur.get(t, 0) + k
        suffix[j] = cur
    if with_inf:
        choices = [(s, k) for s, k in suffix[0].items() if s != G.identity]
    else:
        choices = [(G.identity, suffix[0].get(G.identity, 0))]
    total = sum(k for _, k in choices)
    r = rng.randrange(total)
    for target, k in sorted(choices):
        if r < k:
            break
        r -= k
    g_inf = G.neg(target) if with_inf else G.identity
    gs = []
    remaining = target
    for j, dd in enumerate(degs):
        c = spec.degree_coeff(dd)
        opts = []
        for g in nonzero:
            need = tuple((x - y) % n for x, y, n in
                         zip(remaining, G.scale(c, g), G.invariant_factors))
            opts.append((g, suffix[j + 1].get(need, 0)))
        tot = sum(k for _, k in opts)
        r = rng.randrange(tot)
        for g, k in opts:
            if r < k:
                break
            r -= k
        gs.append(g)
        remaining = tuple((x - y) % n for x, y, n in
                          zip(remaining, G.scale(c, g), G.invariant_factors))
    return gs, g_inf


def sample_members(spec: FamilySpec, d: int, count: int, seed: int) -> list[FamilyMember]:
    """Exactly-uniform independent draws from the conductor-d member set.

    Each draw is determined by (seed, index) alone, so results are
    reproducible and independent of any parallel scheduling.
    """
    if d < 1:
        raise ValueError("sampling needs d >= 1")
    table = shape_table(spec, d)
    total = sum(w for _, _, w in table)
    if total == 0:
        raise ValueError(f"family at conductor degree {d} is empty")
    G = spec.group
    out = []
    for i in range(count):
        rng = _index_rng(seed, i)
        r = rng.randrange(total)
        for shape, with_inf, w in table:
            if r < w:
                break
            r -= w
        while True:
            support = []
            for dd in shape:
                support.append(Place.finite(_random_irreducible(spec.field, dd, rng)))
            if len(set(support)) == len(support):
                break
        order = sorted(range(len(support)), key=lambda j: support[j])
        degs = [support[j].degree for j in order]
        gs, g_inf = _sample_assignment(spec, degs, with_inf, rng)
        ram = tuple((support[order[j]], gs[j]) for j in range(len(order)))
        h_inf = G.elements()[rng.randrange(G.order)]
        out.append(FamilyMember(spec, tuple(sorted(ram)), g_inf, h_inf))
    return out


# -- serialization ------------------------------------------------------------


def member_record(m: FamilyMember) -> dict:
    return {
        "q": m.spec.field.q,
        "group": list(m.spec.group.invariant_factors),
        "ram": [[list(p.poly), list(g)] for p, g in m.ram],
        "g_inf": list(m.g_inf),
        "h_inf": list(m.h_inf),
    }


def member_from_record(rec: dict) -> FamilyMember:
    spec = FamilySpec(FiniteField(rec["q"]), GroupSpec(tuple(rec["group"])))
    ram = {Place.finite(tuple(c)): tuple(g) for c, g in rec["ram"]}
    return make_member(spec, ram, tuple(rec["g_inf"]), tuple(rec["h_inf"]))


def member_id(m: FamilyMember) -> str:
    blob = json.dumps(member_record(m), sort_keys=True, separators=(",", ":"))
    return hashlib.sha1(blob.encode()).hexdigest()[:12]
