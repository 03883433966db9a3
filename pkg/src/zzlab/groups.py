"""Finite abelian groups in invariant-factor form and their characters.

A group element is a plain tuple reduced componentwise; a character is an
exponent tuple evaluated in mu_N with N the group exponent.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import gcd, lcm, prod

from .cyclo import RootOfUnity

GroupElem = tuple


@dataclass(frozen=True)
class GroupSpec:
    """G = prod Z/n_i with n_{i+1} | n_i; kappa = |G|, exponent n_1."""

    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        ns = self.invariant_factors
        if not ns or any(n < 1 for n in ns):
            raise ValueError("invariant factors must be positive")
        for a, b in zip(ns, ns[1:]):
            if a % b != 0:
                raise ValueError(f"invariant factors must form a divisibility chain: {ns}")
        if prod(ns) < 2:
            raise ValueError("group must be nontrivial")

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[0]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def identity(self) -> GroupElem:
        return (0,) * self.rank

    def elements(self) -> list[GroupElem]:
        return list(product(*[range(n) for n in self.invariant_factors]))

    def reduce(self, g) -> GroupElem:
        return tuple(x % n for x, n in zip(g, self.invariant_factors))

    def add(self, g: GroupElem, h: GroupElem) -> GroupElem:
        return tuple((x + y) % n for x, y, n in zip(g, h, self.invariant_factors))

    def neg(self, g: GroupElem) -> GroupElem:
        return tuple((-x) % n for x, n in zip(g, self.invariant_factors))

    def scale(self, k: int, g: GroupElem) -> GroupElem:
        return tuple((k * x) % n for x, n in zip(g, self.invariant_factors))

    def elem_order(self, g: GroupElem) -> int:
        return lcm(*[n // gcd(x, n) for x, n in zip(g, self.invariant_factors)])

    def subgroup_generated(self, gens) -> frozenset:
        seen = {self.identity}
        frontier = [self.identity]
        gens = [self.reduce(g) for g in gens]
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = self.add(cur, g)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return frozenset(seen)


@dataclass(frozen=True)
class DualChar:
    """Character of G given by an exponent tuple; values in mu_{exponent}."""

    group: GroupSpec
    exponents: tuple

    def __post_init__(self):
        if len(self.exponents) != self.group.rank:
            raise ValueError("exponent tuple has wrong rank")

    @property
    def order(self) -> int:
        return lcm(*[n // gcd(m, n)
                     for m, n in zip(self.exponents, self.group.invariant_factors)])

    def is_trivial(self) -> bool:
        return all(m % n == 0 for m, n in zip(self.exponents, self.group.invariant_factors))

    def eval_exponent(self, g: GroupElem) -> int:
        """a with rho(g) = zeta_N^a, N the group exponent."""
        N = self.group.exponent
        return sum((N // n) * m * x for m, x, n in
                   zip(self.exponents, g, self.group.invariant_factors)) % N

    def __call__(self, g: GroupElem) -> RootOfUnity:
        return RootOfUnity(self.group.exponent, self.eval_exponent(g))

    def inverse(self) -> "DualChar":
        return DualChar(self.group, self.group.neg(self.exponents))

    def __pow__(self, k: int) -> "DualChar":
        return DualChar(self.group, self.group.scale(k, self.exponents))

    def kernel_size(self) -> int:
        return sum(1 for g in self.group.elements() if self.eval_exponent(g) == 0)

    @property
    def fluctuation_weight(self) -> int:
        """2 for order-2 characters, 1 for order >= 3 (variance weight)."""
        return 2 if self.order == 2 else 1


def rho_eval(rho: DualChar, g: GroupElem) -> RootOfUnity:
    return rho(g)


def dual_group(G: GroupSpec) -> list[DualChar]:
    """All characters, trivial one first, exponent-lexicographic."""
    return [DualChar(G, e) for e in G.elements()]


def conjugate_representatives(G: GroupSpec) -> list[DualChar]:
    """One of each pair {rho, rho^-1} among nontrivial characters."""
    out = []
    for rho in dual_group(G):
        if rho.is_trivial():
            continue
        if rho.exponents <= rho.inverse().exponents:
            out.append(rho)
    return out


def combination_weight(rho: DualChar) -> int:
    """Weight of rho in the total zero count over representatives:
    1 if rho is self-inverse, else 2 (rho and rho^-1 counted together)."""
    return 1 if (rho**2).is_trivial() else 2


@lru_cache(maxsize=None)
def proper_subgroups(G: GroupSpec) -> list[frozenset]:
    """All proper subgroups of G (as frozensets of elements)."""
    elems = G.elements()
    subs = {frozenset([G.identity])}
    frontier = [frozenset([G.identity])]
    while frontier:
        H = frontier.pop()
        for g in elems:
            if g not in H:
                newH = G.subgroup_generated(set(H) | {g})
                if newH not in subs:
                    subs.add(newH)
                    frontier.append(newH)
    full = frozenset(elems)
    return sorted((H for H in subs if H != full), key=lambda H: (len(H), sorted(H)))
