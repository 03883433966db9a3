"""Zero-count statistics over conductor-ordered ensembles.

Per member and nontrivial character: the angle count N in a symmetric
interval, its majorant/minorant counts, and the two prime-sum statistics
T (first-power terms, the Gaussian-fluctuation carrier) and Delta
(square terms, bounded).  Ensemble reducers compute moments against the
closed-form references and the standardized central-limit reports.

All reductions fold in canonical member order with math.fsum, so outputs
are bit-stable for a fixed seed regardless of worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bspoly import TrigPoly, selberg_pair, trig_eval
from .family import (FamilyMember, frobenius_exponent, member_id)
from .groups import DualChar, combination_weight
from .lfun import (ConstantTypeTwist, LPolynomial, MemberKernel,
                   NonGeometricMember, angles, explicit_place_sum,
                   genus_of_member, l_polynomial)
from .poly import INFINITY


def bs_degree_schedule(d: int) -> int:
    """Analysis degree l for conductor degree d; slowly growing in d."""
    return min(256, max(4, round(d / math.log(d + 1))))


def n_interval(thetas: np.ndarray, beta: float) -> tuple[int, int]:
    """Count angles in the closed interval [-beta/2, beta/2]; the second
    entry counts angles within 1e-9 of the boundary (ties, reported)."""
    if not 0 < beta < 1:
        raise ValueError("interval length must be in (0, 1)")
    a = np.abs(np.asarray(thetas))
    count = int(np.count_nonzero(a <= beta / 2))
    ties = int(np.count_nonzero(np.abs(a - beta / 2) < 1e-9))
    return count, ties


def _twist_place_terms(member, rho, kernel, max_deg):
    """(degree, norm_weight, cos_table) triples for T/Delta prime sums."""
    N = member.spec.group.exponent
    q = member.spec.field.q
    out = []
    for D in range(1, max_deg + 1):
        expo = kernel.place_exponents(rho, D)
        out.append((D, expo))
    a_inf = frobenius_exponent(member, rho, INFINITY)
    return out, a_inf, N, q


def t_statistic(member: FamilyMember, rho: DualChar, bs: TrigPoly,
                kernel: MemberKernel | None = None) -> float:
    """T = - sum over places of c(deg v) deg v |v|^(-1/2) (chi(v)+chi(v)^-1)."""
    if rho.is_trivial():
        raise ValueError("statistics need a nontrivial character")
    if kernel is None:
        kernel = MemberKernel(member)
    l = bs.degree
    per_deg, a_inf, N, q = _twist_place_terms(member, rho, kernel, l)
    terms = []
    for D, expo in per_deg:
        c = bs.coeffs[D] if D <= l else 0.0
        if c == 0.0:
            continue
        live = expo[expo >= 0]
        if live.size:
            counts = np.bincount(live % N, minlength=N)
            cosa = np.cos(2 * math.pi * np.arange(N) / N)
            s = float(counts @ cosa)
            terms.append(-c * D * q ** (-D / 2) * 2.0 * s)
    if a_inf is not None and l >= 1:
        terms.append(-bs.coeffs[1] * 1 * q ** (-0.5)
                     * 2.0 * math.cos(2 * math.pi * a_inf / N))
    return math.fsum(terms)


def delta_statistic(member: FamilyMember, rho: DualChar, bs: TrigPoly,
                    kernel: MemberKernel | None = None) -> float:
    """Delta = - sum of c(2 deg v) deg v |v|^(-1) (chi(v)^2 + chi(v)^-2)."""
    if rho.is_trivial():
        raise ValueError("statistics need a nontrivial character")
    if kernel is None:
        kernel = MemberKernel(member)
    l = bs.degree
    terms = []
    N = member.spec.group.exponent
    q = member.spec.field.q
    for D in range(1, l // 2 + 1):
        c = bs.coeffs[2 * D]
        if c == 0.0:
            continue
        expo = kernel.place_exponents(rho, D)
        live = expo[expo >= 0]
        if live.size:
            counts = np.bincount((2 * live) % N, minlength=N)
            cosa = np.cos(2 * math.pi * np.arange(N) / N)
            s = float(counts @ cosa)
            terms.append(-c * D * q ** (-D) * 2.0 * s)
    a_inf = frobenius_exponent(member, rho, INFINITY)
    if a_inf is not None and l >= 2:
        terms.append(-bs.coeffs[2] * q ** (-1.0)
                     * 2.0 * math.cos(2 * math.pi * (2 * a_inf) / N))
    return math.fsum(terms)


def smooth_count_identity(member: FamilyMember, rho: DualChar, bs: TrigPoly,
                          angle_set=None, L: LPolynomial | None = None,
                          kernel: MemberKernel | None = None) -> tuple[float, float]:
    """Both evaluations of sum_i I_l(theta_i): from the angles directly and
    from c(0) m plus the weighted place sums of the explicit formula."""
    if kernel is None:
        kernel = MemberKernel(member)
    if L is None:
        L = l_polynomial(member, rho, kernel=kernel)
    if angle_set is None:
        angle_set = angles(L)
    angle_side = float(math.fsum(trig_eval(bs, t) for t in angle_set.thetas)) \
        if len(angle_set) else (bs.coeffs[0] * 0.0)
    prime_terms = [bs.coeffs[0] * L.degree]
    for n in range(1, bs.degree + 1):
        if bs.coeffs[n] == 0.0:
            continue
        rhs = explicit_place_sum(member, rho, n, kernel)
        prime_terms.append(bs.coeffs[n] * 2.0 * rhs.real)
    return angle_side, math.fsum(prime_terms)


def decomposition_residual(member: FamilyMember, rho: DualChar, bs: TrigPoly,
                           angle_set, L, kernel) -> float:
    """Residual of N_l - beta m = T + Delta + (c0 - beta) m + (r >= 3 tail)
    with every piece evaluated explicitly."""
    N = member.spec.group.exponent
    q = member.spec.field.q
    l = bs.degree
    n_l = float(math.fsum(trig_eval(bs, t) for t in angle_set.thetas)) \
        if len(angle_set) else 0.0
    t_val = t_statistic(member, rho, bs, kernel)
    d_val = delta_statistic(member, rho, bs, kernel)
    tail_terms = []
    a_inf = frobenius_exponent(member, rho, INFINITY)
    for r in range(3, l + 1):
        for D in range(1, l // r + 1):
            c = bs.coeffs[r * D]
            if c == 0.0:
                continue
            expo = kernel.place_exponents(rho, D)
            live = expo[expo >= 0]
            if live.size:
                counts = np.bincount((r * live) % N, minlength=N)
                cosa = np.cos(2 * math.pi * np.arange(N) / N)
                tail_terms.append(-c * D * q ** (-r * D / 2) * 2.0
                                  * float(counts @ cosa))
        if a_inf is not None:
            tail_terms.append(-bs.coeffs[r] * q ** (-r / 2) * 2.0
                              * math.cos(2 * math.pi * ((r * a_inf) % N) / N))
    tail = math.fsum(tail_terms)
    m = L.degree
    beta = bs.beta
    lhs = n_l - beta * m
    rhs = t_val + d_val + (bs.coeffs[0] - beta) * m + tail
    return abs(lhs - rhs)


# -- ensemble rows ---------------------------------------------------------------


@dataclass
class TwistRow:
    member_index: int
    member_id: str
    rho_index: int
    constant_type: bool
    m_deg: int = 0
    n_count: int = 0
    n_ties: int = 0
    n_minus: float = 0.0
    n_plus: float = 0.0
    t_minus: float = 0.0
    t_plus: float = 0.0
    delta_minus: float = 0.0
    delta_plus: float = 0.0
    rh_residual: float = 0.0


@dataclass
class MemberRow:
    member_index: int
    member_id: str
    geometric: bool
    genus: int | None
    n_total: int | None
    surjective: bool = True


@dataclass
class EnsembleResult:
    beta: float
    l: int
    rho_exponents: list
    rho_orders: list
    rho_weights: list      # fluctuation weight r_rho per representative
    comb_weights: list     # 1 for self-inverse, else 2
    rows: list
    member_rows: list
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def rows_for(self, rho_index: int) -> list:
        return [r for r in self.rows if r.rho_index == rho_index]


def member_statistics(index: int, member: FamilyMember, reps: list,
                      beta: float, l: int) -> tuple[list, MemberRow]:
    """All per-twist rows of one member plus its member-level row."""
    minus, plus = selberg_pair(beta, l)
    kernel = MemberKernel(member)
    mid = member_id(member)
    rows = []
    n_by_rep = []
    for ri, rho in enumerate(reps):
        try:
            L = l_polynomial(member, rho, kernel=kernel)
        except ConstantTypeTwist:
            rows.append(TwistRow(index, mid, ri, True))
            n_by_rep.append(None)
            continue
        aset = angles(L)
        n_count, ties = n_interval(aset.thetas, beta)
        row = TwistRow(
            index, mid, ri, False,
            m_deg=L.degree, n_count=n_count, n_ties=ties,
            n_minus=float(math.fsum(trig_eval(minus, t) for t in aset.thetas)),
            n_plus=float(math.fsum(trig_eval(plus, t) for t in aset.thetas)),
            t_minus=t_statistic(member, rho, minus, kernel),
            t_plus=t_statistic(member, rho, plus, kernel),
            delta_minus=delta_statistic(member, rho, minus, kernel),
            delta_plus=delta_statistic(member, rho, plus, kernel),
            rh_residual=aset.rh_residual,
        )
        if not (row.n_minus <= n_count + 1e-9 and n_count <= row.n_plus + 1e-9):
            raise AssertionError(f"sandwich violated for {member}")
        rows.append(row)
        n_by_rep.append(n_count)
    try:
        genus = genus_of_member(member)
        geometric = True
    except NonGeometricMember:
        genus, geometric = None, False
    n_total = None
    if geometric and all(n is not None for n in n_by_rep):
        n_total = sum(combination_weight(rho) * n
                      for rho, n in zip(reps, n_by_rep))
    from .family import is_surjective
    return rows, MemberRow(index, mid, geometric, genus, n_total,
                           is_surjective(member))


def _worker(args):
    return member_statistics(*args)


def run_ensemble(members: list, reps: list, beta: float,
                 l: int | None = None, workers: int = 1,
                 seed: int | None = None, conductor_degree: int | None = None
                 ) -> EnsembleResult:
    """Per-twist statistics for every member; deterministic row order."""
    if not 0 < beta <= 0.5:
        raise ValueError("interval length must be in (0, 0.5]")
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            if a.group.add(a.exponents, b.exponents) == a.group.identity:
                raise ValueError(
                    "character list contains an inverse pair; use one "
                    "representative per pair")
    if l is None:
        d = conductor_degree if conductor_degree is not None else (
            members[0].conductor_degree() if members else 4)
        l = bs_degree_schedule(d)
    tasks = [(i, m, reps, beta, l) for i, m in enumerate(members)]
    if workers > 1:
        import multiprocessing as mp
        with mp.Pool(workers) as pool:
            results = pool.map(_worker, tasks, chunksize=8)
    else:
        results = [member_statistics(*t) for t in tasks]
    rows = [r for rws, _ in results for r in rws]
    member_rows = [mr for _, mr in results]
    return EnsembleResult(
        beta=beta, l=l,
        rho_exponents=[list(r.exponents) for r in reps],
        rho_orders=[r.order for r in reps],
        rho_weights=[r.fluctuation_weight for r in reps],
        comb_weights=[combination_weight(r) for r in reps],
        rows=rows, member_rows=member_rows, seed=seed,
        meta={"n_members": len(members)})


# -- reducers ----------------------------------------------------------------------


def t_moment_reference(weight: int, r: int, l: int, beta: float) -> float:
    """Closed-form main term of the r-th T moment; zero for odd r."""
    if r % 2:
        return 0.0
    s = r // 2
    return (weight**s * math.factorial(r)
            / (2**s * math.pi**r * math.factorial(s))
            * math.log(l * beta) ** s)


@dataclass
class MomentReport:
    exponents: list
    side: str
    empirical_t: float
    reference_t: float
    empirical_delta: float
    delta_threshold: float
    log_l_beta: float
    n_members: int


def ensemble_moments(result: EnsembleResult, exponents: list,
                     side: str = "minus",
                     delta_threshold: float = 25.0) -> MomentReport:
    """Mixed T moments (and the matching Delta moment) with references.

    exponents: one nonnegative integer per character representative.
    Pairs rho_i rho_j = 1 are excluded by construction (representatives).
    """
    if len(exponents) != len(result.rho_orders):
        raise ValueError("one exponent per character representative")
    valid_idx = sorted({r.member_index for r in result.rows}
                       - {r.member_index for r in result.rows if r.constant_type})
    by_member: dict[int, dict[int, TwistRow]] = {}
    for r in result.rows:
        by_member.setdefault(r.member_index, {})[r.rho_index] = r
    tname = "t_minus" if side == "minus" else "t_plus"
    dname = "delta_minus" if side == "minus" else "delta_plus"
    t_terms, d_terms = [], []
    for mi in valid_idx:
        rowmap = by_member[mi]
        tprod, dprod = 1.0, 1.0
        for ri, rr in enumerate(exponents):
            if rr == 0:
                continue
            row = rowmap[ri]
            tprod *= getattr(row, tname) ** rr
            dprod *= getattr(row, dname) ** rr
        t_terms.append(tprod)
        d_terms.append(dprod)
    n = len(t_terms)
    emp_t = math.fsum(t_terms) / n if n else 0.0
    emp_d = math.fsum(d_terms) / n if n else 0.0
    ref = 1.0
    for w, rr in zip(result.rho_weights, exponents):
        ref *= t_moment_reference(w, rr, result.l, result.beta)
        if rr % 2:
            ref = 0.0
    return MomentReport(list(exponents), side, emp_t, ref, emp_d,
                        delta_threshold, math.log(result.l * result.beta), n)


def _describe(z: np.ndarray) -> dict:
    n = len(z)
    mean = float(np.mean(z))
    var = float(np.var(z, ddof=1)) if n > 1 else 0.0
    sd = math.sqrt(var) if var > 0 else 1.0
    cent = z - mean
    skew = float(np.mean(cent**3) / sd**3) if n else 0.0
    kurt = float(np.mean(cent**4) / sd**4) if n else 0.0
    qs = [1, 5, 10, 25, 50, 75, 90, 95, 99]
    return {
        "n": n, "mean": mean, "variance": var, "skewness": skew,
        "kurtosis": kurt,
        "quantiles": {str(p): float(np.quantile(z, p / 100)) for p in qs},
    }


def clt_report(result: EnsembleResult, scope: str = "per-rho") -> dict:
    """Standardized zero-count fluctuations.

    per-rho: (N - m beta) / sqrt(w log(m beta) / pi^2), w the order weight;
    total:   (N_tot - g beta) / sqrt(2 (kappa-1) log(g beta) / pi^2).
    Rows whose normalization is undefined (m beta <= 1) are excluded and
    counted, as are constant-type twists.
    """
    beta = result.beta
    out: dict = {"scope": scope, "beta": beta, "l": result.l}
    surjective = {mr.member_index for mr in result.member_rows if mr.surjective}
    if scope == "per-rho":
        per = []
        z_by_rho = {}
        for ri, w in enumerate(result.rho_weights):
            rows = result.rows_for(ri)
            zs, excluded_ct, excluded_norm = [], 0, 0
            kept_rows = []
            for r in rows:
                if r.constant_type:
                    excluded_ct += 1
                    continue
                mb = r.m_deg * beta
                if mb <= 1.0:
                    excluded_norm += 1
                    continue
                zs.append((r.n_count - mb) / math.sqrt(w / math.pi**2 * math.log(mb)))
                kept_rows.append(r)
            z = np.array(zs)
            z_by_rho[ri] = {r.member_index: zv for r, zv in zip(kept_rows, zs)}
            stats = _describe(z) if len(z) else {"n": 0}
            stats.update({"rho": result.rho_exponents[ri],
                          "order": result.rho_orders[ri],
                          "excluded_constant_type": excluded_ct,
                          "excluded_normalization": excluded_norm})
            # full-family vs surjective-image restriction: the two reports
            # should differ by at most the proper-subgroup fraction
            zs_sur = np.array([zv for r, zv in zip(kept_rows, zs)
                               if r.member_index in surjective])
            if len(zs_sur) > 1:
                sur = _describe(zs_sur)
                stats["surjective_only"] = {
                    "n": sur["n"], "mean": sur["mean"],
                    "variance": sur["variance"],
                    "fraction_non_surjective":
                        1.0 - len(zs_sur) / max(1, len(zs)),
                }
            per.append(stats)
        out["per_rho"] = per
        # pairwise correlations over members where both twists are usable
        corr = []
        for i in range(len(result.rho_weights)):
            for j in range(i + 1, len(result.rho_weights)):
                common = sorted(set(z_by_rho[i]) & set(z_by_rho[j]))
                if len(common) > 2:
                    a = np.array([z_by_rho[i][k] for k in common])
                    b = np.array([z_by_rho[j][k] for k in common])
                    c = float(np.corrcoef(a, b)[0, 1])
                else:
                    c = 0.0
                corr.append({"i": i, "j": j, "n": len(common), "corr": c})
        out["pairwise_correlations"] = corr
        return out
    if scope != "total":
        raise ValueError("scope must be per-rho or total")
    kappa_minus_1 = sum(result.comb_weights)  # = kappa - 1
    zs, excluded = [], 0
    for mr in result.member_rows:
        if not mr.geometric or mr.n_total is None or mr.genus is None:
            excluded += 1
            continue
        gb = mr.genus * beta
        if gb <= 1.0:
            excluded += 1
            continue
        zs.append((mr.n_total - gb)
                  / math.sqrt(2 * kappa_minus_1 / math.pi**2 * math.log(gb)))
    stats = _describe(np.array(zs)) if zs else {"n": 0}
    stats["excluded_members"] = excluded
    stats["variance_constant"] = 2 * kappa_minus_1 / math.pi**2
    out["total"] = stats
    return out


def mean_density_report(result: EnsembleResult) -> dict:
    """Per-character ratios N / (m beta): ensemble mean, extremes, and the
    log-normalized deviation (N - m beta) log(m) / m."""
    beta = result.beta
    per = []
    for ri in range(len(result.rho_orders)):
        ratios, normdev, flagged = [], [], 0
        for r in result.rows_for(ri):
            if r.constant_type or r.m_deg == 0:
                flagged += 1
                continue
            ratios.append(r.n_count / (r.m_deg * beta))
            normdev.append((r.n_count - r.m_deg * beta)
                           * math.log(r.m_deg) / r.m_deg if r.m_deg > 1 else 0.0)
        entry = {
            "rho": result.rho_exponents[ri],
            "n": len(ratios),
            "flagged": flagged,
            "mean_ratio": math.fsum(ratios) / len(ratios) if ratios else None,
            "max_abs_dev": max((abs(x - 1) for x in ratios), default=None),
            "max_norm_dev": max((abs(x) for x in normdev), default=None),
        }
        per.append(entry)
    return {"beta": beta, "l": result.l, "per_rho": per}
