"""Batch experiment driver.

Subcommands: enumerate, count-series, lfun, stats-clt, bs-check,
averages, probe-lemma.  Every run writes a CSV (schema header first row)
plus a metadata JSON sidecar; identical configuration and seed produce
byte-identical artifacts regardless of worker count.

Exit codes: 0 success, 2 validation failure, 3 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .counting import (ab_averages, count_series_ints, epsilon_classes,
                       predicted_count, unmarked_local_sum)
from .family import (FamilySpec, ResourceLimitError, enumerate_members,
                     is_surjective, member_id, member_record, sample_members)
from .field import FiniteField
from .groups import GroupSpec, conjugate_representatives
from .lfun import (ConstantTypeTwist, MemberKernel, angles,
                   explicit_formula_check, l_polynomial)
from .poly import Place, normalize
from .stats import (bs_degree_schedule, clt_report, ensemble_moments,
                    mean_density_report, run_ensemble)
from .bspoly import bs_diagnostics, selberg_pair


class ValidationError(ValueError):
    pass


def _parse_group(text: str) -> GroupSpec:
    try:
        return GroupSpec(tuple(int(x) for x in text.split(",")))
    except ValueError as e:
        raise ValidationError(str(e))


def _build_spec(cfg) -> FamilySpec:
    if cfg.q is None or cfg.group is None:
        raise ValidationError("--q and --group are required")
    try:
        field = FiniteField(cfg.q)
        group = _parse_group(cfg.group)
        return FamilySpec(field, group)
    except ValueError as e:
        raise ValidationError(
            f"{e} (tame abelian families need q = 1 mod exp(G))")


def _write_csv(path: Path, header: list, rows: list):
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, complex):
        return f"{x.real!r}{x.imag:+}j"
    return x


def _write_meta(path: Path, cfg, extra: dict | None = None):
    meta = {
        "tool": "zzlab",
        "version": __version__,
        "config": {k: v for k, v in sorted(vars(cfg).items())
                   if k not in ("func", "out", "config", "workers") and v is not None},
    }
    if extra:
        meta.update(extra)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _members(cfg, spec):
    if cfg.sample:
        if cfg.d is None:
            raise ValidationError("--d is required for sampling")
        return sample_members(spec, cfg.d, cfg.sample, cfg.seed)
    if cfg.d is None:
        raise ValidationError("--d is required")
    return enumerate_members(spec, cfg.d)


# -- subcommands -----------------------------------------------------------------


def cmd_enumerate(cfg) -> int:
    spec = _build_spec(cfg)
    members = _members(cfg, spec)
    rows = []
    for m in members:
        rows.append([member_id(m), m.conductor_degree(),
                     int(is_surjective(m)),
                     json.dumps(member_record(m), sort_keys=True,
                                separators=(",", ":"))])
    out = Path(cfg.out or "enumerate.csv")
    _write_csv(out, ["member_id", "conductor_degree", "surjective", "record"], rows)
    _write_meta(out.with_suffix(out.suffix + ".meta.json"), cfg,
                {"n_members": len(members)})
    return 0


def cmd_count_series(cfg) -> int:
    spec = _build_spec(cfg)
    dmax = cfg.dmax if cfg.dmax is not None else (cfg.d or 8)
    exact = count_series_ints(spec, dmax)
    rows = []
    for d in range(dmax + 1):
        pred = predicted_count(spec, d).main_term
        ratio = exact[d] / pred if pred else float("nan")
        rows.append([d, exact[d], pred, ratio])
    out = Path(cfg.out or "count_series.csv")
    _write_csv(out, ["d", "exact_count", "predicted_main_term", "ratio"], rows)
    h = predicted_count(spec, 0)
    _write_meta(out.with_suffix(out.suffix + ".meta.json"), cfg,
                {"H": h.H, "c_k": h.c_k})
    return 0


def cmd_lfun(cfg) -> int:
    spec = _build_spec(cfg)
    members = _members(cfg, spec)
    reps = conjugate_representatives(spec.group)
    rows = []
    json_records = []
    for m in members:
        kernel = MemberKernel(m)
        mid = member_id(m)
        for ri, rho in enumerate(reps):
            try:
                L = l_polynomial(m, rho, kernel=kernel)
            except ConstantTypeTwist:
                rows.append([mid, ri, 0, -2, "", "", 1])
                continue
            aset = angles(L)
            n_hi = 2 * L.degree + 4
            ef_max = 0.0
            for n in range(1, n_hi + 1):
                c = explicit_formula_check(m, rho, n, angle_set=aset, L=L,
                                           kernel=kernel)
                ef_max = max(ef_max, c.residual)
            rows.append([mid, ri, L.degree + 2, L.degree,
                         aset.rh_residual, ef_max, 0])
            if cfg.format == "json":
                json_records.append({
                    "member_id": mid, "rho_index": ri,
                    "l_polynomial": L.to_record(),
                    "angles": aset.to_record()})
    out = Path(cfg.out or "lfun.csv")
    _write_csv(out, ["member_id", "rho_index", "twist_conductor", "deg_l",
                     "rh_residual", "ef_max_residual", "constant_type"], rows)
    if cfg.format == "json":
        with open(out.with_suffix(".json"), "w") as fh:
            json.dump(json_records, fh, indent=1, sort_keys=True)
            fh.write("\n")
    _write_meta(out.with_suffix(out.suffix + ".meta.json"), cfg,
                {"n_members": len(members), "n_reps": len(reps)})
    return 0


def cmd_stats_clt(cfg) -> int:
    spec = _build_spec(cfg)
    members = _members(cfg, spec)
    reps = conjugate_representatives(spec.group)
    l = cfg.bs_degree or bs_degree_schedule(cfg.d)
    result = run_ensemble(members, reps, cfg.beta, l=l,
                          workers=cfg.workers or 1, seed=cfg.seed,
                          conductor_degree=cfg.d)
    rows = []
    for r in result.rows:
        rows.append([r.member_id, r.rho_index, int(r.constant_type), r.m_deg,
                     r.n_count, r.n_minus, r.n_plus, r.t_minus, r.t_plus,
                     r.delta_minus, r.delta_plus, r.rh_residual])
    out = Path(cfg.out or "stats.csv")
    _write_csv(out, ["member_id", "rho_index", "constant_type", "m_deg",
                     "n_count", "n_minus", "n_plus", "t_minus", "t_plus",
                     "delta_minus", "delta_plus", "rh_residual"], rows)
    report = {
        "clt_per_rho": clt_report(result, "per-rho"),
        "clt_total": clt_report(result, "total"),
        "mean_density": mean_density_report(result),
        "moments": [vars(ensemble_moments(
            result, [2 if i == j else 0 for j in range(len(reps))]))
            for i in range(len(reps))],
        "schedule": {"l": result.l, "beta": result.beta, "d": cfg.d,
                     "seed": cfg.seed},
    }
    with open(out.with_suffix(".report.json"), "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
        fh.write("\n")
    _write_meta(out.with_suffix(out.suffix + ".meta.json"), cfg,
                {"n_members": len(members)})
    return 0


def cmd_bs_check(cfg) -> int:
    if cfg.q is None:
        raise ValidationError("--q is required (prime-sum diagnostic)")
    degrees = [cfg.bs_degree] if cfg.bs_degree else [8, 16, 32, 64, 128, 256]
    betas = [cfg.beta] if cfg.beta else [0.1, 0.25, 0.4]
    rows = []
    for K in degrees:
        for beta in betas:
            d = bs_diagnostics(selberg_pair(beta, K), cfg.grid or 10000, cfg.q)
            rows.append([K, beta, d.c0_error_minus, d.c0_error_plus,
                         d.sandwich_violation, d.even_coeff_sum,
                         d.log_identity_dev, d.max_coeff_n, d.prime_sum_dev,
                         int(d.log_checks_apply)])
    out = Path(cfg.out or "bs_check.csv")
    _write_csv(out, ["K", "beta", "c0_err_minus", "c0_err_plus",
                     "sandwich_violation", "even_coeff_sum",
                     "log_identity_dev", "max_coeff_n", "prime_sum_dev",
                     "log_checks_apply"], rows)
    _write_meta(out.with_suffix(out.suffix + ".meta.json"), cfg,
                {"thresholds": {"sandwich": 1e-10, "o1_bounds": 10.0}})
    return 0


def cmd_averages(cfg) -> int:
    spec = _build_spec(cfg)
    if cfg.d is None:
        raise ValidationError("--d is required")
    rhos = [dualchar_from_text(spec.group, t) for t in (cfg.rho or [])]
    places = [place_from_text(spec, t) for t in (cfg.place or [])]
    powers = [int(x) for x in (cfg.power or [])]
    if cfg.mode == "A" and len(powers) != len(rhos):
        raise ValidationError("--power once per --rho in mode A")
    if len(places) != len(rhos):
        raise ValidationError("--place once per --rho")
    res = ab_averages(spec, cfg.d, rhos, places, powers or None, cfg.mode)
    out = Path(cfg.out or "averages.csv")
    _write_csv(out, ["mode", "d", "exact", "predicted", "ratio",
                     "resource_limited"],
               [[res.mode, cfg.d,
                 res.exact_int if res.exact_int is not None else "",
                 res.predicted if res.predicted is not None else "",
                 res.ratio if res.ratio is not None else "",
                 int(res.resource_limited)]])
    _write_meta(out.with_suffix(out.suffix + ".meta.json"), cfg)
    return 3 if res.resource_limited else 0


def cmd_probe_lemma(cfg) -> int:
    """Tabulate the unit-twist local sums and per-class series coefficients:
    the nontrivial classes do not give the uniform sum -1 at every degree,
    which is visible here and feeds the count asymptotics report."""
    spec = _build_spec(cfg)
    dmax = cfg.dmax if cfg.dmax is not None else 12
    rows = []
    for eps in epsilon_classes(spec):
        sums = [unmarked_local_sum(spec, n, eps) for n in range(1, dmax + 1)]
        rows.append(["eps=" + ",".join(map(str, eps.exponents)), "local_sums"]
                    + sums)
    N = spec.group.exponent
    kappa = spec.group.order
    from .counting import TruncatedSeries, binomial_factor
    from .poly import place_count
    for eps in epsilon_classes(spec):
        series = TruncatedSeries.one(N, dmax)
        inf_s = kappa if eps.is_trivial() else 0
        inf_factor = TruncatedSeries(N, dmax, [kappa, kappa * (inf_s - 1)])
        series = series * inf_factor
        for n in range(1, dmax + 1):
            s = unmarked_local_sum(spec, n, eps)
            series = series * binomial_factor(N, dmax, s, n,
                                              place_count(spec.field.q, n))
        rows.append(["eps=" + ",".join(map(str, eps.exponents)),
                     "twisted_series"]
                    + [c.rational_part() for c in series.c[1:]])
    out = Path(cfg.out or "probe_lemma.csv")
    _write_csv(out, ["epsilon_class", "kind"]
               + [f"n{k}" for k in range(1, dmax + 1)], rows)
    _write_meta(out.with_suffix(out.suffix + ".meta.json"), cfg)
    return 0


def dualchar_from_text(group: GroupSpec, text: str):
    from .groups import DualChar
    exps = tuple(int(x) for x in text.split(","))
    rho = DualChar(group, group.reduce(exps))
    if rho.is_trivial():
        raise ValidationError("character must be nontrivial")
    return rho


def place_from_text(spec: FamilySpec, text: str) -> Place:
    from .poly import deg, is_irreducible
    if text in ("inf", "infinity"):
        return Place.infinity()
    coeffs = normalize(tuple(int(x) for x in text.split(",")))
    if deg(coeffs) < 1 or coeffs[-1] != 1 or not is_irreducible(spec.field, coeffs):
        raise ValidationError(f"place polynomial must be monic irreducible: {text}")
    return Place.finite(coeffs)


# -- entry -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zzlab")
    sub = p.add_subparsers(dest="command", required=True)
    commands = {
        "enumerate": cmd_enumerate,
        "count-series": cmd_count_series,
        "lfun": cmd_lfun,
        "stats-clt": cmd_stats_clt,
        "bs-check": cmd_bs_check,
        "averages": cmd_averages,
        "probe-lemma": cmd_probe_lemma,
    }
    for name, fn in commands.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=str, help="flat JSON config; flags override")
        sp.add_argument("--q", type=int)
        sp.add_argument("--group", type=str, help="invariant factors, e.g. 2 or 4,2")
        sp.add_argument("--d", type=int)
        sp.add_argument("--dmax", type=int)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--bs-degree", dest="bs_degree", type=int)
        sp.add_argument("--sample", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", type=str)
        sp.add_argument("--format", type=str, default="csv",
                        choices=["csv", "json"])
        sp.add_argument("--workers", type=int)
        sp.add_argument("--grid", type=int)
        sp.add_argument("--rho", action="append")
        sp.add_argument("--place", action="append")
        sp.add_argument("--power", action="append")
        sp.add_argument("--mode", type=str, default="A",
                        choices=["A", "B_unram", "B_ram"])
        sp.set_defaults(func=fn)
    return p


def main(argv: list | None = None) -> int:
    parser = build_parser()
    cfg = parser.parse_args(argv)
    if cfg.config:
        with open(cfg.config) as fh:
            file_cfg = json.load(fh)
        for k, v in file_cfg.items():
            k = k.replace("-", "_")
            if getattr(cfg, k, None) is None:
                setattr(cfg, k, v)
    if cfg.seed is None:
        cfg.seed = 0
    if cfg.beta is None and cfg.func is cmd_stats_clt:
        cfg.beta = 0.25
    try:
        return cfg.func(cfg)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ResourceLimitError as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
