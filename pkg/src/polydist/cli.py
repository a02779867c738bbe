"""Command-line front end.

Subcommands: `distance` (full pipeline on an instance file), `bounds` (bounds
only), `verify` (check a perturbation against an instance), and
`reproduce-tables` (run the pipeline over the embedded benchmark polynomials
and compare against the recorded reference values).
"""

import argparse
import json
import sys

import numpy as np

from . import benchmarks
from .bounds import SearchConfig, lower_bound_scaling, lower_bound_sigma, upper_bound
from .certify import is_numerically_singular, multiplicity_at_least, verify_perturbation
from .distopt import MinimizeConfig, gamma_free_r1_refinement, minimize, seed_from_upper_bound
from .io import DistanceReport, InstanceFormatError, instance_to_dict, read_instance
from .mulink import TargetIsEigenvalueError, mu_consistency_check

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_PARSE = 2
EXIT_SINGULAR = 3


def _parse_scalar(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"cannot parse scalar {text!r}; use RE or RE,IM")


def _emit(report: DistanceReport, out_path):
    text = report.to_json()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


class _ParseFailure(Exception):
    pass


def _load(path):
    try:
        return read_instance(path)
    except (InstanceFormatError, OSError) as exc:
        print(f"error: cannot read instance {path}: {exc}", file=sys.stderr)
        raise _ParseFailure from exc


def _verification_dict(rep) -> dict:
    return {
        "passed": bool(rep.passed),
        "sigma_relative": float(rep.sigma_relative),
        "cluster_count": int(rep.cluster_count),
        "rho": float(rep.rho),
        "tol": float(rep.tol),
        "regular": bool(rep.regular),
    }


def _run_pipeline(p, lambda0, mult, norm, search_cfg, min_cfg, bounds_only=False):
    """Bounds + distance for one instance; returns a populated DistanceReport."""
    r = mult - 1
    report = DistanceReport(
        lambda0=[lambda0.real, lambda0.imag], r_plus_1=mult, norm=norm,
        seed=search_cfg.seed, starts=search_cfg.starts, budget=search_cfg.budget)

    if is_numerically_singular(p):
        report.singular = True
        report.distance = 0.0
        report.notes.append("polynomial is numerically singular: it is arbitrarily "
                            "close to one with the requested elementary divisor")
        return report, EXIT_SINGULAR

    has_mult, _ = multiplicity_at_least(p, lambda0, mult, tol=1e3 * np.finfo(float).eps)
    if has_mult:
        report.preexisting_multiplicity = True
        report.distance = 0.0
        report.notes.append(f"lambda0 already has algebraic multiplicity >= {mult}")
        return report, EXIT_OK

    lb1 = lower_bound_sigma(p, lambda0, r, search_cfg)
    report.lower_bound_sigma = lb1.value
    report.evaluations["lower_bound_sigma"] = lb1.evaluations
    try:
        lb2 = lower_bound_scaling(p, lambda0, r, search_cfg)
        report.lower_bound_scaling = lb2.value
        report.evaluations["lower_bound_scaling"] = lb2.evaluations
    except TargetIsEigenvalueError:
        report.notes.append("lambda0 is an eigenvalue: scaling lower bound unavailable")

    ub = upper_bound(p, lambda0, r, norm, search_cfg)
    if norm == "2" and r == 1 and lambda0 == 0:
        refined = gamma_free_r1_refinement(p, norm, search_cfg)
        if refined.value < ub.value:
            ub = refined
            report.notes.append("upper bound refined by the gamma-free construction")
    report.upper_bound = ub.value if np.isfinite(ub.value) else np.inf
    report.evaluations["upper_bound"] = ub.evaluations
    if not np.isfinite(ub.value):
        report.notes.append("no admissible gamma found along the upper bound search")

    if bounds_only:
        return report, EXIT_OK

    extra = []
    seed_xs = seed_from_upper_bound(ub, p.n) if ub.perturbation is not None else None
    if seed_xs is not None:
        extra.append(seed_xs)
    result = minimize(p, lambda0, r, norm, min_cfg, extra_starts=extra)
    report.distance = result.value
    report.perturbation = instance_to_dict(result.perturbation)
    rep = verify_perturbation(p, result.perturbation, lambda0, mult, min_cfg.verify_tol)
    report.verification = _verification_dict(rep)
    if not result.converged:
        report.notes.append("optimizer budget exhausted before convergence")
    return report, EXIT_OK


def cmd_distance(args) -> int:
    p, _ = _load(args.instance)
    lambda0 = _parse_scalar(args.lambda0)
    search_cfg = SearchConfig(starts=args.starts, budget=args.budget, seed=args.seed)
    min_cfg = MinimizeConfig(starts=args.starts, seed=args.seed)
    report, code = _run_pipeline(p, lambda0, args.r, args.norm, search_cfg, min_cfg)
    _emit(report, args.out)
    return code


def cmd_bounds(args) -> int:
    p, _ = _load(args.instance)
    lambda0 = _parse_scalar(args.lambda0)
    search_cfg = SearchConfig(starts=args.starts, budget=args.budget, seed=args.seed)
    report, code = _run_pipeline(p, lambda0, args.r, args.norm, search_cfg,
                                 MinimizeConfig(), bounds_only=True)
    _emit(report, args.out)
    return code


def cmd_verify(args) -> int:
    p, _ = _load(args.instance)
    dp, _ = _load(args.perturbation)
    lambda0 = _parse_scalar(args.lambda0)
    if dp.coeffs.shape != p.coeffs.shape:
        print("error: perturbation shape does not match instance", file=sys.stderr)
        return EXIT_PARSE
    rep = verify_perturbation(p, dp, lambda0, args.r, args.tol)
    doc = _verification_dict(rep)
    if args.r < 2:
        doc["mu_consistency"] = "not applicable for multiplicity 1"
    else:
        try:
            mu = mu_consistency_check(p, lambda0, args.r - 1, dp, args.norm)
            doc["mu_consistency"] = {
                "nullity": mu.nullity_mu,
                "mu_condition": mu.mu_condition,
                "rank_T_perturbed": mu.rank_T_perturbed,
                "rank_condition": mu.rank_condition,
                "agree": mu.agree,
            }
        except TargetIsEigenvalueError:
            doc["mu_consistency"] = "unavailable: lambda0 is an eigenvalue of the instance"
    print(json.dumps(doc, indent=1))
    return EXIT_OK if rep.passed else EXIT_VERIFY_FAIL


def _table_row(table, mult, search_cfg, min_cfg, bound_cache):
    """Compute one benchmark row; bounds are cached across same-point tables."""
    spec = benchmarks.TABLES[table]
    p = spec.polynomial
    r = mult - 1
    key = (spec.example, spec.lambda0, r)
    if key not in bound_cache:
        lb1 = lower_bound_sigma(p, spec.lambda0, r, search_cfg)
        lb2 = lower_bound_scaling(p, spec.lambda0, r, search_cfg)
        bound_cache[key] = (lb1, lb2)
    lb1, lb2 = bound_cache[key]
    ub = upper_bound(p, spec.lambda0, r, spec.norm, search_cfg)
    if spec.norm == "2" and r == 1 and spec.lambda0 == 0:
        refined = gamma_free_r1_refinement(p, spec.norm, search_cfg)
        if refined.value < ub.value:
            ub = refined
    extra = []
    seed_xs = seed_from_upper_bound(ub, p.n) if ub.perturbation is not None else None
    if seed_xs is not None:
        extra.append(seed_xs)
    result = minimize(p, spec.lambda0, r, spec.norm, min_cfg, extra_starts=extra)
    return {
        "table": table,
        "multiplicity": mult,
        "norm": spec.norm,
        "lambda0": spec.lambda0,
        "computed": {
            "lower_bound_scaling": lb2.value,
            "lower_bound_sigma": lb1.value,
            "distance": result.value,
            "upper_bound": ub.value,
        },
        "reference": {
            "lower_bound_scaling": spec.rows[mult][0],
            "lower_bound_sigma": spec.rows[mult][1],
            "distance": benchmarks.reference_distance(table, mult),
            "upper_bound": spec.rows[mult][4],
        },
        "result": result,
        "upper": ub,
        "polynomial": p,
    }


def _deviation(computed, reference):
    if reference in (None, 0):
        return np.nan
    return (computed - reference) / abs(reference)


_TIGHTER_SIGN = {"lower_bound_scaling": +1, "lower_bound_sigma": +1,
                 "distance": -1, "upper_bound": -1}


def format_table_rows(rows, tol) -> str:
    lines = []
    table = rows[0]["table"]
    spec = benchmarks.TABLES[table]
    lines.append(f"Table {table}: example {spec.example}, lambda0 = {spec.lambda0:g}, "
                 f"norm {spec.norm}")
    lines.append(f"{'mult':>4} " + "".join(
        f"{name:>25}" for name in ("lb (scaling)", "lb (sigma)", "distance", "upper bound")))
    for row in rows:
        cells = [f"{row['multiplicity']:>4} "]
        for name in ("lower_bound_scaling", "lower_bound_sigma", "distance", "upper_bound"):
            comp = row["computed"][name]
            ref = row["reference"][name]
            dev = _deviation(comp, ref)
            mark = " "
            if np.isfinite(dev) and abs(dev) > tol:
                mark = "+" if dev * _TIGHTER_SIGN[name] > 0 else "!"
            cells.append(f"{comp:>13.8f}/{ref:>10.8f}{mark}")
        lines.append("".join(cells))
    lines.append("  (x/y: computed/reference; '+' tighter than reference beyond tol, "
                 "'!' worse than reference beyond tol)")
    return "\n".join(lines)


def cmd_reproduce_tables(args) -> int:
    tables = list(range(1, 9)) if args.table == "all" else [int(args.table)]
    search_cfg = SearchConfig(starts=args.starts, budget=args.budget, seed=args.seed)
    min_cfg = MinimizeConfig(starts=args.starts, seed=args.seed)
    bound_cache = {}
    machine_rows = []
    for table in tables:
        rows = [_table_row(table, mult, search_cfg, min_cfg, bound_cache)
                for mult in sorted(benchmarks.TABLES[table].rows)]
        print(format_table_rows(rows, args.tol))
        print()
        for row in rows:
            machine_rows.append({key: row[key] for key in
                                 ("table", "multiplicity", "norm", "lambda0",
                                  "computed", "reference")})
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(machine_rows, handle, indent=1)
            handle.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polydist",
        description="Distance from a matrix polynomial to a nearest one having "
                    "an eigenvalue of prescribed multiplicity at a given point.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, with_norm=True):
        sp.add_argument("--lambda0", required=True, help="target point, RE or RE,IM")
        sp.add_argument("--r", type=int, required=True,
                        help="target multiplicity (elementary divisor degree at least r)")
        if with_norm:
            sp.add_argument("--norm", choices=("2", "F"), default="F")
        sp.add_argument("--starts", type=int, default=10)
        sp.add_argument("--budget", type=int, default=200)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="write the JSON report here")

    sp = sub.add_parser("distance", help="bounds plus the optimized distance")
    sp.add_argument("instance")
    common(sp)
    sp.set_defaults(func=cmd_distance)

    sp = sub.add_parser("bounds", help="lower and upper bounds only")
    sp.add_argument("instance")
    common(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("verify", help="verify a perturbation achieves the multiplicity")
    sp.add_argument("instance")
    sp.add_argument("perturbation")
    sp.add_argument("--lambda0", required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--norm", choices=("2", "F"), default="F")
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("reproduce-tables", help="recompute the benchmark tables")
    sp.add_argument("--table", default="all", choices=[str(i) for i in range(1, 9)] + ["all"])
    sp.add_argument("--tol", type=float, default=1e-2)
    sp.add_argument("--starts", type=int, default=10)
    sp.add_argument("--budget", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="write machine-readable rows here")
    sp.set_defaults(func=cmd_reproduce_tables)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _ParseFailure:
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
