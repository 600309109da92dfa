"""Command-line front end: ``ordlab <command> [options]``.

Every run writes a report (JSON, CSV or a plain table) and exits 0 when all
of its checks pass, 1 otherwise. Report bodies are deterministic for a given
command line; only the ``timestamp`` field changes between runs.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys

import numpy as np

from . import __version__
from .basis import rank_report, verify_matrix_identities
from .catalog import get_metric, metric_family
from .conformal import ConformalJet, conformal_ricci, solve_exponents, verify_two_solutions
from .config import TOLERANCES
from .geometry import formula_audit, metric_jet
from .hydrogen import spectrum_table, standard_energy
from .numdiff import DiffConfig
from .operators import (
    OperatorSpec,
    ScalarField,
    apply_operator,
    build_operator,
    effective_potential_batch,
    fit_constant,
    oscillator_ordering,
    reports_to_csv,
)


class CliError(Exception):
    pass


def _check(name, value, tol, ok=None):
    ok = bool(value <= tol) if ok is None else bool(ok)
    return {"name": name, "value": value, "tolerance": tol, "pass": ok}


def _metric(label: str):
    try:
        return get_metric(label)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _points(metric, count, seed):
    return metric.sample(count, np.random.default_rng(seed))


def _cfg(args) -> DiffConfig:
    return DiffConfig()


def cmd_curvature(args):
    metric = _metric(args.metric)
    if args.numeric:
        metric = metric.numeric()
    pts = _points(metric, args.points, args.seed)
    tol = args.tol if args.tol is not None else TOLERANCES.curvature(metric.derivative_mode)
    audit = formula_audit(metric, pts, _cfg(args), tol)
    # the five-term expression is judged as it stands; the completed sum is a separate check
    checks = [
        _check("direct_vs_christoffel", max(audit.rel_diff), tol),
        _check("completed_vs_christoffel", max(audit.completed_rel_diff), tol),
    ]
    if metric.conformal and metric.dimension >= 2:
        dev = 0.0
        for p, ref in zip(pts, audit.christoffel):
            rc = conformal_ricci(ConformalJet.from_metric_jet(metric_jet(metric, p, _cfg(args))))
            dev = max(dev, abs(rc - ref) / max(abs(ref), 1.0))
        checks.append(_check("conformal_vs_christoffel", dev, tol))
    rows = [
        {"point": p, "direct": d, "completed": f, "christoffel": c, "abs_diff": a}
        for p, d, c, f, a in zip(audit.points, audit.direct, audit.christoffel, audit.completed, audit.abs_diff)
    ]
    return checks, audit.to_dict(), rows


def _spec_from_args(args) -> OperatorSpec:
    kinds = {
        "naive": OperatorSpec.naive,
        "lb": OperatorSpec.laplace_beltrami,
        "conformal": OperatorSpec.conformal_lb,
    }
    if args.spec == "power":
        return OperatorSpec.power(args.alpha, args.beta)
    return kinds[args.spec]()


def cmd_potential(args):
    metric = _metric(args.metric)
    spec = _spec_from_args(args)
    pts = _points(metric, args.points, args.seed)
    reports = effective_potential_batch(spec, metric, pts, _cfg(args), args.method)
    drift = max(float(np.abs(r.drift).max()) for r in reports)
    tol = args.tol if args.tol is not None else 1e-8
    checks = []
    drift_free = spec.kind in ("LaplaceBeltrami", "ConformalLB") or (
        spec.kind == "PowerOrdering" and abs(spec.alpha + 2 * spec.beta) < 1e-15
    )
    if drift_free:
        checks.append(_check("drift", drift, tol))
    result = {"spec": spec.to_dict(), "reports": [r.to_dict() for r in reports], "max_drift": drift}
    try:
        C, resid = fit_constant(reports)
        result.update(fitted_C=C, fit_residual=resid)
        if args.expect_c is not None:
            checks.append(_check("fitted_C", abs(C - args.expect_c), args.tol or 1e-4))
    except ValueError:
        result.update(fitted_C=None, fit_residual=None)
    return checks, result, reports_to_csv(reports)


def cmd_exponents(args):
    n = args.n
    label = args.metric or f"conf-gauss:{n}:0.25"
    metric = _metric(label)
    if metric.dimension != n:
        raise CliError(f"metric {label} has dimension {metric.dimension}, expected {n}")
    pts = _points(metric, args.points, args.seed)
    rep = verify_two_solutions(n, metric, pts, _cfg(args))
    sols = solve_exponents(n)
    beta_tol = args.tol if args.tol is not None else 1e-8
    checks = [
        _check("root_count", abs(rep.root_count - 2), 0),
        _check("drift_condition", 0.0, 0.0, rep.drift_condition_checked),
    ]
    for sol in sols:
        b, c = float(sol.beta_tilde), float(sol.C)
        near = min(rep.roots, key=lambda r: abs(r["beta"] - b))
        checks.append(_check(f"beta[{sol.kind}]", abs(near["beta"] - b), beta_tol))
        checks.append(_check(f"C[{sol.kind}]", abs(near["fitted_C"] - c), 1e-4))
    result = rep.to_dict()
    result["exact"] = [
        {"alpha": str(s.alpha_tilde), "beta": str(s.beta_tilde), "C": str(s.C), "kind": s.kind} for s in sols
    ]
    return checks, result, result["roots"]


def _int_list(text: str):
    try:
        out = []
        for tok in text.split(","):
            if "-" in tok.strip()[1:]:
                lo, hi = tok.split("-")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(tok))
        return out
    except ValueError:
        raise CliError(f"malformed range {text!r}") from None


def cmd_hydrogen(args):
    if args.n_max < 1:
        raise CliError("--n-max must be >= 1")
    ms = _int_list(args.m)
    table = spectrum_table(args.n_max, ms, args.grid)
    tol = args.tol if args.tol is not None else 1e-5
    s_dev = max(
        abs(r.E_closed - standard_energy(r.n)) for r in table.rows if r.l == 0 and r.m == 0
    ) if 0 in ms else 0.0
    checks = [
        _check("closed_vs_eigensolver", table.max_abs_err(), tol),
        _check("s_states_equal_bohr", s_dev, 0.0),
    ]
    return checks, {"rows": json.loads(table.to_json())}, table.to_csv()


def cmd_rank(args):
    fam = metric_family(args.family)
    rep = rank_report(fam, args.points, _cfg(args), args.seed)
    checks = [_check("rank", abs(rep.rank - args.expect), 0)]
    return checks, rep.to_dict(), [{"singular_value": s} for s in rep.singular_values]


def cmd_identities(args):
    metric = _metric(args.metric)
    tol = args.tol if args.tol is not None else TOLERANCES.matrix_identity
    reps = [verify_matrix_identities(metric_jet(metric, p, _cfg(args)), label=metric.label) for p in _points(metric, args.points, args.seed)]
    worst = max(r.max_deviation for r in reps)
    return [_check("max_deviation", worst, tol)], {"reports": [r.to_dict() for r in reps]}, [r.to_dict() for r in reps]


def cmd_oscillator(args):
    w = args.omega
    op = build_operator(oscillator_ordering(w), get_metric("euclidean:1"))
    xs = np.linspace(-2.0, 2.0, args.points)
    one = ScalarField.constant(1)
    ground = ScalarField.from_expression(f"exp(-{w!r}*x0**2/2)", 1)
    rows = []
    for x in xs:
        v1 = 0.5 * apply_operator(op, one, [x])
        v2 = 0.5 * apply_operator(op, ground, [x])
        rows.append(
            {
                "x": float(x),
                "H_one": v1,
                "expected_one": 0.5 * w * w * x * x + 0.5 * w,
                "H_ground": v2,
                "expected_ground": w * float(ground([x])),
            }
        )
    tol = args.tol if args.tol is not None else 1e-6
    checks = [
        _check("potential", max(abs(r["H_one"] - r["expected_one"]) for r in rows), tol),
        _check("ground_state", max(abs(r["H_ground"] - r["expected_ground"]) for r in rows), tol),
    ]
    return checks, {"omega": w, "rows": rows}, rows


COMMANDS = {
    "curvature": cmd_curvature,
    "potential": cmd_potential,
    "exponents": cmd_exponents,
    "hydrogen": cmd_hydrogen,
    "rank": cmd_rank,
    "identities": cmd_identities,
    "oscillator": cmd_oscillator,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=float, default=None, help="override the main check tolerance")
    common.add_argument("--out", default=None, help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--points", type=int, default=None)

    parser = argparse.ArgumentParser(prog="ordlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curvature", parents=[common], help="curvature formula audit")
    p.add_argument("--metric", default="euclidean:3")
    p.add_argument("--numeric", action="store_true", help="drop closed-form metric partials")

    p = sub.add_parser("potential", parents=[common], help="effective potential batch")
    p.add_argument("--metric", default="conf-gauss:3:0.25")
    p.add_argument("--spec", choices=("naive", "lb", "conformal", "power"), default="power")
    p.add_argument("--alpha", type=float, default=-1 / 6)
    p.add_argument("--beta", type=float, default=1 / 12)
    p.add_argument("--method", choices=("auto", "coefficients", "nested"), default="auto")
    p.add_argument("--expect-c", type=float, default=None)

    p = sub.add_parser("exponents", parents=[common], help="exponent solutions and root search")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--metric", default=None)

    p = sub.add_parser("hydrogen", parents=[common], help="naive-ordering hydrogen spectrum")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--m", default="0", help="magnetic numbers, e.g. 0,1 or 0-2")
    p.add_argument("--grid", type=int, default=4000)

    p = sub.add_parser("rank", parents=[common], help="seven-term independence rank")
    p.add_argument("--family", default="poly-square:3:1-4:0.3")
    p.add_argument("--expect", type=int, default=7)

    p = sub.add_parser("identities", parents=[common], help="matrix contraction identities")
    p.add_argument("--metric", default="stereo-sphere:3:1")

    p = sub.add_parser("oscillator", parents=[common], help="similarity-ordering oscillator")
    p.add_argument("--omega", type=float, default=1.0)
    return parser


_DEFAULT_POINTS = {"curvature": 10, "potential": 10, "exponents": 5, "hydrogen": 0, "rank": 5, "identities": 5, "oscillator": 10}


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not serializable: {type(obj)}")


def _table(report) -> str:
    lines = [f"{report['command']}: {'PASS' if report['pass'] else 'FAIL'}"]
    for c in report["checks"]:
        lines.append(f"  {'ok ' if c['pass'] else 'BAD'} {c['name']:<28} {c['value']:.3e} (tol {c['tolerance']:.1e})")
    return "\n".join(lines) + "\n"


def _rows_csv(rows) -> str:
    import csv
    import io

    if isinstance(rows, str):
        return rows
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v, default=_jsonable) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


def run(argv=None, now=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.points is None:
        args.points = _DEFAULT_POINTS[args.command]
    # the output path does not belong in the body; reports must not depend on it
    config = {k: v for k, v in sorted(vars(args).items()) if k != "out"}
    config["tolerances"] = TOLERANCES.to_dict()
    config["diff"] = DiffConfig().to_dict()
    try:
        checks, result, rows = COMMANDS[args.command](args)
    except (CliError, ValueError) as exc:
        print(f"ordlab: error: {exc}", file=sys.stderr)
        return 2
    ok = all(c["pass"] for c in checks)
    report = {
        "command": args.command,
        "config": config,
        "checks": checks,
        "pass": ok,
        "failures": [c["name"] for c in checks if not c["pass"]],
        "result": result,
        "timestamp": (now or _dt.datetime.now(_dt.timezone.utc)).isoformat(),
    }
    if args.format == "json":
        body = json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n"
    elif args.format == "csv":
        body = _rows_csv(rows)
    else:
        body = _table(report)
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(body)
        except OSError as exc:
            print(f"ordlab: error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
        if args.format != "json" and not ok:
            print(json.dumps({"failures": report["failures"]}), file=sys.stderr)
    else:
        sys.stdout.write(body)
    return 0 if ok else 1


def main():
    sys.exit(run())
