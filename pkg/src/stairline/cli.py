"""Command-line interface: ``stairline {types,eval,maximize,verify,report}``.

Exit codes: 0 success, 1 usage or input error, 2 verification failure,
3 budget or resource limit.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import reference as ref
from .diagonal import diag3_catalog, fsd, theorem2_path
from .errors import BudgetError, StairlineError
from .grid import PathType, enumerate_types, grid_objective, recfsg
from .optimize import (
    METHODS,
    THREADS_ENV,
    OptProblem,
    default_budget,
    fsl_problem,
    maximize,
    maximize_all_types,
)
from .targets import CRITERIA, CRITERION_DIM
from .transference import (
    build_stretched,
    mc_estimate_fsd,
    mc_estimate_recfsg,
    sandwich_point,
    stab_census,
    transference_mismatches,
)

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    pass


def _number(text: str):
    """Parse ``0.5``, ``1/2`` or ``3``; fractions and integers stay exact."""
    text = text.strip()
    try:
        if "/" in text or "." not in text and "e" not in text.lower():
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def _coords(text: str, d: int, name: str) -> tuple:
    vals = tuple(_number(t) for t in text.split(",") if t.strip())
    if len(vals) != d:
        raise UsageError(f"--{name} has {len(vals)} coordinates, expected {d}")
    return vals


def _num_json(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return float(x)


def run_record(command, dim, family, type_, method, seed, value, q, p,
               evaluations=0, wall_ms=0.0, exact=None) -> dict:
    rec = {
        "command": command,
        "dim": dim,
        "family": family,
        "type": type_,
        "method": method,
        "seed": seed,
        "value": float(value),
        "argmax_q": [_num_json(v) for v in q] if q is not None else None,
        "argmax_p": [_num_json(v) for v in p] if p is not None else None,
        "evaluations": int(evaluations),
        "wall_ms": float(wall_ms),
        "tool_version": __version__,
    }
    if exact is not None:
        rec["exact"] = str(exact)
    return rec


def dumps(obj) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(obj, default=_json_default, allow_nan=False)


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "item"):
        return o.item()
    return str(o)


def _emit(records, out):
    lines = [dumps(r) for r in records]
    if out:
        with open(out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))


# commands

def cmd_types(args) -> int:
    if args.dim < 2:
        raise UsageError("--dim must be at least 2")
    labels = [T.label() for T in enumerate_types(args.dim)]
    print(json.dumps(labels) if args.json else "\n".join(labels))
    return EXIT_OK


def cmd_eval(args) -> int:
    d = args.dim
    if args.family == "diag" and args.theorem2:
        q, p = theorem2_path(d)
    else:
        if args.q is None or args.p is None:
            raise UsageError("--q and --p are required (or --theorem2 for the diagonal family)")
        q, p = _coords(args.q, d, "q"), _coords(args.p, d, "p")
    if args.family == "grid":
        value = recfsg(q, p) / math.factorial(d)
        rec = run_record("eval", d, "grid", PathType.of(q, p).label(), None, None, value, q, p)
    else:
        value = fsd(q, p)
        rec = run_record("eval", d, "diagonal_theorem2", None, None, None, value, q, p)
    if isinstance(value, Fraction):
        rec["exact"] = str(value)
    _emit([rec], None)
    return EXIT_OK


def cmd_maximize(args) -> int:
    fam, d = args.family, args.dim
    if fam == "diag3":
        d = 3 if d is None else d
    if d is None:
        raise UsageError("--dim is required for this family")
    budget = args.budget if args.budget is not None else default_budget(fam, d)
    records = []
    if fam == "fsl":
        r = maximize(fsl_problem(d), args.method, args.seed, budget, args.threads)
        records.append(run_record("maximize", d, "fsl", None, args.method, args.seed, r.value,
                                  r.argmax, None, r.evaluations, r.wall_time))
    elif args.type is not None:
        if fam == "grid":
            spec = grid_objective(d, PathType.parse(d, args.type))
            r = maximize(OptProblem.from_spec(spec), args.method, args.seed, budget, args.threads)
            q, p = spec.points(r.argmax)
            label = spec.type.label()
        else:
            fid = int(args.type.lstrip("Ff"))
            f = next((f for f in diag3_catalog() if f.id == fid), None)
            if f is None:
                raise UsageError(f"no diagonal objective F{fid}; ids run 1..15")
            r = maximize(OptProblem(f.evaluate, f.bounds, f.evaluate_batch),
                         args.method, args.seed, budget, args.threads)
            q, p = f.points(r.argmax)
            label = f"F{fid}"
        records.append(run_record("maximize", d, fam, label, args.method, args.seed, r.value,
                                  q, p, r.evaluations, r.wall_time))
    else:
        sw = maximize_all_types(d, fam, args.method, args.seed, budget, args.threads,
                                allow_high_dim=args.allow_high_dim)
        for row in sw.rows:
            records.append(run_record("maximize", d, fam, row.label, args.method, args.seed,
                                      row.result.value, row.q, row.p,
                                      row.result.evaluations, row.result.wall_time))
    _emit(records, args.out)
    if len(records) > 1:
        best = max(records, key=lambda r: r["value"])
        print(f"# overall maximum {best['value']!r} at type {best['type']}", file=sys.stderr)
    return EXIT_OK


_DEFAULT_SEGMENTS = {
    2: ref.CENSUS_D2_SEGMENT,
    3: ((1, 1, Fraction(4, 5)), (Fraction(1, 2), Fraction(1, 2), 0)),
}


def _segment(args, d):
    if args.q is not None and args.p is not None:
        return _coords(args.q, d, "q"), _coords(args.p, d, "p")
    if d not in _DEFAULT_SEGMENTS:
        raise UsageError(f"no default segment for d={d}; pass --q and --p")
    return _DEFAULT_SEGMENTS[d]


def cmd_verify(args) -> int:
    d = args.dim
    if args.mode == "mc":
        if args.family == "diag" and args.q is None:
            q, p = theorem2_path(d)
        else:
            q, p = _segment(args, d)
        qf, pf = tuple(map(float, q)), tuple(map(float, p))
        if args.family == "grid":
            exact = recfsg(q, p)
            est, se = mc_estimate_recfsg(qf, pf, args.samples, args.seed)
        else:
            exact = math.factorial(d) * fsd(q, p)
            est, se = mc_estimate_fsd(qf, pf, args.samples, args.seed)
        sig = abs(est - float(exact)) / se if se > 0 else (0.0 if est == exact else math.inf)
        report = {"mode": "mc", "family": args.family, "dim": d, "samples": args.samples,
                  "seed": args.seed, "estimate": est, "std_error": se,
                  "exact": float(exact), "sigmas": sig, "passed": sig <= 4.0}
    elif args.mode == "census":
        size = args.size or 3
        s = build_stretched("grid", d, size)
        u, v = _segment(args, d)
        c = stab_census(s, sandwich_point(s, u), sandwich_point(s, v))
        golden = ref.CENSUS_GOLDEN.get((d, size)) if args.q is None else None
        target = recfsg(u, v)
        report = {"mode": "census", "dim": d, "size": size, "stabbed": c.stabbed,
                  "total": c.total_simplices, "fraction": str(c.fraction),
                  "recfsg": float(target), "error": float(abs(c.fraction - target))}
        if golden is not None:
            report["golden"] = f"{golden[0]}/{golden[1]}"
            report["passed"] = (c.stabbed, c.total_simplices) == golden
        else:
            report["tolerance"] = 0.35 / size
            report["passed"] = report["error"] <= 0.35 / size
    else:
        size = args.size or 4
        s = build_stretched("grid", d, size, spread=4)
        mism, hits = transference_mismatches(s, args.trials, args.seed)
        report = {"mode": "transference", "dim": d, "size": size, "trials": args.trials,
                  "seed": args.seed, "mismatches": mism, "stabbed": hits, "passed": mism == 0}
    print(dumps(report))
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def _write_table(path: Path, rows: list) -> None:
    if not rows:
        return
    with open(path, "w", newline="") as fh:
        if "q" in rows[0]:
            d = len(rows[0]["q"])
            w = csv.writer(fh)
            w.writerow(["type"] + [f"q{i}" for i in range(1, d + 1)]
                       + [f"p{i}" for i in range(1, d + 1)] + ["value", "evaluations"])
            for r in rows:
                w.writerow([r["type"], *map(repr, r["q"]), *map(repr, r["p"]),
                            repr(r["value"]), r["evaluations"]])
        else:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)


def cmd_report(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    chosen = sorted(args.criteria) if args.criteria else sorted(CRITERIA)
    summary = {"tool_version": __version__, "seed": args.seed, "criteria": [], "bounds": []}
    all_ok = True
    for n in chosen:
        if CRITERION_DIM.get(n, 0) > args.max_dim:
            summary["criteria"].append({"number": n, "status": "skipped"})
            continue
        try:
            kwargs = {"seed": args.seed} if "seed" in CRITERIA[n].__code__.co_varnames else {}
            res = CRITERIA[n](**kwargs)
        except (StairlineError, ArithmeticError) as exc:
            # sub-run failures are recorded, not fatal
            summary["criteria"].append({"number": n, "status": "error", "error": str(exc)})
            all_ok = False
            print(f"[FAIL] criterion {n}: {exc}")
            continue
        print(res.line())
        all_ok &= res.passed
        summary["criteria"].append({"number": n, "title": res.title,
                                    "status": "pass" if res.passed else "fail",
                                    "seconds": res.seconds, "details": res.details})
        for name, rows in res.tables.items():
            _write_table(out / f"{name}.csv", rows)
            if name.startswith("grid_d"):
                best = max(rows, key=lambda r: r["value"])
                summary["bounds"].append(
                    f"c_{{{name[-1]},1}} <= {best['value']!r} (stretched grid, type {best['type']})")
            if name == "diag_d3":
                summary["bounds"].append("c_{3,1} <= 1/25 (stretched diagonal)")
    with open(out / "summary.json", "w") as fh:
        fh.write(json.dumps(summary, indent=2, default=_json_default) + "\n")
    return EXIT_OK if all_ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="stairline", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("types", help="list normalized path types")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_types)

    p = sub.add_parser("eval", help="evaluate a stabbing formula")
    p.add_argument("--family", choices=("grid", "diag"), required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--q")
    p.add_argument("--p")
    p.add_argument("--theorem2", action="store_true", help="use the explicit diagonal path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("maximize", help="maximize per type or a single type")
    p.add_argument("--family", choices=("grid", "diag3", "fsl"), required=True)
    p.add_argument("--dim", type=int)
    p.add_argument("--type", help="path type like {2,3}, or F7 for diag3")
    p.add_argument("--method", choices=METHODS, default="de")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int)
    p.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.add_argument("--allow-high-dim", action="store_true", help="permit grid runs with d > 6")
    p.add_argument("--out", help="also write the JSON lines here")
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("verify", help="Monte Carlo, census or transference checks")
    p.add_argument("--mode", choices=("mc", "census", "transference"), required=True)
    p.add_argument("--family", choices=("grid", "diag"), default="grid")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--size", type=int)
    p.add_argument("--q")
    p.add_argument("--p")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--trials", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="run the reproduction suite and write tables")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-dim", type=int, default=6)
    p.add_argument("--criteria", type=lambda s: [int(t) for t in s.split(",")],
                   help="comma-separated criterion numbers (default all)")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"stairline: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, StairlineError) as exc:
        extra = f" [violated: {exc.inequality}]" if hasattr(exc, "inequality") else ""
        print(f"stairline: error: {exc}{extra}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
