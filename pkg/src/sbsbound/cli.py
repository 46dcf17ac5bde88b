"""Command-line interface: ``sbsbound {validate, sweep, discriminate, oracle}``.

Exit codes: 0 success, 1 invalid input, 2 a checked inequality failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from pathlib import Path

import numpy as np

from . import linalg as la
from .bounds import CHAIN_TOL, BoundReport, theorem4_bound
from .dynamics import reduced_state
from .errors import DegeneracyError, DimensionLimitError, ValidationError
from .gram import flatten_mixed, theorem3_bound, theorem5_bound
from .oracles import DEFAULT_GRID_STEPS, full_evolution_oracle, qubit_pvm_grid_search
from .qsd import Ensemble, helstrom_error, is_vacuous, knill_barnum_upper, montanaro_lower
from .scenario import EnsembleSpec, Scenario

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION = 0, 1, 2

CSV_COLUMNS = [
    "t",
    "gamma_term",
    "gram_term",
    "total_bound",
    "measured_unnormalized",
    "measured_sbs",
    "conjectured",
    "normalizer_N",
    "flags",
]

LIMITATION = (
    "Long-time decay of the decoherence factor is not established here. "
    "For finite-dimensional environments |gamma(t)| is almost periodic, "
    "so only its empirical envelope over the sampled times is reported."
)


def _fmt(v) -> str:
    if v is None:
        return ""
    return format(float(v), ".17g")


def _json_float(v):
    return None if v is None else float(v)


def _dump(obj, path: Path):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _report(model, strategy, cap, tol, t):
    return theorem4_bound(model, t, strategy=strategy, verify=False, cap=cap, tol=tol)


def run_sweep(sc: Scenario, cap: int, tol: float, threads: int = 1) -> list[BoundReport]:
    """Bound reports in time order; points are independent, so they may run on a thread pool."""
    fn = partial(_report, sc.model, sc.strategy, cap, tol)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, sc.times))
    return [fn(t) for t in sc.times]


def write_sweep(sc: Scenario, reports: list[BoundReport], out: Path, tol: float) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    if "csv" in sc.outputs:
        _write_csv(reports, out / "sweep.csv")
    summary = _summary(sc, reports, tol)
    if "summary" in sc.outputs:
        _dump(summary, out / "summary.json")
    return summary


def _write_csv(reports, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in reports:
            w.writerow(
                [
                    _fmt(r.t),
                    _fmt(r.gamma_term),
                    _fmt(r.gram_term),
                    _fmt(r.total_bound),
                    _fmt(r.measured_unnormalized),
                    _fmt(r.measured_sbs),
                    _fmt(r.conjectured),
                    _fmt(r.normalizer),
                    ";".join(r.flags),
                ]
            )


def _summary(sc, reports, tol):
    slacks = [r.min_slack for r in reports if r.min_slack is not None]
    gammas = np.array([r.gamma_term for r in reports])
    tail = gammas[len(gammas) // 2 :]
    summary = {
        "scenario": sc.name,
        "n_times": len(reports),
        "min_slack": _json_float(min(slacks)) if slacks else None,
        "max_violation": _json_float(max(0.0, -min(slacks))) if slacks else None,
        "violations": sum(1 for s in slacks if s < -tol),
        "min_normalizer": _json_float(min(r.normalizer for r in reports)),
        "degeneracy_events": [
            {"t": _json_float(r.t), "flags": [f for f in r.flags if f.startswith("degenerate")]}
            for r in reports
            if any(f.startswith("degenerate") for f in r.flags)
        ],
        "vacuous_points": sum(1 for r in reports if "vacuous_bound" in r.flags),
        "conjecture_violations": sum(1 for r in reports if r.conjecture_holds is False),
        "unmeasured_points": sum(1 for r in reports if r.measured_unnormalized is None),
        "gamma_envelope": {
            "min": _json_float(gammas.min()),
            "max": _json_float(gammas.max()),
            "mean": _json_float(gammas.mean()),
            "late_half_max": _json_float(tail.max()),
        },
        "limitation": LIMITATION,
        "tolerance": tol,
        "strategy": sc.strategy,
    }
    return summary


def cmd_validate(args) -> int:
    sc = Scenario.load(args.scenario, args.seed)
    m = sc.model
    dim = int(np.prod(m.observed_dims))
    print(f"scenario      {sc.name}")
    print(f"system dim    {m.d_s}")
    print(f"environments  {[e.dim for e in m.environments]} ({m.n_observed} observed)")
    print(f"mixed         {[not e.is_pure for e in m.observed]}")
    print(f"times         {len(sc.times)} in [{sc.times.min():g}, {sc.times.max():g}]")
    print(f"observed dim  {dim} (cap {args.cap}, {'measurable' if dim <= args.cap else 'bounds only'})")
    if m.degenerate_pairs:
        print(f"warning       degenerate X eigenvalues at {m.degenerate_pairs}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    sc = Scenario.load(args.scenario, args.seed)
    threads = args.threads or os.cpu_count() or 1
    reports = run_sweep(sc, args.cap, args.tol, threads)
    summary = write_sweep(sc, reports, Path(args.output), args.tol)
    print(
        f"{sc.name}: {summary['n_times']} points, min slack {summary['min_slack']}, "
        f"{summary['violations']} violations, {len(summary['degeneracy_events'])} degenerate"
    )
    return EXIT_VIOLATION if summary["violations"] else EXIT_OK


def discrimination_summary(es: EnsembleSpec, tol: float = CHAIN_TOL) -> dict:
    e = Ensemble(es.weights, es.states)
    out = {
        "n_states": len(e),
        "dim": e.dim,
        "montanaro_lower": montanaro_lower(e),
        "knill_barnum_upper": knill_barnum_upper(e),
    }
    out["knill_barnum_vacuous"] = is_vacuous(out["knill_barnum_upper"])
    if len(e) == 2:
        out["helstrom"] = helstrom_error(e.weights[0], e.states[0], e.weights[1], e.states[1])
    gram = None
    try:
        if es.all_pure:
            res = theorem3_bound((e.weights, [c[1][0] for c in es.components]))
            gram = {"kind": "theorem3", "bound": res.bound, "achieved": res.achieved}
        elif es.has_components:
            mi = flatten_mixed(
                [(p, list(zip(c[0], c[1]))) for p, c in zip(e.weights, es.components)]
            )
            res = theorem5_bound(mi)
            gram = {
                "kind": "theorem5",
                "bound": res.bound,
                "achieved": res.achieved,
                "first_term": res.first_term,
                "cross_term": res.cross_term,
                "coarse_unverified": res.coarse,
            }
    except DegeneracyError as exc:
        out["gram_error"] = {"dependent_index": exc.index, "message": str(exc)}
    out["gram"] = gram
    if e.dim == 2 and len(e) == 2:
        g = qubit_pvm_grid_search(e, es.grid_steps or DEFAULT_GRID_STEPS)
        out["grid_oracle"] = {"value": g.value, "argmin": list(g.argmin), "slack": g.slack}
    checks = [out["montanaro_lower"] <= out.get("helstrom", np.inf) + tol]
    if gram is not None:
        checks.append(gram["achieved"] <= gram["bound"] + tol)
        if "helstrom" in out:
            checks.append(out["helstrom"] <= gram["achieved"] + tol)
        if "grid_oracle" in out:
            checks.append(out["grid_oracle"]["value"] - out["grid_oracle"]["slack"] <= gram["achieved"] + tol)
    out["ordering_holds"] = bool(all(checks))
    return out


def cmd_discriminate(args) -> int:
    es = EnsembleSpec.load(args.ensemble, args.seed)
    res = discrimination_summary(es, args.tol)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    _dump(res, out / "discrimination.json")
    print(json.dumps(res, indent=2, sort_keys=True))
    if "gram_error" in res:
        print(f"error: {res['gram_error']['message']}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK if res["ordering_holds"] else EXIT_VIOLATION


def cmd_oracle_grid(args) -> int:
    es = EnsembleSpec.load(args.ensemble, args.seed)
    steps = args.steps or es.grid_steps or DEFAULT_GRID_STEPS
    e = Ensemble(es.weights, es.states)
    res = qubit_pvm_grid_search(e, steps)
    out = {"value": res.value, "argmin": list(res.argmin), "step": res.step, "slack": res.slack, "steps": steps}
    ok = True
    if es.all_pure:
        try:
            g = theorem3_bound((e.weights, [c[1][0] for c in es.components]))
            out["gram_achieved"] = g.achieved
            out["gram_bound"] = g.bound
            ok = res.value - res.slack <= g.achieved + args.tol
        except DegeneracyError as exc:
            out["gram_error"] = {"dependent_index": exc.index, "message": str(exc)}
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_oracle_evolve(args) -> int:
    sc = Scenario.load(args.scenario, args.seed)
    times = sc.times if args.t is None else np.array(args.t)
    worst = 0.0
    for t in times:
        d = la.trace_distance(reduced_state(sc.model, t).assemble(args.cap), full_evolution_oracle(sc.model, t, args.cap))
        worst = max(worst, d)
    print(json.dumps({"n_times": len(times), "max_trace_distance": worst}, indent=2))
    return EXIT_OK if worst <= args.tol else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=la.DEFAULT_CAP, help="largest dense dimension to assemble")
    common.add_argument("--tol", type=float, default=CHAIN_TOL, help="tolerance for inequality checks")
    common.add_argument("--seed", type=int, default=None, help="override the file-level seed")

    p = argparse.ArgumentParser(prog="sbsbound", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="parse and describe a scenario")
    v.add_argument("scenario")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("sweep", parents=[common], help="bounds and distances over a time grid")
    s.add_argument("scenario")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--threads", type=int, default=None, help="worker threads (default: CPU count)")
    s.set_defaults(func=cmd_sweep)

    d = sub.add_parser("discriminate", parents=[common], help="discrimination bounds for an ensemble")
    d.add_argument("ensemble")
    d.add_argument("-o", "--output", required=True)
    d.set_defaults(func=cmd_discriminate)

    o = sub.add_parser("oracle", help="brute-force references")
    osub = o.add_subparsers(dest="oracle", required=True)
    g = osub.add_parser("grid", parents=[common], help="qubit PVM grid search")
    g.add_argument("ensemble")
    g.add_argument("--steps", type=int, default=None)
    g.set_defaults(func=cmd_oracle_grid)
    e = osub.add_parser("evolve", parents=[common], help="full-space evolution versus factored state")
    e.add_argument("scenario")
    e.add_argument("--t", type=float, nargs="+", default=None)
    e.set_defaults(func=cmd_oracle_evolve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return args.func(args)
    except (ValidationError, DimensionLimitError, DegeneracyError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
