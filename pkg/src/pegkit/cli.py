"""Command-line front end.

Subcommands: gen, erase, test-conn, estimate, exact, bench. Runs are fully
determined by their arguments: per-trial seeds are split from the master
seed by trial index, so identical invocations produce byte-identical
output files (wall-time recording is opt-in via --timings because it is
the one nondeterministic field). Exit codes: 0 ok, 1 self-check violation, 2 usage or infeasible
input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

from . import avg_degree, connectedness, exact, instances
from .graph import load_peg, save_peg, validate
from .oracle import split_seed

TRIAL_COLUMNS = [
    "trial",
    "seed",
    "result",
    "value",
    "witness_kind",
    "degree_queries",
    "neighbor_queries",
    "wall_ms",
]


def _ratio(text):
    """Parse a rational given as 'p/q' or a decimal string."""
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(text)


def _write_rows(path, rows, fmt, summary=None, plan=None):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=TRIAL_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: r.get(k, "") for k in TRIAL_COLUMNS})
        text = buf.getvalue()
    else:
        payload = {"plan": plan, "trials": rows}
        if summary is not None:
            payload["summary"] = summary
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _quantiles(values):
    if not values:
        return {}
    vs = sorted(values)

    def q(p):
        return vs[min(len(vs) - 1, int(p * len(vs)))]

    return {"min": vs[0], "p50": q(0.5), "p90": q(0.9), "max": vs[-1]}


def _load_graph(args):
    try:
        return load_peg(args.graph)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read graph: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _resolve_davg(args, g):
    if args.davg in (None, "auto"):
        return g.avg_degree
    davg = float(_ratio(args.davg))
    if abs(davg - g.avg_degree) > 1e-9:
        print(
            f"warning: supplied davg {davg} differs from the graph's {g.avg_degree}; "
            "proceeding with the supplied value",
            file=sys.stderr,
        )
    return davg


def cmd_gen(args):
    params = {}
    for key in ("eps", "alpha", "davg"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = _ratio(val)
    for key in ("k", "n", "host_size", "cycle_len"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if args.strategy:
        params["strategy"] = args.strategy
    if "davg" in params:
        params["davg"] = float(params["davg"])
    spec = instances.FamilySpec(args.family, params, args.seed)
    try:
        g, manifest = instances.generate(spec)
    except instances.InfeasibleParameters as exc:
        print(f"error: infeasible parameters: {exc}", file=sys.stderr)
        return 2
    save_peg(g, args.out)
    if args.manifest:
        with open(args.manifest, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"wrote {args.out}: n={g.num_vertices} m={g.num_edges} erased={g.erased_total}")
    return 0


def cmd_erase(args):
    g = _load_graph(args)
    try:
        h = instances.erase(g, float(_ratio(args.alpha)), args.strategy, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    save_peg(h, args.out)
    print(f"wrote {args.out}: erased={h.erased_total} of {h.num_entries} entries")
    return 0


_ALGOS = {
    "small-alpha": lambda g, eps, alpha, davg, seed: connectedness.tester_small_alpha(
        g, connectedness.ConnTesterConfig(eps, alpha, davg, seed)
    ),
    "mid-alpha": lambda g, eps, alpha, davg, seed: connectedness.tester_mid_alpha(
        g, connectedness.ConnTesterConfig(eps, alpha, davg, seed)
    ),
    "no-erasure": lambda g, eps, alpha, davg, seed: connectedness.tester_no_erasures(
        g, connectedness.ConnTesterConfig(eps, alpha, davg, seed)
    ),
    "unknown-davg": lambda g, eps, alpha, davg, seed: connectedness.tester_unknown_davg(
        g, eps, seed, alpha
    ),
}


def _run_conn_trials(g, algo, eps, alpha, davg, master_seed, trials, timings=False):
    rows = []
    rejections = 0
    for trial in range(trials):
        seed = split_seed(master_seed, trial)
        t0 = time.perf_counter()
        try:
            verdict = _ALGOS[algo](g, eps, alpha, davg, seed)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            raise SystemExit(2)
        wall = (time.perf_counter() - t0) * 1000
        if verdict.rejected:
            rejections += 1
        rows.append(
            {
                "trial": trial,
                "seed": seed,
                "result": "reject" if verdict.rejected else "accept",
                "value": "",
                "witness_kind": verdict.witness.kind if verdict.witness else "",
                "degree_queries": verdict.degree_queries,
                "neighbor_queries": verdict.neighbor_queries,
                "wall_ms": round(wall, 3) if timings else None,
            }
        )
    return rows, rejections


def cmd_test_conn(args):
    g = _load_graph(args)
    davg = _resolve_davg(args, g)
    eps = float(_ratio(args.eps))
    alpha = float(_ratio(args.alpha))
    rows, rejections = _run_conn_trials(
        g, args.algo, eps, alpha, davg, args.seed, args.trials, args.timings
    )
    totals = [r["degree_queries"] + r["neighbor_queries"] for r in rows]
    summary = {
        "trials": args.trials,
        "rejection_frequency": rejections / args.trials if args.trials else 0.0,
        "total_queries": _quantiles(totals),
    }
    plan = {
        "command": "test-conn",
        "graph": args.graph,
        "algo": args.algo,
        "eps": eps,
        "alpha": alpha,
        "davg": davg,
        "trials": args.trials,
        "seed": args.seed,
    }
    _write_rows(args.out, rows, args.format, summary, plan)
    return 0


def cmd_estimate(args):
    g = _load_graph(args)
    eps = float(_ratio(args.eps))
    rows = []
    values = []
    for trial in range(args.trials):
        seed = split_seed(args.seed, trial)
        t0 = time.perf_counter()
        est = avg_degree.estimate_avg_degree(
            g,
            eps,
            seed=seed,
            sample_coeff=args.sample_coeff,
            rep_coeff=args.rep_coeff,
        )
        wall = (time.perf_counter() - t0) * 1000
        values.append(est.value)
        rows.append(
            {
                "trial": trial,
                "seed": seed,
                "result": "estimate",
                "value": est.value,
                "witness_kind": "",
                "degree_queries": est.degree_queries,
                "neighbor_queries": est.neighbor_queries,
                "wall_ms": round(wall, 3) if args.timings else None,
            }
        )
    conforming = (
        args.sample_coeff == avg_degree.SAMPLE_COEFF and args.rep_coeff == avg_degree.REP_COEFF
    )
    if not conforming:
        print(
            "note: coefficient overrides in effect; results are non-conforming",
            file=sys.stderr,
        )
    summary = {
        "trials": args.trials,
        "true_avg_degree": g.avg_degree,
        "estimates": _quantiles(values),
        "conforming": conforming,
    }
    plan = {
        "command": "estimate",
        "graph": args.graph,
        "eps": eps,
        "trials": args.trials,
        "seed": args.seed,
        "sample_coeff": args.sample_coeff,
        "rep_coeff": args.rep_coeff,
    }
    _write_rows(args.out, rows, args.format, summary, plan)
    return 0


def cmd_exact(args):
    g = _load_graph(args)
    if args.what == "validate":
        violations = validate(g)
        for v in violations:
            print(f"{v.code} at {v.subject}: {v.detail}")
        print("ok" if not violations else f"{len(violations)} violations")
        return 0 if not violations else 1
    if args.what == "distance-conn":
        try:
            d = exact.distance_to_connectedness(g, slot_bound=args.slot_bound)
        except exact.Uncompletable:
            print("error: graph has no completion", file=sys.stderr)
            return 2
        print(f"{d.numerator}/{d.denominator}")
        return 0
    if args.what == "witnesses":
        inv = exact.inventory_witnesses(g)
        out = {
            "plain": [sorted(c) for c in inv.plain],
            "generalized": [
                {"vertices": sorted(c), "anchors": sorted(a)} for c, a in inv.generalized
            ],
        }
        print(json.dumps(out, indent=2))
        return 0
    if args.what == "exp-chi":
        if args.dhat is None or args.eps is None:
            print("error: exp-chi needs --dhat and --eps", file=sys.stderr)
            return 2
        value = exact.exact_exp_chi(g, _ratio(args.dhat), _ratio(args.eps))
        print(f"{value.numerator}/{value.denominator}")
        return 0
    if args.what == "report":
        dhat = _ratio(args.dhat) if args.dhat else None
        eps = _ratio(args.eps) if args.eps else None
        report = exact.exact_report(g, dhat, eps, slot_bound=args.slot_bound)
        print(json.dumps(report.to_dict(), indent=2))
        return 0
    print(f"error: unknown query {args.what!r}", file=sys.stderr)
    return 2


def cmd_bench(args):
    g = _load_graph(args)
    param, _, values = args.sweep.partition("=")
    if param not in ("eps", "alpha", "n") or not values:
        print("error: --sweep must look like eps=0.1,0.2", file=sys.stderr)
        return 2
    rows = []
    for value in values.split(","):
        sweep_g = g
        eps = float(_ratio(args.eps))
        alpha = float(_ratio(args.alpha))
        if param == "eps":
            eps = float(_ratio(value))
        elif param == "alpha":
            alpha = float(_ratio(value))
        else:
            sweep_g = instances.gen_far_forest(eps, alpha, int(value), seed=args.seed)
        davg = sweep_g.avg_degree if args.davg in (None, "auto") else float(_ratio(args.davg))
        trial_rows, _ = _run_conn_trials(
            sweep_g, args.algo, eps, alpha, davg, args.seed, args.trials, args.timings
        )
        for r in trial_rows:
            r_out = {"sweep_param": param, "sweep_value": value}
            r_out.update(r)
            rows.append(r_out)
    buf = io.StringIO()
    writer = csv.DictWriter(
        buf, fieldnames=["sweep_param", "sweep_value"] + TRIAL_COLUMNS, lineterminator="\n"
    )
    writer.writeheader()
    for r in rows:
        writer.writerow({k: r.get(k, "") for k in ["sweep_param", "sweep_value"] + TRIAL_COLUMNS})
    if args.out in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pegkit",
        description="Sublinear connectedness testers and degree estimators "
        "for partially erased adjacency-list graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("--family", required=True)
    p.add_argument("--eps")
    p.add_argument("--alpha")
    p.add_argument("--davg")
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--host-size", dest="host_size", type=int)
    p.add_argument("--cycle-len", dest="cycle_len", type=int)
    p.add_argument("--strategy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("erase", help="erase entries of an instance")
    p.add_argument("--graph", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--strategy", default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_erase)

    p = sub.add_parser("test-conn", help="run a connectedness tester over trials")
    p.add_argument("--graph", required=True)
    p.add_argument("--algo", required=True, choices=sorted(_ALGOS))
    p.add_argument("--eps", required=True)
    p.add_argument("--alpha", default="0")
    p.add_argument("--davg", default="auto")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--timings", action="store_true", help="record wall times (breaks byte-reproducibility)")
    p.set_defaults(func=cmd_test_conn)

    p = sub.add_parser("estimate", help="estimate the average degree over trials")
    p.add_argument("--graph", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-coeff", type=float, default=avg_degree.SAMPLE_COEFF)
    p.add_argument("--rep-coeff", type=float, default=avg_degree.REP_COEFF)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--timings", action="store_true", help="record wall times (breaks byte-reproducibility)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("exact", help="run brute-force oracles")
    p.add_argument("--graph", required=True)
    p.add_argument(
        "--what",
        required=True,
        choices=("validate", "distance-conn", "witnesses", "exp-chi", "report"),
    )
    p.add_argument("--dhat")
    p.add_argument("--eps")
    p.add_argument("--slot-bound", dest="slot_bound", type=int, default=20)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bench", help="sweep one parameter, emit tidy CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--algo", required=True, choices=sorted(_ALGOS))
    p.add_argument("--sweep", required=True, help="eps=...|alpha=...|n=... comma separated")
    p.add_argument("--eps", default="0.2")
    p.add_argument("--alpha", default="0")
    p.add_argument("--davg", default="auto")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--timings", action="store_true", help="record wall times (breaks byte-reproducibility)")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
