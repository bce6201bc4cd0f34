"""Command-line driver: solve, estimate, generate, verify, bench.

Reports are machine-readable JSON on stdout; diagnostics go to stderr.
Exit codes: 0 success, 1 failed verification, 2 malformed input,
3 exact-solver size cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import clp, exact, flowkit, gen, lazysearch, treesearch
from .model import (
    Epsilon,
    Instance,
    ParseError,
    min_value,
    parse_allocation,
    parse_instance,
    serialize_allocation,
    serialize_instance,
    verify_allocation,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_SIZE_CAP = 3


def _load_instance(path: str) -> Instance:
    try:
        return parse_instance(Path(path).read_bytes())
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _frac_str(value, eps: Epsilon) -> str:
    return str(value.as_fraction(eps))


def _ratio_bound(algo: str, eps: Epsilon) -> float:
    e = eps.numerator / eps.denominator
    if algo == "exact":
        return 1.0
    if algo == "baseline":
        return 1.0 / e
    if algo == "quasi":
        return min(1.0 / e, 3.0 + 4.0 * e)
    if algo == "poly":
        return min(1.0 / e, 9.0)
    raise ValueError(algo)


def _run_algo(inst: Instance, algo: str, args):
    """Returns (value, allocation, extras dict) for one algorithm."""
    if algo == "exact":
        value, alloc = exact.opt(inst, args.exact_cap)
        return value, alloc, {}
    if algo == "baseline":
        value, alloc = flowkit.baseline_solve(inst)
        return value, alloc, {}
    if algo == "quasi":
        rep = treesearch.quasi_solve(inst, args.budget)
        extras = {"iterations": rep.iterations}
        if rep.certified_T is not None:
            extras["certified_T"] = _frac_str(rep.certified_T, inst.epsilon)
            extras["r"] = rep.r
        return rep.value, rep.allocation, extras
    if algo == "poly":
        rep = lazysearch.poly_solve(inst, args.mu, args.p_sweep, args.budget)
        return rep.value, rep.allocation, dict(rep.meta)
    raise ValueError(algo)


def cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    eps = inst.epsilon
    algos = ["baseline", "quasi", "poly"] if args.algo == "auto" else [args.algo]
    if args.algo == "auto" and inst.m <= args.exact_cap:
        algos.append("exact")
    best = None
    timings = {}
    for algo in algos:
        start = time.perf_counter()
        try:
            value, alloc, extras = _run_algo(inst, algo, args)
        except exact.InstanceTooLarge as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_SIZE_CAP
        timings[algo] = round(1000 * (time.perf_counter() - start), 3)
        if best is None or value.key(eps) > best[0].key(eps):
            best = (value, alloc, algo, extras)
    value, alloc, algo, extras = best
    out = args.out or args.instance + ".alloc.json"
    Path(out).write_bytes(serialize_allocation(alloc))
    report = {
        "value": _frac_str(value, eps),
        "algo": algo,
        "certified_ratio_bound": min(_ratio_bound(a, eps) for a in algos),
        "allocation": out,
        "wall_ms": timings,
    }
    report.update(extras)
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


def cmd_estimate(args) -> int:
    inst = _load_instance(args.instance)
    eps = inst.epsilon
    tstar = clp.estimate_Tstar(inst, args.tol)
    report = {"T_star": _frac_str(tstar, eps)}
    if inst.m <= args.exact_cap:
        opt_v, _ = exact.opt(inst, args.exact_cap)
        report["opt"] = _frac_str(opt_v, eps)
        if not opt_v.is_zero():
            ratio = tstar.as_fraction(eps) / opt_v.as_fraction(eps)
            report["ratio"] = str(ratio)
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


def cmd_generate(args) -> int:
    eps = Epsilon.parse(args.eps)
    if args.kind == "random":
        inst = gen.gen_random(
            args.n, args.m_heavy, args.m_light, args.density, eps, args.seed
        )
    elif args.kind == "3dm-yes":
        h, _ = gen.gen_3dm_yes(args.size, args.extra_edges, args.seed)
        inst = gen.reduce_3dm(h, eps)
    elif args.kind == "3dm-no":
        inst = gen.reduce_3dm(gen.gen_3dm_no(args.size, args.seed), eps)
    else:  # gap-search
        inst, tstar, opt_v = gen.search_gap_witness(
            args.n, args.m, eps, args.budget, args.seed
        )
        if inst is None:
            print("error: gap search found no instance", file=sys.stderr)
            return EXIT_PARSE
        print(
            json.dumps(
                {
                    "T_star": _frac_str(tstar, eps),
                    "opt": _frac_str(opt_v, eps),
                },
                sort_keys=True,
            ),
            file=sys.stderr,
        )
    Path(args.out).write_bytes(serialize_instance(inst))
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load_instance(args.instance)
    try:
        alloc = parse_allocation(Path(args.allocation).read_bytes())
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    violations = verify_allocation(inst, alloc)
    if violations:
        for v in violations:
            print(v)
        return EXIT_INVALID
    value = min_value(inst, alloc)
    threshold = Fraction(args.min_value)
    if value.as_fraction(inst.epsilon) < threshold:
        print(f"min value {value.as_fraction(inst.epsilon)} below {threshold}")
        return EXIT_INVALID
    return EXIT_OK


def cmd_bench(args) -> int:
    paths = sorted(Path(args.corpus).glob("*.json"))
    algos = args.algos.split(",")
    rows = []
    for path in paths:
        inst = _load_instance(str(path))
        eps = inst.epsilon
        opt_f: Optional[Fraction] = None
        if inst.m <= args.exact_cap:
            opt_v, _ = exact.opt(inst, args.exact_cap)
            opt_f = opt_v.as_fraction(eps)
        for algo in algos:
            start = time.perf_counter()
            value, alloc, extras = _run_algo(inst, algo, args)
            wall_ms = round(1000 * (time.perf_counter() - start), 3)
            value_f = value.as_fraction(eps)
            ratio = ""
            if opt_f is not None:
                ratio = str(opt_f / value_f) if value_f else ("1" if not opt_f else "")
            rows.append(
                {
                    "instance": path.name,
                    "n": inst.n,
                    "m_heavy": len(inst.heavy_ids),
                    "m_light": inst.m - len(inst.heavy_ids),
                    "epsilon": f"{eps.numerator}/{eps.denominator}",
                    "algo": algo,
                    "value": str(value_f),
                    "opt": "" if opt_f is None else str(opt_f),
                    "ratio": ratio,
                    "iterations": extras.get("iterations", ""),
                    "wall_ms": wall_ms,
                }
            )
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else [])
        writer.writeheader()
        writer.writerows(rows)
    return EXIT_OK


def _add_common(p):
    p.add_argument("--budget", type=int, default=treesearch.DEFAULT_BUDGET,
                   help="iteration budget per root agent")
    p.add_argument("--mu", type=float, default=lazysearch.MU_DEFAULT,
                   help="collapse threshold for the layered search")
    p.add_argument("--p-sweep", action="store_true",
                   help="sweep every addable-edge size p in (r,k)")
    p.add_argument("--exact-cap", type=int, default=exact.DEFAULT_SIZE_CAP,
                   help="max item count for the exact solver")
    p.add_argument("--tol", type=float, default=clp.DEFAULT_TOL,
                   help="LP feasibility tolerance")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maxminalloc")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a max-min allocation")
    p.add_argument("instance")
    p.add_argument("--algo", default="auto",
                   choices=["exact", "baseline", "quasi", "poly", "auto"])
    p.add_argument("--out", help="allocation output path")
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("estimate", help="estimate the CLP threshold T*")
    p.add_argument("instance")
    _add_common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("generate", help="write a generated instance")
    p.add_argument("kind", choices=["random", "3dm-yes", "3dm-no", "gap-search"])
    p.add_argument("--out", required=True)
    p.add_argument("--eps", default="1/2", help="light weight as p/q")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=4, help="agents (random/gap-search cap)")
    p.add_argument("--m", type=int, default=6, help="item cap for gap-search")
    p.add_argument("--m-heavy", type=int, default=2)
    p.add_argument("--m-light", type=int, default=6)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--size", type=int, default=2, help="3DM ground-set size")
    p.add_argument("--extra-edges", type=int, default=2)
    p.add_argument("--budget", type=int, default=2000, help="gap-search probes")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="check an allocation file")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--min-value", default="0", help="required min value, p/q")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run algorithms over a corpus directory")
    p.add_argument("corpus")
    p.add_argument("--algos", default="baseline,quasi,poly")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
