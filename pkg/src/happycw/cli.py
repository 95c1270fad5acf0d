"""Command-line interface: ``happycw <command> ...``.

Exit codes: 0 on success (a NO verdict is still a success), 2 for bad input
or usage, 3 when a state or enumeration budget is exceeded or an expression
cannot be made nice.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from .cwexpr import check_graph_match, check_nice, normalize_nice, parse_expr, print_expr
from .errors import BudgetExceeded, HappyError, PartiallyRedundant, StateBudgetExceeded
from .graph import Instance, format_coloring, parse_instance, write_instance
from .interval import IntervalInstance, parse_intervals, solve_mhv_interval, write_intervals
from .mhe_cw import solve_mhe_cw
from .mhv_cw import solve_mhv_cw
from .oracle import GenConfig, brute_mhe, brute_mhv, gen_expression, gen_graph, gen_interval
from .reductions import parse_dimacs, reduce_sat_to_mhe, threshold_to_expr, write_sidecar

EXIT_INPUT = 2
EXIT_BUDGET = 3


class UsageError(HappyError):
    pass


@dataclass
class RunReport:
    problem: str
    algorithm: str
    optimum: int
    target: int | None
    verdict: str | None
    coloring: list
    wall_time: float
    states: int

    def lines(self, print_coloring: bool) -> list[str]:
        out = [f"optimum {self.optimum}"]
        if self.verdict == "YES":
            out.append(f"YES (optimum {self.optimum} >= {self.target})")
        elif self.verdict == "NO":
            out.append(f"NO (optimum {self.optimum} < {self.target})")
        if print_coloring:
            out.append("coloring " + format_coloring(dict(enumerate(self.coloring, 1))))
        out.append(f"algorithm {self.algorithm}, states {self.states}, time {self.wall_time:.3f}s")
        return out


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def load_instance(path: str) -> Instance | IntervalInstance:
    """Either format, chosen by the header directive."""
    text = _read(path)
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            return parse_intervals(text) if line.split()[0] == "intervals" else parse_instance(text)
    return parse_instance(text)


def cmd_solve(args, problem: str) -> int:
    inst = load_instance(args.instance)
    if args.algo == "interval":
        if not isinstance(inst, IntervalInstance):
            raise UsageError("--algo interval needs an 'intervals' instance file")
        graph_inst = inst.to_instance()
    else:
        graph_inst = inst.to_instance() if isinstance(inst, IntervalInstance) else inst
    target = args.k if args.k is not None else graph_inst.target
    if target is not None and target < 0:
        raise UsageError("--k must be nonnegative")
    warning = Instance(graph_inst.graph, graph_inst.precoloring, target).target_warning(problem)
    if warning:
        print(f"warning: {warning}", file=sys.stderr)

    start = time.perf_counter()
    if args.algo == "cw":
        if not args.expr:
            raise UsageError("--algo cw needs --expr")
        expr = parse_expr(_read(args.expr))
        check_graph_match(expr, graph_inst.graph)
        if problem == "mhv":
            sol = solve_mhv_cw(graph_inst, expr)
        else:
            sol = solve_mhe_cw(graph_inst, normalize_nice(expr))
    elif args.algo == "interval":
        sol = solve_mhv_interval(inst)
    else:
        sol = (brute_mhv if problem == "mhv" else brute_mhe)(graph_inst)
    elapsed = time.perf_counter() - start

    verdict = None if target is None else ("YES" if sol.optimum >= target else "NO")
    report = RunReport(
        problem, args.algo, sol.optimum, target, verdict,
        [sol.coloring[v] for v in range(1, graph_inst.n + 1)], round(elapsed, 6), sol.states,
    )
    if args.json:
        print(json.dumps(asdict(report), sort_keys=True))
    else:
        print("\n".join(report.lines(args.print_coloring)))
    return 0


def cmd_reduce(args) -> int:
    out = reduce_sat_to_mhe(parse_dimacs(_read(args.cnf)))
    _write(args.out, write_instance(out.instance))
    if args.map:
        _write(args.map, write_sidecar(out))
    if args.expr_out:
        _write(args.expr_out, print_expr(threshold_to_expr(out.instance.graph)) + "\n")
    print(
        f"vertices {out.instance.n}, clique {len(out.clique_order)}, "
        f"colors {out.instance.ell}, k {out.k}",
        file=sys.stderr if args.out in (None, "-") else sys.stdout,
    )
    return 0


def cmd_gen(args) -> int:
    cfg = GenConfig(
        seed=args.seed, n=args.n, ell=args.ell, w=args.w, nodes=args.nodes,
        density=args.density, edge_density=args.edge_density, span_range=args.span_range,
    )
    if args.kind == "graph":
        _write(args.out, write_instance(gen_graph(cfg)))
    elif args.kind == "interval":
        _write(args.out, write_intervals(gen_interval(cfg)))
    else:
        expr, inst = gen_expression(cfg)
        _write(args.out, print_expr(expr) + "\n")
        if args.instance_out:
            _write(args.instance_out, write_instance(inst))
    return 0


def cmd_check_expr(args) -> int:
    expr = parse_expr(_read(args.expr))
    report = check_nice(expr)
    parts = [f"width {expr.width}"]
    if report:
        parts.append("nice")
    else:
        parts.append("not nice (edge-introduction nodes " + " ".join(map(str, report.offenders)) + ")")
    status = 0
    if args.instance:
        inst = load_instance(args.instance)
        graph = inst.graph() if isinstance(inst, IntervalInstance) else inst.graph
        try:
            check_graph_match(expr, graph)
            parts.append("graph match OK")
        except HappyError as exc:
            parts.append(f"graph mismatch: {exc}")
            status = EXIT_INPUT
    print(", ".join(parts))
    return status


_BENCH_DEFAULTS = {
    "mhv-cw": dict(sizes="8,16,32,64", ell=2, w=3),
    "mhe-cw": dict(sizes="4,6,8,10", ell=2, w=2),
    "interval": dict(sizes="250,500,1000", ell=25, w=0),
}


def cmd_bench(args) -> int:
    defaults = _BENCH_DEFAULTS[args.suite]
    sizes = [int(s) for s in (args.sizes or defaults["sizes"]).split(",")]
    ell = args.ell or defaults["ell"]
    w = args.w or defaults["w"]
    rows = []
    for n in sizes:
        for rep in range(args.repeats):
            cfg = GenConfig(seed=args.seed + rep, n=n, ell=ell, w=max(w, 1), density=args.density,
                            span_range=4 * n)
            if args.suite == "interval":
                inst = gen_interval(cfg)
                start = time.perf_counter()
                sol = solve_mhv_interval(inst)
            else:
                expr, inst = gen_expression(cfg)
                solver = solve_mhv_cw if args.suite == "mhv-cw" else solve_mhe_cw
                start = time.perf_counter()
                sol = solver(inst, expr)
            millis = (time.perf_counter() - start) * 1000
            rows.append({"n": n, "ell": ell, "w": w if args.suite != "interval" else "",
                         "states": sol.states, "millis": f"{millis:.1f}"})
    if args.out and args.out != "-":
        handle = open(args.out, "w", newline="", encoding="utf-8")
    else:
        handle = sys.stdout
    try:
        writer = csv.DictWriter(handle, fieldnames=["n", "ell", "w", "states", "millis"])
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if handle is not sys.stdout:
            handle.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="happycw", description="Exact solvers for Maximum Happy Vertices and Maximum Happy Edges."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for problem, algos in (("mhv", ["cw", "interval", "brute"]), ("mhe", ["cw", "brute"])):
        p = sub.add_parser(f"solve-{problem}", help=f"solve {problem.upper()} on one instance")
        p.add_argument("--algo", choices=algos, required=True)
        p.add_argument("--instance", required=True, help="'happy' or 'intervals' instance file")
        p.add_argument("--expr", help="w-expression file (needed by --algo cw)")
        p.add_argument("--k", type=int, help="target, overrides the file's 'target' line")
        p.add_argument("--print-coloring", action="store_true")
        p.add_argument("--json", action="store_true", help="one JSON record on stdout")
        p.set_defaults(func=lambda a, pr=problem: cmd_solve(a, pr))

    p = sub.add_parser("reduce-sat", help="build the threshold-graph MHE instance of a CNF")
    p.add_argument("--cnf", required=True, help="DIMACS file")
    p.add_argument("--out", required=True, help="instance file ('-' for stdout)")
    p.add_argument("--map", help="sidecar with literal colors and gadget vertices")
    p.add_argument("--expr-out", help="write a nice 2-expression of the graph")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("gen", help="seeded random instances and expressions")
    p.add_argument("kind", choices=["graph", "interval", "expr"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--w", type=int, default=2)
    p.add_argument("--nodes", type=int, help="expression node budget (default 4n)")
    p.add_argument("--density", type=float, default=0.3, help="precoloring density")
    p.add_argument("--edge-density", type=float, default=0.4)
    p.add_argument("--span-range", type=int, default=20)
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--instance-out", help="for 'expr': also write the instance skeleton")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check-expr", help="validate an expression, optionally against an instance")
    p.add_argument("--expr", required=True)
    p.add_argument("--instance")
    p.set_defaults(func=cmd_check_expr)

    p = sub.add_parser("bench", help="time a solver on generated instances, CSV out")
    p.add_argument("--suite", choices=sorted(_BENCH_DEFAULTS), required=True)
    p.add_argument("--sizes", help="comma-separated vertex counts")
    p.add_argument("--ell", type=int)
    p.add_argument("--w", type=int)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--out", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StateBudgetExceeded, BudgetExceeded, PartiallyRedundant) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (HappyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
