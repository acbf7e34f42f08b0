"""Command-line front end.

Commands: validate, solve-crisp, reformulate, pareto, check-paper, gen-random.
Exit codes: 0 success, 1 infeasible/unbounded or failed checks, 2 parse or
validation error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import ccflp, pareto
from .fuzzy_core import OrderRelation, TFN, compare
from .milp import LinearRow, NotOptimalError, SolveStatus, solve_lp, solve_milp
from .reformulate import lift_solution, write_text

EXIT_OK = 0
EXIT_NO_OPTIMUM = 1
EXIT_BAD_INPUT = 2
EXIT_INTERNAL = 3

logger = logging.getLogger(__name__)


class ParseError(ValueError):
    """Input file could not be read or validated."""


def _read_instance(path: str) -> ccflp.CcflpInstance:
    p = Path(path)
    if not p.exists():
        raise ParseError(f"instance file not found: {p}")
    try:
        with open(p, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except json.JSONDecodeError as err:
        raise ParseError(f"{p}: invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}") from err
    try:
        return ccflp.instance_from_json(doc)
    except ccflp.InstanceError as err:
        raise ParseError(f"{p}: {err}") from err


def _fmt2(value: float) -> str:
    return f"{value:.2f}"


def _fmt_triple(t) -> str:
    return f"({_fmt2(t[0])}, {_fmt2(t[1])}, {_fmt2(t[2])})"


# -- commands -----------------------------------------------------------------


def cmd_validate(args) -> int:
    p = Path(args.instance)
    if not p.exists():
        print(f"error: instance file not found: {p}")
        return EXIT_BAD_INPUT
    try:
        with open(p, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except json.JSONDecodeError as err:
        print(f"error: invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}")
        return EXIT_BAD_INPUT

    problems = []
    sizes = {}
    for key, kind in (("d", "demand"), ("u", "capacity"), ("f", "set-up cost")):
        entries = doc.get(key)
        if not isinstance(entries, list):
            problems.append(f"missing or non-list field {key!r}")
            continue
        sizes[key] = len(entries)
        for idx, raw in enumerate(entries):
            field = f"{key}[{idx + 1}]"
            problems.extend(_check_tfn(raw, field, kind))
    c = doc.get("c")
    if not isinstance(c, list):
        problems.append("missing or non-list field 'c'")
    else:
        for i, row in enumerate(c):
            if not isinstance(row, list):
                problems.append(f"c[{i + 1}] is not a list")
                continue
            for j, raw in enumerate(row):
                problems.extend(_check_tfn(raw, f"c[{i + 1}][{j + 1}]", "allocation cost"))
    n = sizes.get("d", 0)
    m = sizes.get("u", 0)
    print(f"n={n} m={m}")
    if isinstance(c, list) and (len(c) != n or any(isinstance(r, list) and len(r) != m for r in c)):
        problems.append("allocation cost matrix shape does not match n x m")
    if sizes.get("f") not in (None, m):
        problems.append("set-up cost count differs from facility count")
    for problem in problems:
        print(f"violation: {problem}")
    print("valid" if not problems else f"{len(problems)} violation(s)")
    return EXIT_OK if not problems else EXIT_BAD_INPUT


def _check_tfn(raw, field: str, kind: str) -> list[str]:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return [f"{field}: negative {kind} ({raw})"] if raw < 0 else []
    if not isinstance(raw, list) or len(raw) != 3:
        return [f"{field}: expected scalar or [lo, mid, hi]"]
    try:
        lo, mid, hi = (float(v) for v in raw)
    except (TypeError, ValueError):
        return [f"{field}: non-numeric entries"]
    out = []
    if not lo <= mid <= hi:
        out.append(f"{field}: triplet out of order {raw}")
    if lo < 0:
        out.append(f"{field}: negative {kind} support ({lo})")
    return out


def cmd_solve_crisp(args) -> int:
    instance = _read_instance(args.instance)
    solution, network = ccflp.solve_crisp(instance, args.selector)
    print(f"selector: {args.selector}")
    print(f"objective: {solution.objective:.6f}")
    print(f"open facilities: {{{', '.join(str(j) for j in network.open_facilities)}}}")
    for (i, j), flow in sorted(network.flows.items()):
        print(f"flow {i} -> {j}: {_fmt2(flow.mid)}")
    if args.out:
        Path(args.out).write_text(ccflp.network_to_dot(network, instance), encoding="utf-8")
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_reformulate(args) -> int:
    instance = _read_instance(args.instance)
    _, tri = ccflp.build_three_objective(instance, args.variant)
    text = write_text(tri)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out} ({len(tri.variables)} columns, {len(tri.rows)} rows)")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_pareto(args) -> int:
    instance = _read_instance(args.instance)
    model, tri = ccflp.build_three_objective(instance, args.variant)

    if args.method == "weighted":
        weights = tuple(float(w) for w in args.weights.split(","))
        if len(weights) != 3:
            raise ParseError("--weights needs three comma-separated values")
        points = pareto.ParetoSet([pareto.weighted_sum(tri, weights)])
    elif args.method == "lex":
        order = tuple(args.order.split(","))
        points = pareto.ParetoSet([pareto.lexicographic(tri, order)])
    elif args.method == "eps":
        n2, n3 = (int(v) for v in args.grid.split(","))
        points = pareto.epsilon_constraint_enumerate(tri, (n2, n3), tol=args.tol)
    else:  # pragma: no cover - argparse restricts choices
        raise ParseError(f"unknown method {args.method!r}")

    print(f"variant: {args.variant}")
    print(f"{len(points)} nondominated point(s)")
    for k, point in enumerate(points, start=1):
        print(f"theta[{k}] = {_fmt_triple(point.theta)}  [{point.method}]")

    if args.out:
        out = Path(args.out)
        with open(out, "w", encoding="utf-8", newline="") as f:
            points.write_csv(f, tri.var_names())
        print(f"wrote {out}")
        for k, point in enumerate(points, start=1):
            lifted = lift_solution(tri, point.decision, tol=1e-5)
            network = ccflp.extract_network(model, lifted.assignment, lifted.theta)
            dot_path = out.with_name(f"{out.stem}_{k}.dot")
            dot_path.write_text(ccflp.network_to_dot(network, instance), encoding="utf-8")
            print(f"wrote {dot_path}")
    return EXIT_OK


def _audit_triple(tri, triple, box: float):
    """Feasibility of the program with the objective triple pinned to a box.

    Returns (feasible, minimal total deviation when infeasible).
    """
    rows = []
    for col, value, comp in zip(tri.theta_cols, triple, ("lo", "mid", "hi")):
        rows.append(LinearRow({col: 1.0}, "<=", value + box, f"audit_{comp}_ub"))
        rows.append(LinearRow({col: -1.0}, "<=", -(value - box), f"audit_{comp}_lb"))
    lp = tri.to_linear_program({tri.theta_cols[1]: 1.0}, rows)
    sol = solve_milp(lp, tri.binaries())
    if sol.status is SolveStatus.OPTIMAL:
        return True, 0.0

    # Elastic re-solve: minimize total |theta - triple| to report how far off it is.
    base = tri.to_linear_program({}, ())
    ncols = len(base.lower)
    lower = list(base.lower) + [0.0] * 6
    upper = list(base.upper) + [float("inf")] * 6
    rows = list(base.rows)
    objective = {}
    for k, (col, value) in enumerate(zip(tri.theta_cols, triple)):
        plus, minus = ncols + 2 * k, ncols + 2 * k + 1
        rows.append(LinearRow({col: 1.0, plus: -1.0, minus: 1.0}, "==", value, f"elastic_{k}"))
        objective[plus] = 1.0
        objective[minus] = 1.0
    from .milp import LinearProgram

    elastic = LinearProgram(objective, rows, lower, upper)
    dev = solve_milp(elastic, tri.binaries())
    return False, dev.objective if dev.status is SolveStatus.OPTIMAL else None


def cmd_check_paper(args) -> int:
    """Check the bundled reference instance against its published solution values."""
    failures = 0

    def report(ok: bool, label: str) -> None:
        nonlocal failures
        print(f"[{'PASS' if ok else 'FAIL'}] {label}")
        if not ok:
            failures += 1

    triples = [TFN(*t) for t in ccflp.REFERENCE_THETA_TRIPLES]
    pairwise = all(
        compare(a, b) is OrderRelation.INCOMPARABLE
        for i, a in enumerate(triples)
        for b in triples[i + 1 :]
    )
    report(pairwise, "published objective triples are pairwise incomparable")
    pair = [TFN(*t) for t in ccflp.REFERENCE_EQUAL_THETA_PAIR]
    report(compare(pair[0], pair[1]) is OrderRelation.EQUAL,
           "the two duplicate-objective networks report equal triples")

    path = args.instance or ccflp.bundled_instance_path()
    if not Path(path).exists():
        print(f"error: missing instance file: {path}")
        return EXIT_BAD_INPUT
    instance = _read_instance(path)

    solution, network = ccflp.solve_crisp(instance, "mid")
    report(tuple(network.open_facilities) == ccflp.REFERENCE_OPEN_MID,
           f"crisp mid-value solve opens {{{', '.join(map(str, network.open_facilities))}}}"
           f" (published {{{', '.join(map(str, ccflp.REFERENCE_OPEN_MID))}}})")
    oracle_obj, oracle_set = ccflp.crisp_optimum_by_enumeration(instance, "mid")
    report(oracle_obj is not None and abs(solution.objective - oracle_obj) <= 1e-6,
           f"crisp objective {solution.objective:.6f} matches subset enumeration {oracle_obj:.6f}")

    cross = {k: v for k, v in network.flows.items() if k[0] != k[1]}
    matched = all(
        abs(cross.get(key, TFN(0, 0, 0)).mid - value) <= 1e-2
        for key, value in ccflp.REFERENCE_FLOWS_MID.items()
    ) and all(key in ccflp.REFERENCE_FLOWS_MID for key in cross)
    print(f"[INFO] crisp cross-flows match the published network within 0.01: "
          f"{'yes' if matched else 'no (alternate optimum; objective and open set are binding)'}")

    for triple in ccflp.REFERENCE_THETA_TRIPLES:
        admitted = None
        deviations = {}
        for variant in ("derived", "literal"):
            _, tri = ccflp.build_three_objective(instance, variant)
            feasible, deviation = _audit_triple(tri, triple, box=1e-2)
            if feasible and admitted is None:
                admitted = variant
            deviations[variant] = deviation
        if admitted:
            report(True, f"triple {_fmt_triple(triple)} attainable under variant '{admitted}'")
        else:
            detail = ", ".join(
                f"{v}: {'unsolved' if d is None else f'{d:.4f}'}" for v, d in deviations.items()
            )
            report(False, f"triple {_fmt_triple(triple)} unattainable; minimal deviation {detail}")

    print("all checks passed" if failures == 0 else f"{failures} check(s) failed")
    return EXIT_OK if failures == 0 else EXIT_NO_OPTIMUM


def cmd_gen_random(args) -> int:
    instance = ccflp.random_instance(args.customers, args.facilities, args.seed, crisp=args.crisp)
    if args.out:
        ccflp.save_instance(instance, args.out)
        print(f"wrote {args.out} (n={instance.n}, m={instance.m}, seed={args.seed})")
    else:
        json.dump(ccflp.instance_to_json(instance), sys.stdout, indent=1)
        print()
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzymm",
        description="Minimax mixed 0-1 programs over triangular fuzzy numbers",
    )
    parser.add_argument("--verbose", action="store_true", help="per-node solver diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an instance file")
    p.add_argument("instance")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve-crisp", help="solve at one component of every triplet")
    p.add_argument("instance")
    p.add_argument("--selector", choices=("lo", "mid", "hi"), default="mid")
    p.add_argument("--out", help="write the solution network as DOT")
    p.set_defaults(func=cmd_solve_crisp)

    p = sub.add_parser("reformulate", help="emit the crisp three-objective MILP as text")
    p.add_argument("instance")
    p.add_argument("--variant", choices=("derived", "literal"), default="derived")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_reformulate)

    p = sub.add_parser("pareto", help="enumerate nondominated solutions")
    p.add_argument("instance")
    p.add_argument("--variant", choices=("derived", "literal"), default="derived")
    p.add_argument("--method", choices=("weighted", "lex", "eps"), default="eps")
    p.add_argument("--weights", default="1,1,1", help="comma-separated positive weights")
    p.add_argument("--order", default="lo,mid,hi", help="lexicographic component order")
    p.add_argument("--grid", default="8,8", help="epsilon grid resolution n2,n3")
    p.add_argument("--tol", type=float, default=1e-6, help="domination tolerance")
    p.add_argument("--out", help="CSV path; per-point DOT files are written next to it")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("check-paper", help="verify published values for the bundled instance")
    p.add_argument("--instance", help="override the bundled instance file")
    p.set_defaults(func=cmd_check_paper)

    p = sub.add_parser("gen-random", help="generate a seeded random instance")
    p.add_argument("--customers", type=int, default=5)
    p.add_argument("--facilities", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--crisp", action="store_true", help="degenerate triplets only")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_gen_random)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_BAD_INPUT if err.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ParseError as err:
        print(f"error: {err}")
        return EXIT_BAD_INPUT
    except NotOptimalError as err:
        print(f"error: {err}")
        return EXIT_NO_OPTIMUM
    except Exception as err:  # pragma: no cover - defensive
        logger.exception("internal error")
        print(f"internal error: {err}")
        return EXIT_INTERNAL


def console_main() -> None:  # pragma: no cover - thin wrapper
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    console_main()
