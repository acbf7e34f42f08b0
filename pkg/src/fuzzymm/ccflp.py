"""Capacitated center facility location: crisp and fully fuzzy model builders.

Customers carry fuzzy demands, facilities carry fuzzy capacities and set-up
costs, and allocations carry fuzzy unit costs. The crisp path fixes one
component of every triplet and solves the classic open/allocate program with
an auxiliary variable bounding the worst customer cost plus total set-up cost.
The fuzzy path builds a minimax model whose lowering yields the
three-objective MILP; solutions come back as networks of fuzzy flows.

Two capacity-row conventions are exposed. `derived` keeps the rows
sum_i x_ij <~ u_j * y_j, pairing each flow component with the matching
capacity component. `literal` drops the fuzzy capacity rows from the model and
injects component rows sum_i d_i^k x_ij^k <= u_j^k y_j into the lowered MILP,
i.e. flows additionally scaled by demand components. Reports state which was
used.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .fuzzy_core import (
    ONE,
    TFN,
    TriangularFuzzyNumber,
    from_json,
    to_json,
)
from .ffmodel import (
    FuzzyLinearExpression,
    FuzzyMinimaxModel,
    Relation,
    VariableKind,
)
from .milp import (
    INF,
    LinearProgram,
    LinearRow,
    MilpSolution,
    NotOptimalError,
    SolveStatus,
    solve_lp,
    solve_milp,
)
from .reformulate import InfeasiblePointError, TriObjectiveMilp, reformulate

_SELECTOR_INDEX = {"lo": 0, "mid": 1, "hi": 2}

FLOW_TOL = 1e-4  # hi component below this is numerical dust, not an edge


class UnknownVariantError(ValueError):
    """Capacity-row variant must be 'derived' or 'literal'."""


class InstanceError(ValueError):
    """Instance data is structurally unusable."""


@dataclass
class CcflpInstance:
    """Customers x facilities instance with all-nonnegative triplet data."""

    demands: list[TriangularFuzzyNumber]
    capacities: list[TriangularFuzzyNumber]
    setup_costs: list[TriangularFuzzyNumber]
    alloc_costs: list[list[TriangularFuzzyNumber]]

    @property
    def n(self) -> int:
        return len(self.demands)

    @property
    def m(self) -> int:
        return len(self.capacities)

    def validate(self) -> list[str]:
        """Structural and sign problems, empty when the instance is usable."""
        out = []
        if len(self.setup_costs) != self.m:
            out.append("setup cost count differs from facility count")
        if len(self.alloc_costs) != self.n:
            out.append("allocation cost row count differs from customer count")
        for i, row in enumerate(self.alloc_costs):
            if len(row) != self.m:
                out.append(f"allocation cost row {i + 1} has wrong length")
        named = [
            ("d", self.demands),
            ("u", self.capacities),
            ("f", self.setup_costs),
        ]
        for label, seq in named:
            for k, value in enumerate(seq):
                if value.lo < 0:
                    out.append(f"{label}[{k + 1}] has negative support ({value.lo})")
        for i, row in enumerate(self.alloc_costs):
            for j, value in enumerate(row):
                if value.lo < 0:
                    out.append(f"c[{i + 1}][{j + 1}] has negative support ({value.lo})")
        return out

    def component(self, value: TriangularFuzzyNumber, selector: str) -> float:
        return value.as_tuple()[_SELECTOR_INDEX[selector]]


def instance_to_json(instance: CcflpInstance) -> dict:
    return {
        "n": instance.n,
        "m": instance.m,
        "d": [to_json(v) for v in instance.demands],
        "u": [to_json(v) for v in instance.capacities],
        "f": [to_json(v) for v in instance.setup_costs],
        "c": [[to_json(v) for v in row] for row in instance.alloc_costs],
    }


def instance_from_json(doc: dict) -> CcflpInstance:
    try:
        instance = CcflpInstance(
            demands=[from_json(v) for v in doc["d"]],
            capacities=[from_json(v) for v in doc["u"]],
            setup_costs=[from_json(v) for v in doc["f"]],
            alloc_costs=[[from_json(v) for v in row] for row in doc["c"]],
        )
    except (KeyError, TypeError, ValueError) as err:
        raise InstanceError(f"bad instance document: {err}") from err
    if "n" in doc and doc["n"] != instance.n:
        raise InstanceError(f"declared n={doc['n']} but {instance.n} demands given")
    if "m" in doc and doc["m"] != instance.m:
        raise InstanceError(f"declared m={doc['m']} but {instance.m} capacities given")
    problems = instance.validate()
    if problems:
        raise InstanceError("; ".join(problems))
    return instance


def load_instance(path) -> CcflpInstance:
    with open(path, "r", encoding="utf-8") as f:
        return instance_from_json(json.load(f))


def save_instance(instance: CcflpInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(instance_to_json(instance), f, indent=1)
        f.write("\n")


def bundled_instance_path() -> str:
    """Path of the packaged 6-customer reference instance."""
    return str(resources.files("fuzzymm.data").joinpath("center6.json"))


def load_bundled_instance() -> CcflpInstance:
    return load_instance(bundled_instance_path())


# Published solution summary for the bundled instance, used by check-paper and
# the acceptance suite. Flow values are rounded to two decimals in the source.
REFERENCE_OPEN_MID = (3, 5, 6)
REFERENCE_FLOWS_MID = {
    (1, 6): 23.0,
    (2, 3): 28.18,
    (2, 6): 4.81,
    (4, 3): 0.06,
    (4, 5): 14.15,
    (4, 6): 5.68,
}
REFERENCE_THETA_TRIPLES = (
    (1399.70, 2629.27, 3463.01),
    (804.08, 2734.90, 3580.96),
    (1403.01, 2575.95, 3542.52),
)
# Two of the published networks differ in flows but report the same triple.
REFERENCE_EQUAL_THETA_PAIR = ((1399.70, 2629.27, 3463.01), (1399.70, 2629.27, 3463.01))


# -- crisp path ---------------------------------------------------------------


@dataclass
class CrispCcflp:
    """Crisp MILP plus the column layout used to build it."""

    lp: LinearProgram
    binaries: list[int]
    flow_col: dict[tuple[int, int], int]
    open_col: dict[int, int]
    theta_col: int


def build_crisp_model(instance: CcflpInstance, selector: str = "mid") -> CrispCcflp:
    """Single-objective crisp MILP at one component of every triplet.

    min t  s.t.  sum_j c_ij x_ij + sum_j f_j y_j <= t  per customer,
    demand equalities, and capacity rows sum_i x_ij <= u_j y_j.
    """
    if selector not in _SELECTOR_INDEX:
        raise ValueError(f"selector must be lo/mid/hi, got {selector!r}")
    n, m = instance.n, instance.m
    comp = lambda v: instance.component(v, selector)

    flow_col = {(i, j): i * m + j for i in range(n) for j in range(m)}
    open_col = {j: n * m + j for j in range(m)}
    theta_col = n * m + m
    names = [f"x_{i + 1}_{j + 1}" for i in range(n) for j in range(m)]
    names += [f"y_{j + 1}" for j in range(m)]
    names.append("theta")
    lower = [0.0] * (n * m) + [0.0] * m + [-INF]
    upper = [INF] * (n * m) + [1.0] * m + [INF]

    rows = []
    for i in range(n):
        coeffs = {flow_col[i, j]: comp(instance.alloc_costs[i][j]) for j in range(m)}
        for j in range(m):
            coeffs[open_col[j]] = comp(instance.setup_costs[j])
        coeffs[theta_col] = -1.0
        rows.append(LinearRow(coeffs, "<=", 0.0, f"cost_{i + 1}"))
    for i in range(n):
        coeffs = {flow_col[i, j]: 1.0 for j in range(m)}
        rows.append(LinearRow(coeffs, "==", comp(instance.demands[i]), f"demand_{i + 1}"))
    for j in range(m):
        coeffs = {flow_col[i, j]: 1.0 for i in range(n)}
        coeffs[open_col[j]] = -comp(instance.capacities[j])
        rows.append(LinearRow(coeffs, "<=", 0.0, f"capacity_{j + 1}"))

    lp = LinearProgram({theta_col: 1.0}, rows, lower, upper, names)
    return CrispCcflp(lp, list(open_col.values()), flow_col, open_col, theta_col)


@dataclass
class AssignmentNetwork:
    """Open facilities plus the nonzero fuzzy flows of a solution (1-based labels)."""

    open_facilities: list[int]
    flows: dict[tuple[int, int], TriangularFuzzyNumber]
    theta: TriangularFuzzyNumber


def crisp_network(
    instance: CcflpInstance, model: CrispCcflp, solution: MilpSolution, flow_tol: float = FLOW_TOL
) -> AssignmentNetwork:
    x = solution.x
    open_facilities = [j + 1 for j in range(instance.m) if x[model.open_col[j]] > 0.5]
    flows = {}
    for (i, j), col in model.flow_col.items():
        v = x[col]
        if v > flow_tol:
            flows[(i + 1, j + 1)] = TFN(v, v, v)
    t = solution.objective
    return AssignmentNetwork(open_facilities, flows, TFN(t, t, t))


def solve_crisp(
    instance: CcflpInstance, selector: str = "mid", *, solver=solve_milp
) -> tuple[MilpSolution, AssignmentNetwork]:
    model = build_crisp_model(instance, selector)
    sol = solver(model.lp, model.binaries)
    if sol.status is not SolveStatus.OPTIMAL:
        raise NotOptimalError(sol.status, f"crisp solve at {selector}")
    return sol, crisp_network(instance, model, sol)


def crisp_optimum_by_enumeration(instance: CcflpInstance, selector: str = "mid"):
    """Brute-force oracle: best objective over all open-facility subsets.

    For every subset, solve the allocation LP directly (flows to closed
    facilities fixed to zero). Independent of the branch-and-bound path.
    Returns (best objective, best subset as 1-based labels) or (None, None)
    when every subset is infeasible.
    """
    n, m = instance.n, instance.m
    comp = lambda v: instance.component(v, selector)
    best_obj = None
    best_subset = None
    for subset in itertools.product((0, 1), repeat=m):
        setup = sum(comp(instance.setup_costs[j]) for j in range(m) if subset[j])
        theta_col = n * m
        lower = [0.0] * (n * m) + [-INF]
        upper = [0.0 if not subset[j] else INF for i in range(n) for j in range(m)] + [INF]
        rows = []
        for i in range(n):
            coeffs = {i * m + j: comp(instance.alloc_costs[i][j]) for j in range(m)}
            coeffs[theta_col] = -1.0
            rows.append(LinearRow(coeffs, "<=", -setup, f"cost_{i}"))
        for i in range(n):
            rows.append(LinearRow({i * m + j: 1.0 for j in range(m)}, "==", comp(instance.demands[i]), f"demand_{i}"))
        for j in range(m):
            if subset[j]:
                coeffs = {i * m + j: 1.0 for i in range(n)}
                rows.append(LinearRow(coeffs, "<=", comp(instance.capacities[j]), f"cap_{j}"))
        sol = solve_lp(LinearProgram({theta_col: 1.0}, rows, lower, upper))
        if sol.status is SolveStatus.OPTIMAL and (best_obj is None or sol.objective < best_obj - 1e-12):
            best_obj = sol.objective
            best_subset = tuple(j + 1 for j in range(m) if subset[j])
    return best_obj, best_subset


# -- fuzzy path ---------------------------------------------------------------


def build_fuzzy_model(instance: CcflpInstance, variant: str = "derived") -> FuzzyMinimaxModel:
    """Fuzzy minimax model: per-customer cost rows with the shared set-up term folded in.

    `derived` includes the fuzzy capacity rows; `literal` leaves them out
    because its demand-scaled component rows only exist in the lowered program
    (see build_three_objective).
    """
    if variant not in ("derived", "literal"):
        raise UnknownVariantError(f"variant must be 'derived' or 'literal', got {variant!r}")
    problems = instance.validate()
    if problems:
        raise InstanceError("; ".join(problems))
    n, m = instance.n, instance.m
    model = FuzzyMinimaxModel()
    x = [[model.add_variable(f"x_{i + 1}_{j + 1}", VariableKind.FUZZY_NONNEGATIVE) for j in range(m)] for i in range(n)]
    y = [model.add_variable(f"y_{j + 1}", VariableKind.CRISP_BINARY) for j in range(m)]

    rows = [
        FuzzyLinearExpression([(instance.alloc_costs[i][j], x[i][j]) for j in range(m)])
        for i in range(n)
    ]
    shared = FuzzyLinearExpression([(instance.setup_costs[j], y[j]) for j in range(m)])
    model.set_minimax_rows(rows, shared)

    for i in range(n):
        expr = FuzzyLinearExpression([(ONE, x[i][j]) for j in range(m)])
        model.add_constraint(expr, Relation.EQUAL, instance.demands[i])
    if variant == "derived":
        for j in range(m):
            expr = FuzzyLinearExpression([(ONE, x[i][j]) for i in range(n)])
            model.add_constraint(expr, Relation.LESS_OR_APPROX, instance.capacities[j], rhs_binary=y[j])
    return model


def build_three_objective(
    instance: CcflpInstance, variant: str = "derived"
) -> tuple[FuzzyMinimaxModel, TriObjectiveMilp]:
    """Model plus its lowered MILP, with literal capacity rows injected when asked."""
    model = build_fuzzy_model(instance, variant)
    tri = reformulate(model)
    if variant == "literal":
        n, m = instance.n, instance.m
        for comp in ("lo", "mid", "hi"):
            k = _SELECTOR_INDEX[comp]
            for j in range(m):
                coeffs = {}
                for i in range(n):
                    col = tri.column(f"x_{i + 1}_{j + 1}__{comp}")
                    coeffs[col] = instance.demands[i].as_tuple()[k]
                coeffs[tri.column(f"y_{j + 1}")] = -instance.capacities[j].as_tuple()[k]
                tri.rows.append(LinearRow(coeffs, "<=", 0.0, f"cap_{comp}_{j + 1}"))
    return model, tri


def extract_network(
    model: FuzzyMinimaxModel,
    assignment: dict[str, TriangularFuzzyNumber],
    theta: TriangularFuzzyNumber,
    flow_tol: float = FLOW_TOL,
) -> AssignmentNetwork:
    """Read the open set and nonzero flows out of a lifted fuzzy solution."""
    open_facilities = []
    flows = {}
    for ref in model.variables:
        value = assignment[ref.name]
        if ref.kind is VariableKind.CRISP_BINARY:
            if value.mid > 0.5:
                open_facilities.append(int(ref.name.split("_")[1]))
        elif value.hi > flow_tol:
            _, i, j = ref.name.split("_")
            flows[(int(i), int(j))] = value
    open_set = set(open_facilities)
    for (i, j), value in flows.items():
        if j not in open_set:
            raise InfeasiblePointError([f"flow {i}->{j} of {value.hi:.4g} into a closed facility"])
    return AssignmentNetwork(sorted(open_facilities), flows, theta)


def _label(value: TriangularFuzzyNumber) -> str:
    if abs(value.hi - value.lo) <= 1e-9:
        return f"{value.mid:.2f}"
    return f"({value.lo:.2f},{value.mid:.2f},{value.hi:.2f})"


def network_to_dot(network: AssignmentNetwork, instance: CcflpInstance) -> str:
    """Undirected DOT drawing: filled nodes are open facilities, edges carry flows.

    When customers double as facilities (square instance) the two roles merge
    into one node per site and self-allocations are left out of the drawing.
    """
    merged = instance.n == instance.m
    lines = ["graph assignment {", "  node [shape=circle];"]
    if merged:
        open_set = set(network.open_facilities)
        for k in range(1, instance.n + 1):
            style = " style=filled fillcolor=black fontcolor=white" if k in open_set else ""
            lines.append(f'  s{k} [label="{k}"{style}];')
        for (i, j), value in sorted(network.flows.items()):
            if i == j:
                continue
            lines.append(f'  s{i} -- s{j} [label="{_label(value)}"];')
    else:
        for i in range(1, instance.n + 1):
            lines.append(f'  c{i} [label="c{i}"];')
        open_set = set(network.open_facilities)
        for j in range(1, instance.m + 1):
            style = " style=filled fillcolor=black fontcolor=white" if j in open_set else ""
            lines.append(f'  f{j} [label="f{j}"{style}];')
        for (i, j), value in sorted(network.flows.items()):
            lines.append(f'  c{i} -- f{j} [label="{_label(value)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- random instances ----------------------------------------------------------


def random_instance(
    customers: int, facilities: int, seed: int, *, crisp: bool = False
) -> CcflpInstance:
    """Seeded random instance, feasible by construction at every component.

    Capacities share one profile across components and total 1.2x total demand,
    so routing demand proportionally to capacity is always feasible with all
    facilities open.
    """
    rng = np.random.default_rng(seed)
    n, m = customers, facilities

    def spread(mid: float) -> TriangularFuzzyNumber:
        if crisp:
            return TFN(mid, mid, mid)
        lo = mid * rng.uniform(0.3, 1.0)
        hi = mid * rng.uniform(1.0, 1.5)
        return TFN(lo, mid, hi)

    demands = [spread(rng.uniform(10.0, 50.0)) for _ in range(n)]
    total = (
        sum(d.lo for d in demands),
        sum(d.mid for d in demands),
        sum(d.hi for d in demands),
    )
    shares = rng.uniform(0.5, 1.5, size=m)
    shares = shares / shares.sum()
    capacities = [
        TFN(1.2 * shares[j] * total[0], 1.2 * shares[j] * total[1], 1.2 * shares[j] * total[2])
        for j in range(m)
    ]
    setups = [spread(rng.uniform(100.0, 800.0)) for _ in range(m)]
    costs = [[spread(rng.uniform(10.0, 100.0)) for _ in range(m)] for _ in range(n)]
    return CcflpInstance(demands, capacities, setups, costs)
