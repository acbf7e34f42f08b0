"""Efficient solutions of the three-objective program.

Scalarizations: weighted sum, lexicographic (hierarchical), and a two-stage
epsilon-constraint sweep over the second and third objectives. Grid
subproblems are independent; results are merged in deterministic grid order,
so running them concurrently would not change the output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .milp import LinearRow, MilpSolution, NotOptimalError, SolveStatus, solve_milp
from .reformulate import TriObjectiveMilp

Solver = Callable[..., MilpSolution]

_COMP_INDEX = {"lo": 0, "mid": 1, "hi": 2}


class NonpositiveWeightError(ValueError):
    """Weighted-sum scalarization needs strictly positive weights."""


@dataclass(frozen=True)
class ParetoPoint:
    """One efficient point: objective triple, full decision vector, provenance."""

    theta: tuple[float, float, float]
    decision: tuple[float, ...]
    method: str

    def __post_init__(self):
        lo, mid, hi = self.theta
        if lo > mid + 1e-6 or mid > hi + 1e-6:
            raise ValueError(f"objective triple out of order: {self.theta}")


@dataclass
class ParetoSet:
    points: list[ParetoPoint] = field(default_factory=list)

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def thetas(self) -> list[tuple[float, float, float]]:
        return [p.theta for p in self.points]

    def write_csv(self, fileobj, var_names: Sequence[str]) -> None:
        """Full-precision CSV: method, the objective triple, then the decision by name."""
        writer = csv.writer(fileobj)
        writer.writerow(["method", "theta_lo", "theta_mid", "theta_hi", *var_names])
        for p in self.points:
            writer.writerow([p.method, *(repr(v) for v in p.theta), *(repr(v) for v in p.decision)])


def _optimize(
    tri: TriObjectiveMilp,
    objective: dict[int, float],
    extra_rows: Sequence[LinearRow],
    solver: Solver,
) -> MilpSolution:
    lp = tri.to_linear_program(objective, extra_rows)
    sol = solver(lp, tri.binaries())
    if sol.status is not SolveStatus.OPTIMAL:
        raise NotOptimalError(sol.status, "scalarized subproblem")
    return sol


def _point(tri: TriObjectiveMilp, sol: MilpSolution, method: str) -> ParetoPoint:
    theta = tuple(float(sol.x[c]) for c in tri.theta_cols)
    return ParetoPoint(theta, tuple(float(v) for v in sol.x), method)


def weighted_sum(
    tri: TriObjectiveMilp,
    weights: tuple[float, float, float],
    *,
    solver: Solver = solve_milp,
) -> ParetoPoint:
    """Minimize the positively weighted sum of the objective triple (always efficient)."""
    if len(weights) != 3 or any(w <= 0 for w in weights):
        raise NonpositiveWeightError(f"weights must be strictly positive, got {weights}")
    objective = {col: float(w) for col, w in zip(tri.theta_cols, weights)}
    sol = _optimize(tri, objective, (), solver)
    label = ",".join(f"{w:g}" for w in weights)
    return _point(tri, sol, f"weighted({label})")


def lexicographic(
    tri: TriObjectiveMilp,
    order: Sequence[str] = ("lo", "mid", "hi"),
    *,
    delta: float = 1e-6,
    solver: Solver = solve_milp,
) -> ParetoPoint:
    """Hierarchically minimize the components in the given order.

    Each stage's optimum is fixed within `delta` before the next stage, so the
    final point is efficient up to that slack.
    """
    if sorted(order) != ["hi", "lo", "mid"]:
        raise ValueError(f"order must be a permutation of lo/mid/hi, got {order}")
    extra: list[LinearRow] = []
    sol = None
    for comp in order:
        col = tri.theta_cols[_COMP_INDEX[comp]]
        sol = _optimize(tri, {col: 1.0}, extra, solver)
        extra.append(LinearRow({col: 1.0}, "<=", sol.objective + delta, f"lex_fix_{comp}"))
    return _point(tri, sol, f"lex({'-'.join(order)})")


def _dominates(a: tuple[float, ...], b: tuple[float, ...], tol: float) -> bool:
    return all(x <= y + tol for x, y in zip(a, b)) and any(x < y - tol for x, y in zip(a, b))


def _equal(a: tuple[float, ...], b: tuple[float, ...], tol: float) -> bool:
    return all(abs(x - y) <= tol for x, y in zip(a, b))


def filter_nondominated(points: Iterable[ParetoPoint], tol: float = 1e-6) -> ParetoSet:
    """Drop dominated points and deduplicate equal triples, keeping first insertions."""
    points = list(points)
    kept: list[ParetoPoint] = []
    for i, p in enumerate(points):
        drop = False
        for j, q in enumerate(points):
            if j == i:
                continue
            if _dominates(q.theta, p.theta, tol):
                drop = True
                break
            if _equal(q.theta, p.theta, tol) and j < i:
                drop = True
                break
        if not drop:
            kept.append(p)
    return ParetoSet(kept)


def epsilon_constraint_enumerate(
    tri: TriObjectiveMilp,
    steps: tuple[int, int] = (8, 8),
    *,
    delta: float = 1e-6,
    tol: float = 1e-6,
    solver: Solver = solve_milp,
) -> ParetoSet:
    """Two-stage epsilon-constraint sweep over the mid and hi objectives.

    Bounds for the grid come from the lexicographic ideal and the worst value
    observed over the three lexicographic solutions. Each cell minimizes the lo
    component under the epsilon bounds, then re-minimizes mid+hi with lo fixed,
    which removes weakly efficient outputs. Feasible, bounded input always
    yields at least one point.
    """
    n2, n3 = steps
    if n2 < 1 or n3 < 1:
        raise ValueError(f"grid must be at least 1x1, got {steps}")

    orders = (("lo", "mid", "hi"), ("mid", "hi", "lo"), ("hi", "lo", "mid"))
    corners = [lexicographic(tri, order, delta=delta, solver=solver) for order in orders]
    ideal = tuple(corners[k].theta[k] for k in range(3))
    worst = tuple(max(c.theta[k] for c in corners) for k in range(3))

    def _grid(lo: float, hi: float, count: int) -> list[float]:
        if count == 1 or hi - lo <= tol:
            return [hi]
        return [float(v) for v in np.linspace(lo, hi, count)]

    eps_mid = _grid(ideal[1], worst[1], n2)
    eps_hi = _grid(ideal[2], worst[2], n3)
    t_lo, t_mid, t_hi = tri.theta_cols

    points: list[ParetoPoint] = []
    for e2 in eps_mid:
        for e3 in eps_hi:
            bounds = [
                LinearRow({t_mid: 1.0}, "<=", e2 + 1e-9, "eps_mid"),
                LinearRow({t_hi: 1.0}, "<=", e3 + 1e-9, "eps_hi"),
            ]
            try:
                stage1 = _optimize(tri, {t_lo: 1.0}, bounds, solver)
            except NotOptimalError as err:
                if err.status is SolveStatus.INFEASIBLE:
                    continue
                raise
            fix = LinearRow({t_lo: 1.0}, "<=", stage1.objective + delta, "eps_fix_lo")
            stage2 = _optimize(tri, {t_mid: 1.0, t_hi: 1.0}, bounds + [fix], solver)
            points.append(_point(tri, stage2, "eps"))
    return filter_nondominated(points, tol)
