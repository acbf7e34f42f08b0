"""Exact crisp solver: two-phase primal simplex and best-bound branch and bound on binaries.

Built for desk-scale programs where correctness and determinism matter more
than speed: dense tableaus, no presolve, no cuts. Identical input always yields
identical output. One solver invocation shares nothing with any other, so
separate calls may run on separate threads or processes.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

INF = math.inf

FEASIBILITY_TOL = 1e-6
INTEGRALITY_TOL = 1e-6
_OPT_TOL = 1e-9
_PIVOT_TOL = 1e-7
_PHASE1_TOL = 1e-7
_PRUNE_TOL = 1e-9
_TIE_TOL = 1e-12


class MalformedProgramError(ValueError):
    """Program has inconsistent dimensions or non-finite data."""


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class NotOptimalError(RuntimeError):
    """A solve that had to produce an optimum ended infeasible or unbounded."""

    def __init__(self, status: SolveStatus, context: str = ""):
        self.status = status
        msg = f"solve ended with status {status.value}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


@dataclass
class LinearRow:
    """Sparse constraint row: coeffs . x  <=|==  rhs."""

    coeffs: dict[int, float]
    relation: str  # "<=" or "=="
    rhs: float
    name: str = ""


@dataclass
class LinearProgram:
    """Minimization program with sparse rows and per-variable bounds (+-inf allowed)."""

    objective: dict[int, float]
    rows: list[LinearRow]
    lower: list[float]
    upper: list[float]
    names: list[str] | None = None

    @property
    def num_vars(self) -> int:
        return len(self.lower)

    def validate(self) -> None:
        n = self.num_vars
        if len(self.upper) != n:
            raise MalformedProgramError("lower/upper bound lists differ in length")
        if self.names is not None and len(self.names) != n:
            raise MalformedProgramError("names list does not match variable count")
        for j, c in self.objective.items():
            if not 0 <= j < n:
                raise MalformedProgramError(f"objective references unknown column {j}")
            if not math.isfinite(c):
                raise MalformedProgramError(f"objective coefficient on column {j} is not finite")
        for i, row in enumerate(self.rows):
            if row.relation not in ("<=", "=="):
                raise MalformedProgramError(f"row {i} has unsupported relation {row.relation!r}")
            if not math.isfinite(row.rhs):
                raise MalformedProgramError(f"row {i} has non-finite rhs")
            for j, c in row.coeffs.items():
                if not 0 <= j < n:
                    raise MalformedProgramError(f"row {i} references unknown column {j}")
                if not math.isfinite(c):
                    raise MalformedProgramError(f"row {i} has non-finite coefficient on column {j}")
        for j in range(n):
            lo, up = self.lower[j], self.upper[j]
            if math.isnan(lo) or math.isnan(up):
                raise MalformedProgramError(f"bounds of column {j} are NaN")
            if lo == INF or up == -INF:
                raise MalformedProgramError(f"bounds of column {j} are reversed infinities")

    def with_bounds(self, fixes: dict[int, tuple[float, float]]) -> "LinearProgram":
        """Copy sharing rows/objective but with some variable bounds replaced."""
        lower = list(self.lower)
        upper = list(self.upper)
        for j, (lo, up) in fixes.items():
            lower[j] = lo
            upper[j] = up
        return LinearProgram(self.objective, self.rows, lower, upper, self.names)


@dataclass
class MilpSolution:
    status: SolveStatus
    x: list[float] | None = None
    objective: float | None = None
    node_count: int = 0
    duals: list[float] | None = None


def check_feasible(lp: LinearProgram, x: Sequence[float], tol: float = FEASIBILITY_TOL) -> list[str]:
    """Independent re-check of a point against all rows and bounds; returns violations."""
    out = []
    for i, row in enumerate(lp.rows):
        lhs = sum(c * x[j] for j, c in row.coeffs.items())
        gap = lhs - row.rhs
        if row.relation == "<=" and gap > tol:
            out.append(f"row {row.name or i}: lhs exceeds rhs by {gap:.3e}")
        elif row.relation == "==" and abs(gap) > tol:
            out.append(f"row {row.name or i}: equality off by {gap:.3e}")
    for j in range(lp.num_vars):
        if x[j] < lp.lower[j] - tol:
            out.append(f"column {j}: below lower bound by {lp.lower[j] - x[j]:.3e}")
        if x[j] > lp.upper[j] + tol:
            out.append(f"column {j}: above upper bound by {x[j] - lp.upper[j]:.3e}")
    return out


def _do_pivot(T: np.ndarray, basis: np.ndarray, leave: int, enter: int) -> None:
    T[leave] /= T[leave, enter]
    col = T[:, enter].copy()
    col[leave] = 0.0
    T -= np.outer(col, T[leave])
    T[:, enter] = 0.0
    T[leave, enter] = 1.0
    basis[leave] = enter


def _pivot_loop(
    T: np.ndarray,
    basis: np.ndarray,
    banned: np.ndarray,
    stall_limit: int,
    max_pivots: int,
) -> str:
    """Run simplex pivots until optimal or unbounded.

    Default pricing is most-negative reduced cost; after `stall_limit`
    consecutive non-improving pivots it switches to Bland's rule, which
    guarantees termination on degenerate programs.
    """
    m = T.shape[0] - 1
    bland = False
    stall = 0
    pivots = 0
    while True:
        reduced = T[-1, :-1]
        if bland:
            candidates = np.where((reduced < -_OPT_TOL) & ~banned)[0]
            if candidates.size == 0:
                return "optimal"
            enter = int(candidates[0])
        else:
            masked = np.where(banned, np.inf, reduced)
            enter = int(np.argmin(masked))
            if masked[enter] >= -_OPT_TOL:
                return "optimal"
        col = T[:m, enter]
        positive = col > _PIVOT_TOL
        if not positive.any():
            return "unbounded"
        # Clamp tiny negative right-hand sides (degenerate round-off) so the
        # ratio test never goes negative and re-amplifies the error.
        ratios = np.full(m, np.inf)
        ratios[positive] = np.maximum(T[:m, -1][positive], 0.0) / col[positive]
        best = ratios.min()
        ties = np.where(ratios <= best + _TIE_TOL * (1.0 + abs(best)))[0]
        if bland:
            leave = int(ties[np.argmin(basis[ties])])
        else:
            # Among ratio ties take the largest pivot element for stability.
            leave = int(ties[np.argmax(col[ties])])
        previous = T[-1, -1]
        _do_pivot(T, basis, leave, enter)
        pivots += 1
        if pivots > max_pivots:
            raise ArithmeticError("simplex exceeded the pivot limit")
        if T[-1, -1] - previous <= _TIE_TOL:
            stall += 1
            if stall >= stall_limit:
                bland = True
        else:
            stall = 0


def solve_lp(lp: LinearProgram, *, stall_limit: int = 50, max_pivots: int = 500000) -> MilpSolution:
    """Solve an LP with the two-phase primal simplex.

    Returns OPTIMAL with a vertex point (and duals for the original rows),
    or an INFEASIBLE/UNBOUNDED certificate status.
    """
    lp.validate()
    n = lp.num_vars
    for j in range(n):
        if lp.lower[j] > lp.upper[j]:
            return MilpSolution(SolveStatus.INFEASIBLE, node_count=1)

    # Map every variable to nonnegative standard-form columns.
    offsets = [0.0] * n
    terms: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    ub_pairs: list[tuple[int, float]] = []  # (column, residual capacity)
    ncol = 0
    for j in range(n):
        lo, up = lp.lower[j], lp.upper[j]
        if lo == -INF and up == INF:
            terms[j] = [(ncol, 1.0), (ncol + 1, -1.0)]
            ncol += 2
        elif lo == -INF:
            offsets[j] = up
            terms[j] = [(ncol, -1.0)]
            ncol += 1
        else:
            offsets[j] = lo
            terms[j] = [(ncol, 1.0)]
            ncol += 1
            if up != INF:
                ub_pairs.append((terms[j][0][0], up - lo))
    nbase = ncol

    nrows = len(lp.rows) + len(ub_pairs)
    A = np.zeros((nrows, nbase))
    b = np.zeros(nrows)
    relations = []
    for i, row in enumerate(lp.rows):
        acc = row.rhs
        for j, c in row.coeffs.items():
            acc -= c * offsets[j]
            for col, sign in terms[j]:
                A[i, col] += c * sign
        b[i] = acc
        relations.append(row.relation)
    for k, (col, cap) in enumerate(ub_pairs):
        i = len(lp.rows) + k
        A[i, col] = 1.0
        b[i] = cap
        relations.append("<=")

    flip = b < 0.0
    A[flip] *= -1.0
    b[flip] *= -1.0
    for i in range(nrows):
        if flip[i] and relations[i] == "<=":
            relations[i] = ">="

    extra: list[tuple[int, float, str]] = []
    for i, rel in enumerate(relations):
        if rel == "<=":
            extra.append((i, 1.0, "slack"))
        elif rel == ">=":
            extra.append((i, -1.0, "surplus"))
            extra.append((i, 1.0, "art"))
        else:
            extra.append((i, 1.0, "art"))

    ntot = nbase + len(extra)
    M = np.zeros((nrows, ntot))
    M[:, :nbase] = A
    basis = np.full(nrows, -1, dtype=int)
    marker = np.full(nrows, -1, dtype=int)
    art_mask = np.zeros(ntot, dtype=bool)
    c_idx = nbase
    for i, sign, kind in extra:
        M[i, c_idx] = sign
        if kind == "slack":
            basis[i] = c_idx
            marker[i] = c_idx
        elif kind == "art":
            basis[i] = c_idx
            marker[i] = c_idx
            art_mask[c_idx] = True
        c_idx += 1

    T = np.zeros((nrows + 1, ntot + 1))
    T[:-1, :-1] = M
    T[:-1, -1] = b

    if art_mask.any():
        phase1 = art_mask.astype(float)
        T[-1, :-1] = phase1
        T[-1, -1] = 0.0
        for i in range(nrows):
            if art_mask[basis[i]]:
                T[-1] -= T[i]
        _pivot_loop(T, basis, np.zeros(ntot, dtype=bool), stall_limit, max_pivots)
        if -T[-1, -1] > _PHASE1_TOL:
            return MilpSolution(SolveStatus.INFEASIBLE, node_count=1)
        # Pivot leftover artificials out of the basis; rows where that is
        # impossible are redundant and stay harmlessly basic at level zero.
        for i in range(nrows):
            if art_mask[basis[i]]:
                row = np.abs(T[i, :-1])
                candidates = np.where(~art_mask & (row > _PHASE1_TOL))[0]
                if candidates.size:
                    _do_pivot(T, basis, i, int(candidates[0]))

    cost = np.zeros(ntot)
    for j, c in lp.objective.items():
        for col, sign in terms[j]:
            cost[col] += c * sign
    T[-1, :-1] = cost
    T[-1, -1] = 0.0
    for i in range(nrows):
        cb = cost[basis[i]]
        if cb:
            T[-1] -= cb * T[i]
    outcome = _pivot_loop(T, basis, art_mask, stall_limit, max_pivots)
    if outcome == "unbounded":
        return MilpSolution(SolveStatus.UNBOUNDED, node_count=1)

    x_std = np.zeros(ntot)
    x_std[basis] = np.maximum(T[:-1, -1], 0.0)
    x = [offsets[j] + sum(sign * x_std[col] for col, sign in terms[j]) for j in range(n)]
    objective = sum(c * x[j] for j, c in lp.objective.items())

    duals = []
    for i in range(len(lp.rows)):
        y = -float(T[-1, marker[i]])
        if flip[i]:
            y = -y
        duals.append(y)

    violations = check_feasible(lp, x, tol=1e-4)
    if violations:
        raise ArithmeticError(f"simplex lost feasibility: {violations[0]}")
    return MilpSolution(SolveStatus.OPTIMAL, x=[float(v) for v in x], objective=float(objective),
                        node_count=1, duals=duals)


def _most_fractional(x: Sequence[float], binaries: Sequence[int]) -> int | None:
    """Binary column farthest from integrality (ties to the lowest index), or None."""
    best_j = None
    best_dist = INTEGRALITY_TOL
    for j in binaries:
        dist = min(x[j], 1.0 - x[j])
        if dist > best_dist:
            best_dist = dist
            best_j = j
    return best_j


def solve_milp(
    lp: LinearProgram,
    binaries: Sequence[int],
    *,
    verbose: bool = False,
) -> MilpSolution:
    """Globally optimize over binary assignments with best-bound branch and bound.

    Branches on the most fractional binary (ties to the lowest index); nodes are
    explored in (bound, creation order). Node LPs are solved eagerly so the heap
    always orders by true LP bounds, making the result deterministic.
    """
    lp.validate()
    binaries = sorted(set(binaries))
    for j in binaries:
        if not (0 <= j < lp.num_vars):
            raise MalformedProgramError(f"binary index {j} out of range")
        if lp.lower[j] < 0 or lp.upper[j] > 1:
            raise MalformedProgramError(f"binary column {j} must have bounds within [0, 1]")

    nodes = 0
    root = solve_lp(lp)
    nodes += 1
    if root.status is SolveStatus.INFEASIBLE:
        return MilpSolution(SolveStatus.INFEASIBLE, node_count=nodes)
    if root.status is SolveStatus.UNBOUNDED:
        # Bounded binaries cannot cause unboundedness, so the MILP is unbounded
        # exactly when some integer-feasible point exists.
        probe = solve_milp(LinearProgram({}, lp.rows, lp.lower, lp.upper, lp.names), binaries)
        status = SolveStatus.UNBOUNDED if probe.status is SolveStatus.OPTIMAL else SolveStatus.INFEASIBLE
        return MilpSolution(status, node_count=nodes + probe.node_count)

    incumbent_obj: float | None = None
    incumbent_x: list[float] | None = None
    next_id = 1
    heap: list[tuple[float, int, dict[int, tuple[float, float]], list[float]]] = [
        (root.objective, 0, {}, root.x)
    ]
    while heap:
        bound, _, fixes, x = heapq.heappop(heap)
        if incumbent_obj is not None and bound >= incumbent_obj - _PRUNE_TOL:
            break
        branch_var = _most_fractional(x, binaries)
        if branch_var is None:
            snapped = list(x)
            for j in binaries:
                snapped[j] = float(round(snapped[j]))
            incumbent_obj = bound
            incumbent_x = snapped
            if verbose:
                logger.info("node %d: integral incumbent, objective %.9g", nodes, bound)
            break  # best-first: the first integral pop is optimal
        for value in (0.0, 1.0):
            child_fixes = dict(fixes)
            child_fixes[branch_var] = (value, value)
            sol = solve_lp(lp.with_bounds(child_fixes))
            nodes += 1
            if verbose:
                logger.info(
                    "node %d: fix x%d=%g -> %s%s",
                    nodes,
                    branch_var,
                    value,
                    sol.status.value,
                    f", bound {sol.objective:.9g}" if sol.objective is not None else "",
                )
            if sol.status is SolveStatus.OPTIMAL and (
                incumbent_obj is None or sol.objective < incumbent_obj - _PRUNE_TOL
            ):
                heapq.heappush(heap, (sol.objective, next_id, child_fixes, sol.x))
                next_id += 1

    if incumbent_x is None:
        return MilpSolution(SolveStatus.INFEASIBLE, node_count=nodes)
    return MilpSolution(
        SolveStatus.OPTIMAL, x=incumbent_x, objective=incumbent_obj, node_count=nodes
    )
