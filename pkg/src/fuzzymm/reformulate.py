"""Lowering of a fuzzy minimax model to an equivalent crisp three-objective MILP.

Every fuzzy nonnegative variable expands into three continuous columns
(lower/mid/upper), each binary stays a single column reused by all component
rows, and one free (lower, mid, upper) objective triple is introduced and
bounded below by the lowered objective rows. Solutions of the crisp program
lift back to fuzzy assignments.

Emitted row names are stable and documented:

  mo1_j/mo2_j/mo3_j    objective row j bounded by the objective triple, per component
  mo4_k/mo5_k/mo6_k    source constraint k, per component
  mo7/mo8              ordering of the objective triple
  mo9_j_t/mo10_j_t     ordering of term t's lowered product in objective row j
  mo11_i/mo12_i        ordering of fuzzy variable i's expansion

The remaining structure is carried by bounds: lower components of fuzzy
variables are nonnegative, and binaries are single [0,1] integer columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .fuzzy_core import TFN, TriangularFuzzyNumber
from .ffmodel import (
    FuzzyLinearExpression,
    FuzzyMinimaxModel,
    Relation,
    VariableKind,
)
from .milp import INF, LinearProgram, LinearRow

_COMPONENTS = ("lo", "mid", "hi")

OBJECTIVE_NAMES = ("THETA_LO", "THETA_MID", "THETA_HI")


class InfeasiblePointError(ValueError):
    """Point violates the crisp program beyond tolerance and cannot be lifted."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__(f"point is not feasible: {violations[:3]}")


@dataclass(frozen=True)
class CrispVariable:
    """Crisp column with its origin in the fuzzy model.

    origin is (tag, source_name) with tag in {"x_lo", "x_mid", "x_hi",
    "binary", "theta_lo", "theta_mid", "theta_hi"}; source_name is None for the
    objective triple.
    """

    id: int
    name: str
    kind: str  # "continuous" | "binary"
    lower: float
    upper: float
    origin: tuple[str, str | None]


@dataclass
class TriObjectiveMilp:
    """Crisp program with three minimize objectives over the theta triple."""

    variables: list[CrispVariable]
    rows: list[LinearRow]
    objectives: list[tuple[str, dict[int, float]]]
    theta_cols: tuple[int, int, int]

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    def var_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def binaries(self) -> list[int]:
        return [v.id for v in self.variables if v.kind == "binary"]

    def column(self, name: str) -> int:
        for v in self.variables:
            if v.name == name:
                return v.id
        raise KeyError(name)

    def to_linear_program(
        self, objective: Mapping[int, float], extra_rows: Sequence[LinearRow] = ()
    ) -> LinearProgram:
        """Single-objective view for the solver; extra rows are appended unchanged."""
        return LinearProgram(
            objective=dict(objective),
            rows=list(self.rows) + list(extra_rows),
            lower=[v.lower for v in self.variables],
            upper=[v.upper for v in self.variables],
            names=self.var_names(),
        )


def lower_product_components(
    coef: TriangularFuzzyNumber, x_cols: tuple[int, int, int]
) -> tuple[tuple[int, float], tuple[int, float], tuple[int, float]]:
    """Linear forms of the three components of coef * x over x's expansion columns.

    The case split follows the sign of the constant coefficient (x itself is
    fuzzy nonnegative). The mid form always uses the mid column.
    """
    lo_col, mid_col, hi_col = x_cols
    if coef.lo >= 0:
        return ((lo_col, coef.lo), (mid_col, coef.mid), (hi_col, coef.hi))
    if coef.hi < 0:
        return ((hi_col, coef.lo), (mid_col, coef.mid), (lo_col, coef.hi))
    return ((hi_col, coef.lo), (mid_col, coef.mid), (hi_col, coef.hi))


class _Lowering:
    """Column bookkeeping while lowering one model."""

    def __init__(self, model: FuzzyMinimaxModel):
        self.model = model
        self.variables: list[CrispVariable] = []
        self.fuzzy_cols: dict[int, tuple[int, int, int]] = {}
        self.binary_cols: dict[int, int] = {}
        seen: set[str] = set()

        def emit(name: str, kind: str, lower: float, upper: float, origin) -> int:
            if name in seen:
                raise ValueError(f"crisp column name collision: {name!r}")
            seen.add(name)
            var = CrispVariable(len(self.variables), name, kind, lower, upper, origin)
            self.variables.append(var)
            return var.id

        for ref in model.variables:
            if ref.kind is VariableKind.FUZZY_NONNEGATIVE:
                # Only the lower component is bounded explicitly; the ordering
                # rows make 0 <= lo <= mid <= hi hold, so the implied zero
                # lower bounds on mid/hi are safe and keep the solver small.
                cols = (
                    emit(f"{ref.name}__lo", "continuous", 0.0, INF, ("x_lo", ref.name)),
                    emit(f"{ref.name}__mid", "continuous", 0.0, INF, ("x_mid", ref.name)),
                    emit(f"{ref.name}__hi", "continuous", 0.0, INF, ("x_hi", ref.name)),
                )
                self.fuzzy_cols[ref.id] = cols
            else:
                self.binary_cols[ref.id] = emit(ref.name, "binary", 0.0, 1.0, ("binary", ref.name))
        self.theta_cols = (
            emit("theta__lo", "continuous", -INF, INF, ("theta_lo", None)),
            emit("theta__mid", "continuous", -INF, INF, ("theta_mid", None)),
            emit("theta__hi", "continuous", -INF, INF, ("theta_hi", None)),
        )

    def expression_components(
        self, expr: FuzzyLinearExpression
    ) -> tuple[list[dict[int, float]], tuple[float, float, float]]:
        """Three sparse component forms plus the constant's components."""
        comps: list[dict[int, float]] = [{}, {}, {}]
        for coef, ref in expr.terms:
            if ref.kind is VariableKind.FUZZY_NONNEGATIVE:
                forms = lower_product_components(coef, self.fuzzy_cols[ref.id])
            else:
                y = self.binary_cols[ref.id]
                forms = ((y, coef.lo), (y, coef.mid), (y, coef.hi))
            for k in range(3):
                col, c = forms[k]
                comps[k][col] = comps[k].get(col, 0.0) + c
        return comps, expr.constant.as_tuple()


def reformulate(model: FuzzyMinimaxModel) -> TriObjectiveMilp:
    """Lower a fuzzy minimax model to its crisp three-objective MILP."""
    if not model.minimax_rows:
        raise ValueError("model has no minimax rows to lower")
    low = _Lowering(model)
    rows: list[LinearRow] = []
    t_lo, t_mid, t_hi = low.theta_cols

    # Objective rows bounded by the theta triple, one block per component.
    row_comps = []
    for j, row in enumerate(model.minimax_rows):
        comps, consts = low.expression_components(row)
        row_comps.append((comps, consts))
    for k, theta_col, tag in ((0, t_lo, "mo1"), (1, t_mid, "mo2"), (2, t_hi, "mo3")):
        for j, (comps, consts) in enumerate(row_comps):
            coeffs = dict(comps[k])
            coeffs[theta_col] = coeffs.get(theta_col, 0.0) - 1.0
            rows.append(LinearRow(coeffs, "<=", -consts[k], f"{tag}_{j}"))

    # Source constraints, componentwise with the original relation.
    for k, tag in ((0, "mo4"), (1, "mo5"), (2, "mo6")):
        for idx, con in enumerate(model.constraints):
            comps, consts = low.expression_components(con.expression)
            coeffs = dict(comps[k])
            rhs_k = con.rhs.as_tuple()[k]
            if con.rhs_binary is not None:
                y = low.binary_cols[con.rhs_binary.id]
                coeffs[y] = coeffs.get(y, 0.0) - rhs_k
                rhs_value = -consts[k]
            else:
                rhs_value = rhs_k - consts[k]
            relation = "<=" if con.relation is Relation.LESS_OR_APPROX else "=="
            rows.append(LinearRow(coeffs, relation, rhs_value, f"{tag}_{idx}"))

    rows.append(LinearRow({t_lo: 1.0, t_mid: -1.0}, "<=", 0.0, "mo7"))
    rows.append(LinearRow({t_mid: 1.0, t_hi: -1.0}, "<=", 0.0, "mo8"))

    # Ordering of each lowered objective product. Binary terms would reduce to
    # (coef.lo - coef.mid) * y <= 0, vacuous because triplets are sorted, so
    # they are omitted.
    def _term_row(a: tuple[int, float], b: tuple[int, float]) -> dict[int, float]:
        coeffs: dict[int, float] = {}
        coeffs[a[0]] = coeffs.get(a[0], 0.0) + a[1]
        coeffs[b[0]] = coeffs.get(b[0], 0.0) - b[1]
        return coeffs

    mo9: list[LinearRow] = []
    mo10: list[LinearRow] = []
    for j, row in enumerate(model.minimax_rows):
        t = 0
        for coef, ref in row.terms:
            if ref.kind is not VariableKind.FUZZY_NONNEGATIVE:
                continue
            forms = lower_product_components(coef, low.fuzzy_cols[ref.id])
            mo9.append(LinearRow(_term_row(forms[0], forms[1]), "<=", 0.0, f"mo9_{j}_{t}"))
            mo10.append(LinearRow(_term_row(forms[1], forms[2]), "<=", 0.0, f"mo10_{j}_{t}"))
            t += 1
    rows.extend(mo9)
    rows.extend(mo10)

    for ref in model.variables:
        if ref.kind is VariableKind.FUZZY_NONNEGATIVE:
            lo_col, mid_col, hi_col = low.fuzzy_cols[ref.id]
            rows.append(LinearRow({lo_col: 1.0, mid_col: -1.0}, "<=", 0.0, f"mo11_{ref.id}"))
            rows.append(LinearRow({mid_col: 1.0, hi_col: -1.0}, "<=", 0.0, f"mo12_{ref.id}"))

    objectives = [
        (OBJECTIVE_NAMES[0], {t_lo: 1.0}),
        (OBJECTIVE_NAMES[1], {t_mid: 1.0}),
        (OBJECTIVE_NAMES[2], {t_hi: 1.0}),
    ]
    return TriObjectiveMilp(low.variables, rows, objectives, low.theta_cols)


# -- lifting crisp points back to fuzzy solutions ----------------------------


def point_violations(
    tri: TriObjectiveMilp, point: Sequence[float], tol: float = 1e-6
) -> list[str]:
    """Row, bound, and integrality violations of a crisp point beyond tol."""
    out = []
    for row in tri.rows:
        lhs = sum(c * point[j] for j, c in row.coeffs.items())
        gap = lhs - row.rhs
        if row.relation == "<=" and gap > tol:
            out.append(f"row {row.name}: exceeds rhs by {gap:.3e}")
        elif row.relation == "==" and abs(gap) > tol:
            out.append(f"row {row.name}: equality off by {gap:.3e}")
    for var in tri.variables:
        v = point[var.id]
        if v < var.lower - tol:
            out.append(f"{var.name}: below lower bound by {var.lower - v:.3e}")
        if v > var.upper + tol:
            out.append(f"{var.name}: above upper bound by {v - var.upper:.3e}")
        if var.kind == "binary" and abs(v - round(v)) > tol:
            out.append(f"{var.name}: not integral ({v})")
    return out


@dataclass
class LiftedSolution:
    assignment: dict[str, TriangularFuzzyNumber]
    theta: TriangularFuzzyNumber


def lift_solution(
    tri: TriObjectiveMilp, point: Sequence[float], tol: float = 1e-6
) -> LiftedSolution:
    """Group a feasible crisp point back into fuzzy triplets.

    The ordering rows guarantee valid triplets up to solver round-off;
    inversions within tol are clamped, anything larger raises.
    """
    violations = point_violations(tri, point, tol)
    if violations:
        raise InfeasiblePointError(violations)

    triples: dict[str, dict[str, float]] = {}
    assignment: dict[str, TriangularFuzzyNumber] = {}
    theta_vals: dict[str, float] = {}
    for var in tri.variables:
        tag, source = var.origin
        value = float(point[var.id])
        if tag == "binary":
            assignment[source] = TFN(float(round(value)), float(round(value)), float(round(value)))
        elif tag.startswith("x_"):
            triples.setdefault(source, {})[tag[2:]] = value
        else:
            theta_vals[tag[6:]] = value

    for name, comp in triples.items():
        # Violations were already bounded by tol, so these clamps move values
        # by at most tol while restoring exact domain and ordering.
        lo = max(comp["lo"], 0.0)
        mid = max(comp["mid"], lo)
        hi = max(comp["hi"], mid)
        assignment[name] = TFN(lo, mid, hi)
    theta = TFN(
        min(theta_vals["lo"], theta_vals["mid"]),
        theta_vals["mid"],
        max(theta_vals["hi"], theta_vals["mid"]),
    )
    return LiftedSolution(assignment, theta)


# -- sparse text export -------------------------------------------------------

_TEXT_HEADER = "triobj-milp v1"


def _fmt_bound(v: float) -> str:
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return repr(v)


def write_text(tri: TriObjectiveMilp) -> str:
    """Plain sparse text export; stable names, round-trip exact."""
    lines = [_TEXT_HEADER]
    for v in tri.variables:
        lines.append(f"var {v.name} {v.kind} {_fmt_bound(v.lower)} {_fmt_bound(v.upper)}")
    names = tri.var_names()
    for obj_name, coeffs in tri.objectives:
        body = " ".join(f"{names[j]}:{repr(c)}" for j, c in sorted(coeffs.items()))
        lines.append(f"obj {obj_name} {body}")
    for row in tri.rows:
        body = " ".join(f"{names[j]}:{repr(c)}" for j, c in sorted(row.coeffs.items()))
        sep = " " if body else ""
        lines.append(f"row {row.name} {row.relation} {repr(row.rhs)}{sep}{body}")
    return "\n".join(lines) + "\n"


def read_text(text: str) -> TriObjectiveMilp:
    """Parse the export produced by write_text."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != _TEXT_HEADER:
        raise ValueError("not a triobj-milp v1 document")
    variables: list[CrispVariable] = []
    col: dict[str, int] = {}
    objectives: list[tuple[str, dict[int, float]]] = []
    rows: list[LinearRow] = []

    def _parse_terms(parts: list[str]) -> dict[int, float]:
        coeffs: dict[int, float] = {}
        for part in parts:
            name, _, c = part.rpartition(":")
            coeffs[col[name]] = float(c)
        return coeffs

    for ln in lines[1:]:
        parts = ln.split()
        kind = parts[0]
        if kind == "var":
            name, vkind, lo, up = parts[1], parts[2], float(parts[3]), float(parts[4])
            if name in col:
                raise ValueError(f"duplicate variable {name!r}")
            origin = ("binary", name) if vkind == "binary" else ("x_lo", name)
            if name.startswith("theta__"):
                origin = (f"theta_{name.split('__')[1]}", None)
            elif name.endswith("__mid"):
                origin = ("x_mid", name[: -len("__mid")])
            elif name.endswith("__hi"):
                origin = ("x_hi", name[: -len("__hi")])
            elif name.endswith("__lo"):
                origin = ("x_lo", name[: -len("__lo")])
            var = CrispVariable(len(variables), name, vkind, lo, up, origin)
            variables.append(var)
            col[name] = var.id
        elif kind == "obj":
            objectives.append((parts[1], _parse_terms(parts[2:])))
        elif kind == "row":
            name, relation, rhs = parts[1], parts[2], float(parts[3])
            rows.append(LinearRow(_parse_terms(parts[4:]), relation, rhs, name))
        else:
            raise ValueError(f"unrecognized line: {ln!r}")
    theta = (col["theta__lo"], col["theta__mid"], col["theta__hi"])
    return TriObjectiveMilp(variables, rows, objectives, theta)
