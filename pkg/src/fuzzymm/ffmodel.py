"""In-memory representation of fully fuzzy minimax mixed 0-1 linear programs.

A model holds triangular-fuzzy-coefficient linear constraints over fuzzy
nonnegative and crisp binary variables, plus the list of objective rows whose
minimal upper bound is minimized. Models are built single-writer and treated
as immutable afterwards; evaluate() is pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .fuzzy_core import (
    TFN,
    ZERO,
    TriangularFuzzyNumber,
    add,
    from_json,
    less_or_approx,
    mul,
    scale,
    theta_mub,
    to_json,
)


class DuplicateNameError(ValueError):
    """Variable name already used in this model."""


class UnknownVariableError(ValueError):
    """Expression or constraint references a variable the model does not own."""


class EmptyObjectiveError(ValueError):
    """A minimax objective needs at least one row."""


class IncompleteAssignmentError(ValueError):
    """Evaluation needs a value for every model variable."""


class KindMismatchError(ValueError):
    """Assigned value does not fit the variable kind."""


class VariableKind(Enum):
    FUZZY_NONNEGATIVE = "fuzzy_nonnegative"
    CRISP_BINARY = "crisp_binary"


class Relation(Enum):
    LESS_OR_APPROX = "leq"
    EQUAL = "eq"


@dataclass(frozen=True)
class VariableRef:
    id: int
    kind: VariableKind
    name: str


_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class FuzzyLinearExpression:
    """Sum of (TFN coefficient, variable) terms plus a TFN constant.

    Terms are merged so each variable appears at most once, in first-occurrence
    order.
    """

    __slots__ = ("terms", "constant")

    def __init__(
        self,
        terms: Iterable[tuple[TriangularFuzzyNumber, VariableRef]] = (),
        constant: TriangularFuzzyNumber = ZERO,
    ):
        merged: dict[int, tuple[TriangularFuzzyNumber, VariableRef]] = {}
        for coef, ref in terms:
            if ref.id in merged:
                prev, _ = merged[ref.id]
                merged[ref.id] = (add(prev, coef), ref)
            else:
                merged[ref.id] = (coef, ref)
        self.terms: tuple[tuple[TriangularFuzzyNumber, VariableRef], ...] = tuple(merged.values())
        self.constant = constant

    def __add__(self, other: "FuzzyLinearExpression") -> "FuzzyLinearExpression":
        return FuzzyLinearExpression(
            list(self.terms) + list(other.terms), add(self.constant, other.constant)
        )

    def variable_refs(self) -> list[VariableRef]:
        return [ref for _, ref in self.terms]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        parts = [f"{coef!r}*{ref.name}" for coef, ref in self.terms]
        if not self.constant.is_degenerate or self.constant.lo != 0:
            parts.append(repr(self.constant))
        return " + ".join(parts) if parts else "0"


@dataclass
class FuzzyConstraint:
    """expression  (<~ | ==)  rhs, with the rhs optionally scaled by one binary variable.

    The binary right-hand side `rhs * y` keeps constraints like capacity rows in
    their natural orientation, so each component of the rhs triple pairs with
    the matching component row; folding `-rhs * y` into the left side would
    reverse that pairing.
    """

    expression: FuzzyLinearExpression
    relation: Relation
    rhs: TriangularFuzzyNumber
    rhs_binary: VariableRef | None = None


@dataclass
class EvaluationResult:
    objective: TriangularFuzzyNumber
    feasible: bool
    violations: list[str]
    row_values: list[TriangularFuzzyNumber]


class FuzzyMinimaxModel:
    """Builder for a fully fuzzy minimax program."""

    def __init__(self) -> None:
        self.variables: list[VariableRef] = []
        self.constraints: list[FuzzyConstraint] = []
        self.minimax_rows: list[FuzzyLinearExpression] = []
        self._by_name: dict[str, VariableRef] = {}

    def add_variable(self, name: str, kind: VariableKind) -> VariableRef:
        if not _NAME_RE.match(name):
            raise ValueError(f"invalid variable name {name!r}")
        if name in self._by_name:
            raise DuplicateNameError(f"variable name {name!r} already in use")
        ref = VariableRef(len(self.variables), kind, name)
        self.variables.append(ref)
        self._by_name[name] = ref
        return ref

    def variable(self, name: str) -> VariableRef:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownVariableError(f"no variable named {name!r}") from None

    def _check_ref(self, ref: VariableRef) -> None:
        if not (0 <= ref.id < len(self.variables)) or self.variables[ref.id] is not ref:
            raise UnknownVariableError(f"variable {ref.name!r} does not belong to this model")

    def _check_expression(self, expr: FuzzyLinearExpression) -> None:
        for _, ref in expr.terms:
            self._check_ref(ref)

    def add_constraint(
        self,
        expression: FuzzyLinearExpression,
        relation: Relation,
        rhs: TriangularFuzzyNumber,
        rhs_binary: VariableRef | None = None,
    ) -> int:
        self._check_expression(expression)
        if rhs_binary is not None:
            self._check_ref(rhs_binary)
            if rhs_binary.kind is not VariableKind.CRISP_BINARY:
                raise KindMismatchError("rhs can only be scaled by a binary variable")
        self.constraints.append(FuzzyConstraint(expression, relation, rhs, rhs_binary))
        return len(self.constraints) - 1

    def set_minimax_rows(
        self,
        rows: Sequence[FuzzyLinearExpression],
        shared: FuzzyLinearExpression | None = None,
    ) -> None:
        """Store the objective rows, folding an optional shared additive term into each."""
        rows = list(rows)
        if not rows:
            raise EmptyObjectiveError("minimax objective needs at least one row")
        if shared is not None:
            self._check_expression(shared)
            rows = [row + shared for row in rows]
        for row in rows:
            self._check_expression(row)
        self.minimax_rows = rows

    # -- evaluation ---------------------------------------------------------

    def _normalize_assignment(
        self, assignment: Mapping
    ) -> dict[str, TriangularFuzzyNumber]:
        values: dict[str, TriangularFuzzyNumber] = {}
        for key, val in assignment.items():
            name = key.name if isinstance(key, VariableRef) else key
            if name not in self._by_name:
                raise UnknownVariableError(f"assignment mentions unknown variable {name!r}")
            values[name] = val
        missing = [v.name for v in self.variables if v.name not in values]
        if missing:
            raise IncompleteAssignmentError(f"missing values for {missing}")
        return values

    def _binary_value(self, ref: VariableRef, val: TriangularFuzzyNumber, tol: float) -> float:
        if abs(val.hi - val.lo) > tol:
            raise KindMismatchError(f"binary {ref.name!r} assigned a non-degenerate value")
        v = val.mid
        if abs(v) <= tol:
            return 0.0
        if abs(v - 1.0) <= tol:
            return 1.0
        raise KindMismatchError(f"binary {ref.name!r} assigned {v}, expected 0 or 1")

    def _fuzzy_value(
        self, ref: VariableRef, val: TriangularFuzzyNumber, tol: float
    ) -> TriangularFuzzyNumber:
        if val.lo < -tol:
            raise KindMismatchError(f"fuzzy variable {ref.name!r} assigned negative support {val.lo}")
        if val.lo < 0:
            # Within-tolerance numerical dust from solvers: clamp to the domain.
            return TriangularFuzzyNumber(0.0, max(val.mid, 0.0), max(val.hi, 0.0))
        return val

    def _eval_expression(
        self,
        expr: FuzzyLinearExpression,
        values: dict[str, TriangularFuzzyNumber],
        binaries: dict[str, float],
    ) -> TriangularFuzzyNumber:
        total = expr.constant
        for coef, ref in expr.terms:
            if ref.kind is VariableKind.CRISP_BINARY:
                total = add(total, scale(binaries[ref.name], coef))
            else:
                total = add(total, mul(coef, values[ref.name]))
        return total

    def evaluate(self, assignment: Mapping, tol: float = 0.0) -> EvaluationResult:
        """Objective and feasibility of a full assignment.

        Binaries must carry degenerate 0/1 values; fuzzy variables must have
        nonnegative support (within tol). Feasibility compares each <~ row
        componentwise and each == row by componentwise equality within tol.
        """
        if not self.minimax_rows:
            raise EmptyObjectiveError("model has no minimax rows")
        raw = self._normalize_assignment(assignment)
        values: dict[str, TriangularFuzzyNumber] = {}
        binaries: dict[str, float] = {}
        for ref in self.variables:
            val = raw[ref.name]
            if ref.kind is VariableKind.CRISP_BINARY:
                binaries[ref.name] = self._binary_value(ref, val, tol)
            else:
                values[ref.name] = self._fuzzy_value(ref, val, tol)

        violations: list[str] = []
        for idx, con in enumerate(self.constraints):
            lhs = self._eval_expression(con.expression, values, binaries)
            rhs = con.rhs
            if con.rhs_binary is not None:
                rhs = scale(binaries[con.rhs_binary.name], rhs)
            if con.relation is Relation.LESS_OR_APPROX:
                if not less_or_approx(lhs, rhs, tol):
                    worst = max(lhs.lo - rhs.lo, lhs.mid - rhs.mid, lhs.hi - rhs.hi)
                    violations.append(f"constraint {idx}: exceeds rhs by {worst:.3e}")
            else:
                gaps = (abs(lhs.lo - rhs.lo), abs(lhs.mid - rhs.mid), abs(lhs.hi - rhs.hi))
                if max(gaps) > tol:
                    violations.append(f"constraint {idx}: equality off by {max(gaps):.3e}")

        row_values = [self._eval_expression(row, values, binaries) for row in self.minimax_rows]
        objective = theta_mub(row_values)
        return EvaluationResult(objective, not violations, violations, row_values)


# -- serialization ----------------------------------------------------------


def _expression_to_json(expr: FuzzyLinearExpression) -> dict:
    doc: dict = {"terms": [[ref.name, to_json(coef)] for coef, ref in expr.terms]}
    if not (expr.constant.is_degenerate and expr.constant.lo == 0):
        doc["constant"] = to_json(expr.constant)
    return doc


def _expression_from_json(doc: dict, model: FuzzyMinimaxModel) -> FuzzyLinearExpression:
    terms = [(from_json(coef), model.variable(name)) for name, coef in doc.get("terms", [])]
    constant = from_json(doc["constant"]) if "constant" in doc else ZERO
    return FuzzyLinearExpression(terms, constant)


def model_to_json(model: FuzzyMinimaxModel) -> dict:
    """Round-trip-stable JSON document for a model."""
    return {
        "variables": [{"name": v.name, "kind": v.kind.value} for v in model.variables],
        "constraints": [
            {
                "relation": con.relation.value,
                "rhs": to_json(con.rhs),
                **({"rhs_binary": con.rhs_binary.name} if con.rhs_binary else {}),
                **_expression_to_json(con.expression),
            }
            for con in model.constraints
        ],
        "minimax_rows": [_expression_to_json(row) for row in model.minimax_rows],
    }


def model_from_json(doc: dict) -> FuzzyMinimaxModel:
    model = FuzzyMinimaxModel()
    for var in doc["variables"]:
        model.add_variable(var["name"], VariableKind(var["kind"]))
    for con in doc.get("constraints", []):
        model.add_constraint(
            _expression_from_json(con, model),
            Relation(con["relation"]),
            from_json(con["rhs"]),
            model.variable(con["rhs_binary"]) if "rhs_binary" in con else None,
        )
    rows = [_expression_from_json(row, model) for row in doc.get("minimax_rows", [])]
    if rows:
        model.set_minimax_rows(rows)
    return model
