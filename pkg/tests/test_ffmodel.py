import numpy as np
import pytest

from fuzzymm.ffmodel import (
    DuplicateNameError,
    EmptyObjectiveError,
    FuzzyLinearExpression,
    FuzzyMinimaxModel,
    IncompleteAssignmentError,
    KindMismatchError,
    Relation,
    UnknownVariableError,
    VariableKind,
    model_from_json,
    model_to_json,
)
from fuzzymm.fuzzy_core import TFN, is_upper_bound, less_or_approx, tfn, theta_mub


def two_var_model():
    model = FuzzyMinimaxModel()
    x0 = model.add_variable("x0", VariableKind.FUZZY_NONNEGATIVE)
    x1 = model.add_variable("x1", VariableKind.FUZZY_NONNEGATIVE)
    y = model.add_variable("y", VariableKind.CRISP_BINARY)
    return model, x0, x1, y


class TestBuilder:
    def test_add_variable(self):
        model, x0, x1, y = two_var_model()
        assert (x0.id, x1.id, y.id) == (0, 1, 2)
        assert y.kind is VariableKind.CRISP_BINARY
        with pytest.raises(DuplicateNameError):
            model.add_variable("x0", VariableKind.FUZZY_NONNEGATIVE)
        with pytest.raises(ValueError):
            model.add_variable("bad name", VariableKind.FUZZY_NONNEGATIVE)

    def test_add_constraint(self):
        model, x0, x1, y = two_var_model()
        idx = model.add_constraint(
            FuzzyLinearExpression([(tfn(1, 2, 3), x0)]), Relation.LESS_OR_APPROX, tfn(10, 12, 14)
        )
        assert idx == 0
        idx = model.add_constraint(
            FuzzyLinearExpression([(tfn(1), x0), (tfn(1), x1)]), Relation.EQUAL, tfn(5)
        )
        assert idx == 1

    def test_foreign_variable_rejected(self):
        model, x0, *_ = two_var_model()
        other, ox, *_ = two_var_model()
        with pytest.raises(UnknownVariableError):
            model.add_constraint(
                FuzzyLinearExpression([(tfn(1), ox)]), Relation.EQUAL, tfn(0)
            )

    def test_rhs_binary_must_be_binary(self):
        model, x0, x1, y = two_var_model()
        with pytest.raises(KindMismatchError):
            model.add_constraint(
                FuzzyLinearExpression([(tfn(1), x0)]), Relation.LESS_OR_APPROX, tfn(1), rhs_binary=x1
            )

    def test_terms_merge(self):
        model, x0, *_ = two_var_model()
        expr = FuzzyLinearExpression([(tfn(1, 2, 3), x0), (tfn(1, 1, 1), x0)])
        assert len(expr.terms) == 1
        assert expr.terms[0][0] == tfn(2, 3, 4)

    def test_set_minimax_rows(self):
        model, x0, x1, y = two_var_model()
        r1 = FuzzyLinearExpression([(tfn(1), x0)])
        r2 = FuzzyLinearExpression([(tfn(1), x1)])
        shared = FuzzyLinearExpression([(tfn(2, 3, 4), y)])
        model.set_minimax_rows([r1, r2], shared)
        assert len(model.minimax_rows) == 2
        names = [[ref.name for _, ref in row.terms] for row in model.minimax_rows]
        assert names == [["x0", "y"], ["x1", "y"]]
        with pytest.raises(EmptyObjectiveError):
            model.set_minimax_rows([])


class TestEvaluate:
    def test_single_row(self):
        model = FuzzyMinimaxModel()
        x = model.add_variable("x", VariableKind.FUZZY_NONNEGATIVE)
        model.set_minimax_rows([FuzzyLinearExpression([(tfn(1), x)])])
        result = model.evaluate({"x": tfn(1, 2, 3)})
        assert result.objective == tfn(1, 2, 3)
        assert result.feasible

    def test_mixed_sign_coefficient(self):
        model = FuzzyMinimaxModel()
        x = model.add_variable("x", VariableKind.FUZZY_NONNEGATIVE)
        model.set_minimax_rows([FuzzyLinearExpression([(tfn(-1, 1, 2), x)])])
        result = model.evaluate({"x": tfn(2, 3, 4)})
        assert result.objective == tfn(-4, 3, 8)

    def test_crisp_model_matches_crisp_minimax(self):
        rng = np.random.default_rng(40)
        for _ in range(50):
            model = FuzzyMinimaxModel()
            refs = [model.add_variable(f"x{i}", VariableKind.FUZZY_NONNEGATIVE) for i in range(3)]
            coefs = rng.uniform(-4, 4, size=(2, 3))
            rows = [
                FuzzyLinearExpression([(tfn(float(coefs[r, i])), refs[i]) for i in range(3)])
                for r in range(2)
            ]
            model.set_minimax_rows(rows)
            values = rng.uniform(0, 5, size=3)
            result = model.evaluate({f"x{i}": tfn(float(values[i])) for i in range(3)})
            expected = max(float(coefs[r] @ values) for r in range(2))
            assert result.objective.mid == pytest.approx(expected, abs=1e-9)
            assert result.objective.is_degenerate

    def test_binary_terms_and_rhs_binary(self):
        model = FuzzyMinimaxModel()
        x = model.add_variable("x", VariableKind.FUZZY_NONNEGATIVE)
        y = model.add_variable("y", VariableKind.CRISP_BINARY)
        model.set_minimax_rows([FuzzyLinearExpression([(tfn(1), x), (tfn(5, 6, 7), y)])])
        model.add_constraint(
            FuzzyLinearExpression([(tfn(1), x)]), Relation.LESS_OR_APPROX, tfn(2, 3, 4), rhs_binary=y
        )
        closed = model.evaluate({"x": tfn(0), "y": tfn(0)})
        assert closed.feasible and closed.objective == tfn(0)
        open_ = model.evaluate({"x": tfn(1, 2, 3), "y": tfn(1)})
        assert open_.feasible and open_.objective == tfn(6, 8, 10)
        overflow = model.evaluate({"x": tfn(1, 2, 3), "y": tfn(0)})
        assert not overflow.feasible and overflow.violations

    def test_equality_constraint_tolerance(self):
        model = FuzzyMinimaxModel()
        x = model.add_variable("x", VariableKind.FUZZY_NONNEGATIVE)
        model.set_minimax_rows([FuzzyLinearExpression([(tfn(1), x)])])
        model.add_constraint(FuzzyLinearExpression([(tfn(1), x)]), Relation.EQUAL, tfn(1, 2, 3))
        assert model.evaluate({"x": tfn(1, 2, 3)}).feasible
        assert not model.evaluate({"x": tfn(1, 2, 3.001)}).feasible
        assert model.evaluate({"x": tfn(1, 2, 3.001)}, tol=1e-2).feasible

    def test_assignment_errors(self):
        model = FuzzyMinimaxModel()
        x = model.add_variable("x", VariableKind.FUZZY_NONNEGATIVE)
        y = model.add_variable("y", VariableKind.CRISP_BINARY)
        model.set_minimax_rows([FuzzyLinearExpression([(tfn(1), x)])])
        with pytest.raises(IncompleteAssignmentError):
            model.evaluate({"x": tfn(1)})
        with pytest.raises(KindMismatchError):
            model.evaluate({"x": tfn(1), "y": tfn(0, 1, 1)})
        with pytest.raises(KindMismatchError):
            model.evaluate({"x": tfn(1), "y": tfn(0.4)})
        with pytest.raises(KindMismatchError):
            model.evaluate({"x": tfn(-1, 0, 1), "y": tfn(0)})
        with pytest.raises(UnknownVariableError):
            model.evaluate({"x": tfn(1), "y": tfn(0), "z": tfn(0)})

    def test_objective_monotone_in_extra_rows(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            base = FuzzyMinimaxModel()
            x = base.add_variable("x", VariableKind.FUZZY_NONNEGATIVE)
            r1 = FuzzyLinearExpression([(tfn(*sorted(rng.uniform(-3, 3, 3))), x)])
            r2 = FuzzyLinearExpression([(tfn(*sorted(rng.uniform(-3, 3, 3))), x)])
            value = tfn(*sorted(rng.uniform(0, 4, 3)))
            base.set_minimax_rows([r1])
            one = base.evaluate({"x": value}).objective
            base.set_minimax_rows([r1, r2])
            two = base.evaluate({"x": value}).objective
            assert two.lo >= one.lo and two.mid >= one.mid and two.hi >= one.hi

    def test_feasibility_invariant_under_reordering(self):
        model, x0, x1, y = two_var_model()
        e1 = FuzzyLinearExpression([(tfn(1), x0), (tfn(2), x1)])
        e2 = FuzzyLinearExpression([(tfn(2), x1), (tfn(1), x0)])
        model.add_constraint(e1, Relation.LESS_OR_APPROX, tfn(10))
        model.set_minimax_rows([e1])
        other, o0, o1, oy = two_var_model()
        other.add_constraint(e2_re := FuzzyLinearExpression([(tfn(2), o1), (tfn(1), o0)]),
                             Relation.LESS_OR_APPROX, tfn(10))
        other.set_minimax_rows([e2_re])
        assignment = {"x0": tfn(1, 2, 3), "x1": tfn(0, 1, 2), "y": tfn(1)}
        assert model.evaluate(assignment).feasible == other.evaluate(assignment).feasible

    def test_theta_pair_satisfies_auxiliary_constraints(self):
        # For any feasible assignment, the pair (assignment, theta_mub(rows))
        # bounds every row from above.
        rng = np.random.default_rng(42)
        for _ in range(50):
            model = FuzzyMinimaxModel()
            refs = [model.add_variable(f"x{i}", VariableKind.FUZZY_NONNEGATIVE) for i in range(3)]
            rows = [
                FuzzyLinearExpression(
                    [(tfn(*sorted(rng.uniform(-3, 3, 3))), refs[i]) for i in range(3)]
                )
                for _ in range(int(rng.integers(1, 4)))
            ]
            model.set_minimax_rows(rows)
            assignment = {
                f"x{i}": tfn(*sorted(rng.uniform(0, 4, 3))) for i in range(3)
            }
            result = model.evaluate(assignment)
            theta = theta_mub(result.row_values)
            assert is_upper_bound(theta, result.row_values)
            assert all(less_or_approx(rv, theta) for rv in result.row_values)


class TestSerialization:
    def test_round_trip(self):
        model, x0, x1, y = two_var_model()
        model.add_constraint(
            FuzzyLinearExpression([(tfn(1, 2, 3), x0), (tfn(-1, 0, 1), x1)], constant=tfn(0.5)),
            Relation.LESS_OR_APPROX,
            tfn(4, 5, 6),
        )
        model.add_constraint(
            FuzzyLinearExpression([(tfn(1), x0)]), Relation.LESS_OR_APPROX, tfn(2, 3, 4), rhs_binary=y
        )
        model.set_minimax_rows(
            [FuzzyLinearExpression([(tfn(1), x0)]), FuzzyLinearExpression([(tfn(1), x1)])],
            shared=FuzzyLinearExpression([(tfn(7, 8, 9), y)]),
        )
        doc = model_to_json(model)
        rebuilt = model_from_json(doc)
        assert model_to_json(rebuilt) == doc
        assignment = {"x0": tfn(0, 1, 2), "x1": tfn(1), "y": tfn(1)}
        assert rebuilt.evaluate(assignment).objective == model.evaluate(assignment).objective
