"""Shared generators and oracles for the test suite."""

import itertools

from fuzzymm.ffmodel import FuzzyLinearExpression, FuzzyMinimaxModel, Relation, VariableKind
from fuzzymm.fuzzy_core import TFN, tfn
from fuzzymm.milp import INF, LinearProgram, LinearRow, SolveStatus, solve_lp
from fuzzymm.pareto import ParetoPoint, filter_nondominated


def close(a, b):
    """Objective-value equality: 1e-9 absolute plus 1e-6 relative."""
    return abs(a - b) <= 1e-9 + 1e-6 * max(1.0, abs(b))


def triple_close(a, b):
    return all(close(x, y) for x, y in zip(a, b))


def crisp_random_model(rng, max_continuous=10, max_binaries=8):
    """All-degenerate minimax model, feasible by construction, bounded by a box row."""
    nc = int(rng.integers(1, max_continuous + 1))
    nb = int(rng.integers(0, max_binaries + 1))
    r = int(rng.integers(1, 4))
    model = FuzzyMinimaxModel()
    xs = [model.add_variable(f"x{i}", VariableKind.FUZZY_NONNEGATIVE) for i in range(nc)]
    ys = [model.add_variable(f"y{i}", VariableKind.CRISP_BINARY) for i in range(nb)]
    x_feas = rng.uniform(0, 2, size=nc)
    y_feas = rng.integers(0, 2, size=nb)

    rows = []
    for _ in range(r):
        terms = [(tfn(float(rng.uniform(-3, 3))), v) for v in xs]
        terms += [(tfn(float(rng.uniform(-3, 3))), v) for v in ys]
        rows.append(FuzzyLinearExpression(terms))
    model.set_minimax_rows(rows)

    for _ in range(int(rng.integers(1, 5))):
        cx = rng.uniform(-3, 3, size=nc)
        cy = rng.uniform(-3, 3, size=nb)
        terms = [(tfn(float(cx[i])), xs[i]) for i in range(nc)]
        terms += [(tfn(float(cy[i])), ys[i]) for i in range(nb)]
        lhs = float(cx @ x_feas + (cy @ y_feas if nb else 0.0))
        if rng.uniform() < 0.3:
            model.add_constraint(FuzzyLinearExpression(terms), Relation.EQUAL, tfn(lhs))
        else:
            model.add_constraint(
                FuzzyLinearExpression(terms), Relation.LESS_OR_APPROX,
                tfn(lhs + float(rng.uniform(0, 4))))
    model.add_constraint(
        FuzzyLinearExpression([(tfn(1), v) for v in xs]),
        Relation.LESS_OR_APPROX,
        tfn(float(x_feas.sum() + rng.uniform(3, 9))),
    )
    return model


def crisp_minimax_optimum_by_enumeration(model):
    """Oracle for degenerate models: enumerate binaries, auxiliary-variable LP per pattern."""
    fuzzy = [v for v in model.variables if v.kind is VariableKind.FUZZY_NONNEGATIVE]
    binaries = [v for v in model.variables if v.kind is VariableKind.CRISP_BINARY]
    col = {v.id: i for i, v in enumerate(fuzzy)}
    t = len(fuzzy)
    best = None
    for pattern in itertools.product((0.0, 1.0), repeat=len(binaries)):
        yval = {v.id: pattern[i] for i, v in enumerate(binaries)}
        rows = []
        for expr in model.minimax_rows:
            coeffs, const = {}, expr.constant.mid
            for coef, ref in expr.terms:
                if ref.id in yval:
                    const += coef.mid * yval[ref.id]
                else:
                    coeffs[col[ref.id]] = coeffs.get(col[ref.id], 0.0) + coef.mid
            coeffs[t] = -1.0
            rows.append(LinearRow(coeffs, "<=", -const))
        for con in model.constraints:
            coeffs, const = {}, con.expression.constant.mid
            for coef, ref in con.expression.terms:
                if ref.id in yval:
                    const += coef.mid * yval[ref.id]
                else:
                    coeffs[col[ref.id]] = coeffs.get(col[ref.id], 0.0) + coef.mid
            relation = "<=" if con.relation is Relation.LESS_OR_APPROX else "=="
            rows.append(LinearRow(coeffs, relation, con.rhs.mid - const))
        lp = LinearProgram({t: 1.0}, rows, [0.0] * t + [-INF], [INF] * (t + 1))
        sol = solve_lp(lp)
        if sol.status is SolveStatus.OPTIMAL and (best is None or sol.objective < best):
            best = sol.objective
    return best


def two_point_model():
    """One fuzzy variable, one binary; frontier is {(4,6,10), (5,5,9)}.

    Demand (4,6,10) can be reduced by (1,3,3) for a crisp price of 2: closed
    gives theta (4,6,10), open gives (5,5,9); the two are incomparable.
    """
    model = FuzzyMinimaxModel()
    x = model.add_variable("x", VariableKind.FUZZY_NONNEGATIVE)
    y = model.add_variable("y", VariableKind.CRISP_BINARY)
    model.set_minimax_rows([FuzzyLinearExpression([(tfn(1), x), (tfn(2), y)])])
    model.add_constraint(
        FuzzyLinearExpression([(tfn(-1), x), (tfn(-3, -3, -1), y)]),
        Relation.LESS_OR_APPROX,
        tfn(-10, -6, -4),
    )
    return model


def frontier_by_enumeration(tri):
    """Oracle: per binary pattern, the componentwise-minimal attainable triple."""
    binaries = tri.binaries()
    candidates = []
    for pattern in itertools.product((0.0, 1.0), repeat=len(binaries)):
        fixes = {j: (v, v) for j, v in zip(binaries, pattern)}
        triple = []
        for col in tri.theta_cols:
            sol = solve_lp(tri.to_linear_program({col: 1.0}).with_bounds(fixes))
            if sol.status is not SolveStatus.OPTIMAL:
                triple = None
                break
            triple.append(sol.objective)
        if triple is None:
            continue
        joint = solve_lp(
            tri.to_linear_program({c: 1.0 for c in tri.theta_cols}).with_bounds(fixes))
        assert close(joint.objective, sum(triple))
        candidates.append(ParetoPoint(tuple(triple), (), f"pattern{pattern}"))
    return [p.theta for p in filter_nondominated(candidates).points]
