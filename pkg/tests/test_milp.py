import itertools

import numpy as np
import pytest

from fuzzymm.milp import (
    INF,
    LinearProgram,
    LinearRow,
    MalformedProgramError,
    SolveStatus,
    check_feasible,
    solve_lp,
    solve_milp,
)


def leq(coeffs, rhs, name=""):
    return LinearRow(coeffs, "<=", rhs, name)


def eq(coeffs, rhs, name=""):
    return LinearRow(coeffs, "==", rhs, name)


class TestSolveLp:
    def test_lower_bound_only(self):
        lp = LinearProgram({0: 1.0}, [], [3.0], [INF])
        sol = solve_lp(lp)
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.objective == pytest.approx(3.0, abs=1e-9)
        assert sol.x[0] == pytest.approx(3.0, abs=1e-9)

    def test_infeasible(self):
        lp = LinearProgram({0: 1.0}, [leq({0: 1.0}, 1.0)], [2.0], [INF])
        assert solve_lp(lp).status is SolveStatus.INFEASIBLE

    def test_unbounded(self):
        lp = LinearProgram({0: -1.0}, [], [0.0], [INF])
        assert solve_lp(lp).status is SolveStatus.UNBOUNDED

    def test_free_variable(self):
        lp = LinearProgram({0: 1.0}, [leq({0: -1.0}, 5.0)], [-INF], [INF])
        sol = solve_lp(lp)
        assert sol.objective == pytest.approx(-5.0, abs=1e-9)

    def test_equality_rows(self):
        lp = LinearProgram(
            {0: 1.0, 1: 2.0},
            [eq({0: 1.0, 1: 1.0}, 4.0), leq({0: 1.0}, 3.0)],
            [0.0, 0.0],
            [INF, INF],
        )
        sol = solve_lp(lp)
        assert sol.objective == pytest.approx(5.0, abs=1e-9)  # x0=3, x1=1

    def test_upper_bounds(self):
        lp = LinearProgram({0: -1.0, 1: -1.0}, [], [0.0, 0.0], [2.0, 3.5])
        sol = solve_lp(lp)
        assert sol.objective == pytest.approx(-5.5, abs=1e-9)

    def test_malformed(self):
        with pytest.raises(MalformedProgramError):
            solve_lp(LinearProgram({2: 1.0}, [], [0.0], [INF]))
        with pytest.raises(MalformedProgramError):
            solve_lp(LinearProgram({0: float("nan")}, [], [0.0], [INF]))
        with pytest.raises(MalformedProgramError):
            solve_lp(LinearProgram({0: 1.0}, [LinearRow({0: 1.0}, "<", 1.0)], [0.0], [INF]))

    def test_reversed_bounds_infeasible(self):
        lp = LinearProgram({0: 1.0}, [], [2.0], [1.0])
        assert solve_lp(lp).status is SolveStatus.INFEASIBLE

    def test_determinism(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            rows = [
                leq({j: float(rng.uniform(-2, 2)) for j in range(n)}, float(rng.uniform(1, 5)))
                for _ in range(int(rng.integers(1, 4)))
            ]
            rows.append(leq({j: 1.0 for j in range(n)}, 10.0))
            lp = LinearProgram(
                {j: float(rng.uniform(-1, 1)) for j in range(n)}, rows, [0.0] * n, [INF] * n
            )
            first = solve_lp(lp)
            second = solve_lp(lp)
            assert first.status == second.status
            if first.status is SolveStatus.OPTIMAL:
                assert first.objective == second.objective
                assert first.x == second.x


class TestDuals:
    def test_weak_duality_on_random_bounded_lps(self):
        # min c x, A x <= b, x >= 0; dual feasible y <= 0 with A^T y <= c
        # gives y.b <= optimum.
        rng = np.random.default_rng(21)
        checked = 0
        for _ in range(60):
            n, m = int(rng.integers(2, 6)), int(rng.integers(2, 5))
            A = rng.uniform(-1, 3, size=(m, n))
            b = rng.uniform(1, 6, size=m)
            c = rng.uniform(-2, 2, size=n)
            rows = [leq({j: float(A[i, j]) for j in range(n)}, float(b[i])) for i in range(m)]
            rows.append(leq({j: 1.0 for j in range(n)}, 12.0))
            lp = LinearProgram({j: float(c[j]) for j in range(n)}, rows, [0.0] * n, [INF] * n)
            sol = solve_lp(lp)
            assert sol.status is SolveStatus.OPTIMAL
            y = np.array(sol.duals)
            assert (y <= 1e-6).all()
            A_full = np.vstack([A, np.ones((1, n))])
            assert (A_full.T @ y <= c + 1e-6).all()
            b_full = np.append(b, 12.0)
            assert float(y @ b_full) <= sol.objective + 1e-6
            checked += 1
        assert checked == 60

    def test_feasibility_certificate(self):
        rng = np.random.default_rng(22)
        for _ in range(40):
            n = int(rng.integers(2, 7))
            rows = [
                leq({j: float(rng.uniform(-2, 2)) for j in range(n)}, float(rng.uniform(0.5, 4)))
                for _ in range(int(rng.integers(1, 5)))
            ]
            rows.append(eq({0: 1.0, n - 1: 1.0}, 1.0))
            rows.append(leq({j: 1.0 for j in range(n)}, 9.0))
            lp = LinearProgram(
                {j: float(rng.uniform(-1, 1)) for j in range(n)}, rows, [0.0] * n, [INF] * n
            )
            sol = solve_lp(lp)
            if sol.status is SolveStatus.OPTIMAL:
                assert check_feasible(lp, sol.x, tol=1e-6) == []


def random_binary_milp(rng):
    """Random feasible bounded MILP with a known feasible point."""
    nc = int(rng.integers(1, 6))
    nb = int(rng.integers(0, 6))
    n = nc + nb
    x_feas = list(rng.uniform(0, 2, size=nc)) + [float(rng.integers(0, 2)) for _ in range(nb)]
    rows = []
    for _ in range(int(rng.integers(1, 4))):
        coeffs = {j: float(rng.uniform(-3, 3)) for j in range(n)}
        lhs = sum(c * x_feas[j] for j, c in coeffs.items())
        if rng.uniform() < 0.25:
            rows.append(eq(coeffs, lhs))
        else:
            rows.append(leq(coeffs, lhs + float(rng.uniform(0, 4))))
    rows.append(leq({j: 1.0 for j in range(nc)}, float(sum(x_feas[:nc]) + rng.uniform(2, 8))))
    objective = {j: float(rng.uniform(-3, 3)) for j in range(n)}
    lower = [0.0] * n
    upper = [INF] * nc + [1.0] * nb
    return LinearProgram(objective, rows, lower, upper), list(range(nc, n))


class TestSolveMilp:
    def test_forced_round_up(self):
        lp = LinearProgram({0: 1.0}, [leq({0: -1.0}, -0.3)], [0.0], [1.0])
        sol = solve_milp(lp, [0])
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.x == [1.0]
        assert sol.objective == pytest.approx(1.0)

    def test_lp_integral_solved_at_root(self):
        lp = LinearProgram({0: -1.0, 1: -1.0}, [leq({0: 1.0, 1: 1.0}, 1.0)], [0.0, 0.0], [1.0, 1.0])
        sol = solve_milp(lp, [0])
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.node_count == 1

    def test_infeasible(self):
        lp = LinearProgram({0: 1.0}, [leq({0: 1.0}, -1.0)], [0.0], [1.0])
        assert solve_milp(lp, [0]).status is SolveStatus.INFEASIBLE

    def test_unbounded_with_feasible_integer_point(self):
        lp = LinearProgram({0: -1.0, 1: 0.0}, [], [0.0, 0.0], [INF, 1.0])
        assert solve_milp(lp, [1]).status is SolveStatus.UNBOUNDED

    def test_matches_brute_force_on_random_instances(self):
        rng = np.random.default_rng(33)
        for _ in range(40):
            lp, binaries = random_binary_milp(rng)
            sol = solve_milp(lp, binaries)
            best = None
            for pattern in itertools.product((0.0, 1.0), repeat=len(binaries)):
                fixed = lp.with_bounds({j: (v, v) for j, v in zip(binaries, pattern)})
                relax = solve_lp(fixed)
                if relax.status is SolveStatus.OPTIMAL and (best is None or relax.objective < best):
                    best = relax.objective
            assert sol.status is SolveStatus.OPTIMAL
            assert best is not None
            assert sol.objective == pytest.approx(best, abs=1e-6)

    def test_determinism(self):
        rng = np.random.default_rng(34)
        lp, binaries = random_binary_milp(rng)
        a = solve_milp(lp, binaries)
        b = solve_milp(lp, binaries)
        assert a.status == b.status and a.objective == b.objective and a.x == b.x
