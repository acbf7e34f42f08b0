"""Minimax mixed 0-1 linear programs over triangular fuzzy numbers.

Model fuzzy minimax programs, lower them to crisp three-objective MILPs, solve
with the bundled exact simplex/branch-and-bound engine, enumerate nondominated
solutions, and build capacitated center facility-location instances.
"""

from .fuzzy_core import (
    Interval,
    OrderRelation,
    TFN,
    TriangularFuzzyNumber,
    add,
    alpha_level,
    compare,
    is_upper_bound,
    less_or_approx,
    mul,
    scale,
    tfn,
    theta_mub,
)
from .ffmodel import (
    FuzzyConstraint,
    FuzzyLinearExpression,
    FuzzyMinimaxModel,
    Relation,
    VariableKind,
    VariableRef,
    model_from_json,
    model_to_json,
)
from .milp import (
    LinearProgram,
    LinearRow,
    MilpSolution,
    SolveStatus,
    solve_lp,
    solve_milp,
)
from .reformulate import (
    TriObjectiveMilp,
    lift_solution,
    lower_product_components,
    read_text,
    reformulate,
    write_text,
)
from .pareto import (
    ParetoPoint,
    ParetoSet,
    epsilon_constraint_enumerate,
    filter_nondominated,
    lexicographic,
    weighted_sum,
)
from .ccflp import (
    AssignmentNetwork,
    CcflpInstance,
    build_crisp_model,
    build_fuzzy_model,
    build_three_objective,
    extract_network,
    load_bundled_instance,
    load_instance,
    network_to_dot,
    random_instance,
    solve_crisp,
)

__version__ = "0.1.0"
