"""Order, interval and distance numerics for means of positive vectors."""
from .errors import (
    BudgetError,
    DomainError,
    EvaluationError,
    InconsistencyError,
    MeanOrderError,
    PreconditionError,
)
from .gini import (
    GiniParams,
    NegativeReciprocal,
    PositiveReciprocal,
    UserTable,
    boundary_set_contains,
    check_boundary_interval_type,
    check_comparability,
    gini_eval,
    gini_interval_contains,
    gini_leq,
    gini_prefix_means,
    validate_involution,
)
from .hardy import (
    Explicit,
    Geometric,
    HardyBudget,
    HardyEstimate,
    PowerLaw,
    check_ratio_monotonicity,
    hardy_lower_bound,
    hardy_ratio,
    hardy_sandwich,
    known_constant,
)
from .means import MAX, MIN, BlackBox, GiniMean, OrderVerdict, describe, evaluate, parse_mean, pointwise_leq
from .metric import SharedDomain, ball_member, check_ball_interval_type, rho
from .order import (
    FinitePoset,
    bracket,
    check_closure_laws,
    gi_set,
    is_interval_type,
    parse_poset,
    random_poset,
)
from .sampling import DomainSampler

__version__ = "0.1.0"
