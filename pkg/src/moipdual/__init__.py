"""Relaxations, Lagrangian duality and superadditive duality for multiobjective integer programs."""

from .bounds import (
    BoundReport,
    Method,
    bound_quality,
    ch_bound_report,
    halfspace_union_check,
    is_strong_upper_bound,
    lagrangian_bound_report,
    local_nadir_lower_bound,
)
from .exceptions import (
    DimensionError,
    EnumerationCapError,
    InfeasibleError,
    MoipError,
    NumericalError,
    ParseError,
    PreconditionError,
    UnboundedError,
    UnsupportedDimensionError,
)
from .model import (
    Frontier,
    MoipInstance,
    ideal_point,
    is_supported,
    nadir_point,
    nondominated_set,
    scalarize,
    supported_frontier,
)
from .pareto import (
    MINUS_MINF,
    PLUS_MINF,
    ExtendedSet,
    Relation,
    is_antichain,
    max_filter,
    min_filter,
    preceq,
    vec_leq,
)
from .relaxations import (
    MultiplierGrid,
    MultiplierMatrix,
    ch_relaxation_frontier,
    check_fr_lag,
    dual_approx,
    lagrangian_relaxation,
    ldlp_bound,
    molp_relaxation_frontier,
    scalarized_dual_value,
)
from .solvers import (
    IpProblem,
    LpProblem,
    Sense,
    SolveOutcome,
    Status,
    conv_hull_lp,
    enumerate_feasible,
    ip_solve,
    lp_solve,
)
from .superadditive import (
    HyperplaneFamily,
    SdmolpProgram,
    build_sdmolp,
    fstar_contains,
    scalar_dual_family,
    value_function_sample,
    verify_strong_sdp,
    vsdp_solve,
)

__version__ = "0.1.0"
