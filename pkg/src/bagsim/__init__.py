"""Bandwidth allocation games: thresholds, improvement dynamics, analysis."""

from .analysis import (
    AnalysisReport,
    EnumerationBudgetError,
    MoveWitness,
    NoEquilibriumError,
    brute_force_min_alpha,
    brute_force_opt,
    full_report,
    is_alpha_ne,
    lemma_bounds_check,
    niceness_check,
    price_of_anarchy,
    profile_min_alpha,
)
from .bounds import (
    Thresholds,
    alpha_lower,
    alpha_upper,
    gamma_star,
    lambert_w_minus1,
    ratio_function_f,
    thresholds,
    worst_case_ratio,
)
from .constructions import (
    ConstructionError,
    X3CInstance,
    build_b0,
    build_poa_game,
    build_x3c_game,
    find_exact_cover,
    random_game,
)
from .dynamics import (
    DynamicsConfig,
    Trace,
    TraceStep,
    best_response,
    find_alpha_move,
    max_gain_scheduler,
    run_dynamics,
)
from .model import (
    Game,
    PotentialBreakdown,
    Profile,
    Resource,
    Strategy,
    Violation,
    infer_delta,
    player_utility,
    potential,
    social_welfare,
    total_demands,
    utility_per_resource,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport", "ConstructionError", "DynamicsConfig",
    "EnumerationBudgetError", "Game", "MoveWitness", "NoEquilibriumError",
    "PotentialBreakdown", "Profile", "Resource", "Strategy", "Thresholds",
    "Trace", "TraceStep", "Violation", "X3CInstance", "alpha_lower",
    "alpha_upper", "best_response", "brute_force_min_alpha",
    "brute_force_opt", "build_b0", "build_poa_game", "build_x3c_game",
    "find_alpha_move", "find_exact_cover", "full_report", "gamma_star",
    "infer_delta", "is_alpha_ne", "lambert_w_minus1", "lemma_bounds_check",
    "max_gain_scheduler", "niceness_check", "player_utility", "potential",
    "price_of_anarchy", "profile_min_alpha", "random_game",
    "ratio_function_f", "run_dynamics", "social_welfare", "thresholds",
    "total_demands", "utility_per_resource", "validate",
]
