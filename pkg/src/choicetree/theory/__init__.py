from .exact import ExactDistribution, exact_distribution, target_class_probabilities
from .fixed_point import (
    FixedPointResult,
    NoInteriorRoot,
    UnsupportedRegime,
    attachment_probability,
    choice_intensity,
    fixed_point_derivative,
    fixed_point_map,
    predicted_max,
    solve_x_star,
)
from .urn import UrnState, run_urn, urn_increment_probability, urn_step, urn_trace

__all__ = [
    "ExactDistribution",
    "FixedPointResult",
    "NoInteriorRoot",
    "UnsupportedRegime",
    "UrnState",
    "attachment_probability",
    "choice_intensity",
    "exact_distribution",
    "fixed_point_derivative",
    "fixed_point_map",
    "predicted_max",
    "run_urn",
    "solve_x_star",
    "target_class_probabilities",
    "urn_increment_probability",
    "urn_step",
    "urn_trace",
]
