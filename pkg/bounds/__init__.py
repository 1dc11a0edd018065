from bounds.report import evaluate_bound, parse_params
from bounds.scales import absolute_moment, max_norm_estimates, scale_estimates, sigma_q
from bounds.theorems import (
    bounded_support_bound,
    clustering_bound_thm42,
    empirical_rate_prop41,
    fournier_guillin_rate,
    gaussian_performance_constant,
    perf_bound_thm21,
    quantizer_bound_thm22,
    quantizer_distance_bound,
    radius_bounds,
    standard_gaussian_constant,
    zador_upper,
)

__all__ = [
    "absolute_moment",
    "bounded_support_bound",
    "clustering_bound_thm42",
    "empirical_rate_prop41",
    "evaluate_bound",
    "fournier_guillin_rate",
    "gaussian_performance_constant",
    "max_norm_estimates",
    "parse_params",
    "perf_bound_thm21",
    "quantizer_bound_thm22",
    "quantizer_distance_bound",
    "radius_bounds",
    "scale_estimates",
    "sigma_q",
    "standard_gaussian_constant",
    "zador_upper",
]
