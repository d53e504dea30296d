from .asymptotic import (
    LOWER_TAIL,
    UNIFORM_ZONE,
    UPPER_TAIL,
    asymptotic_log_prob,
    bracket_from_saddle,
    combine_pole_terms,
    order1_log_prob,
    pole_gap,
    pole_term,
    residue_fires,
    second_order_g,
    uniform_bracket,
)
from .descent import (
    DescentIntegral,
    certificate_grid,
    certify_bracket,
    descent_umax,
    integrate_descent,
    trace_descent_path,
)
from .kernel import (
    DescentSample,
    ExponentKernel,
    ProbabilityBracket,
    SaddleSolution,
    ShiftedKernel,
)
from .saddle import find_saddle
from .series import (
    descent_coefficients,
    power_coefficients,
    quotient_log_derivative,
    series_ratio,
    series_reversion,
    series_sqrt_invert,
    split_pole,
)

__all__ = [
    "DescentIntegral",
    "DescentSample",
    "ExponentKernel",
    "LOWER_TAIL",
    "ProbabilityBracket",
    "SaddleSolution",
    "ShiftedKernel",
    "UNIFORM_ZONE",
    "UPPER_TAIL",
    "asymptotic_log_prob",
    "bracket_from_saddle",
    "certificate_grid",
    "certify_bracket",
    "combine_pole_terms",
    "descent_coefficients",
    "descent_umax",
    "find_saddle",
    "integrate_descent",
    "order1_log_prob",
    "pole_gap",
    "pole_term",
    "power_coefficients",
    "quotient_log_derivative",
    "residue_fires",
    "second_order_g",
    "series_ratio",
    "series_reversion",
    "series_sqrt_invert",
    "split_pole",
    "trace_descent_path",
    "uniform_bracket",
]
