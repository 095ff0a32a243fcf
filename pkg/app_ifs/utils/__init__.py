"""
app_ifs.utils

Utility modules for the function-system toolkit.
"""

from .numeric import (
    Number,
    RateFit,
    as_number,
    at_most,
    close,
    comparison_tolerance,
    fit_rate,
    growth_rate,
    is_exact,
    less_than,
    to_json_number,
)
from .validation import (
    VALID_MODES,
    VALID_OFFSET_CONVENTIONS,
    VALID_RATE_METHODS,
    ConfigurationError,
    DomainError,
    RefinementInfeasibleError,
    validate_grid,
    validate_horizon,
    validate_mode,
    validate_non_negative,
    validate_nonempty,
    validate_offset_convention,
    validate_positive,
    validate_rate_method,
    validate_subset,
)

__all__ = [
    # Numbers
    "Number",
    "RateFit",
    "as_number",
    "at_most",
    "close",
    "comparison_tolerance",
    "fit_rate",
    "growth_rate",
    "is_exact",
    "less_than",
    "to_json_number",
    # Errors
    "ConfigurationError",
    "DomainError",
    "RefinementInfeasibleError",
    # Validation constants
    "VALID_MODES",
    "VALID_OFFSET_CONVENTIONS",
    "VALID_RATE_METHODS",
    # Validation functions
    "validate_grid",
    "validate_horizon",
    "validate_mode",
    "validate_non_negative",
    "validate_nonempty",
    "validate_offset_convention",
    "validate_positive",
    "validate_rate_method",
    "validate_subset",
]
