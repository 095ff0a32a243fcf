"""
app_ifs.utils.validation

Validation utilities and error types for function-system analyses.

Provides reusable validation functions for common constraints:
- Positive horizons and radii
- Horizon and radius grids
- Mode and convention names
- Subset membership against a point set
"""

from __future__ import annotations

from typing import Iterable, Sequence

VALID_MODES = ["exact", "greedy", "auto"]
VALID_OFFSET_CONVENTIONS = ["definition", "proof"]
VALID_RATE_METHODS = ["slope", "growth"]


class ConfigurationError(ValueError):
    """Raised for malformed input: unknown map ids, bad σ syntax, bad grids or files."""


class DomainError(ValueError):
    """Raised when an operation is applied outside its mathematical domain."""


class RefinementInfeasibleError(DomainError):
    """Raised when no pool refinement covers the carrier."""


def validate_positive(value: int | float, field_name: str = "value") -> None:
    """
    Validate that a value is positive.

    :param value: Value to validate
    :param field_name: Name of field for error message
    :raises ValueError: If value is not positive
    """
    if value <= 0:
        raise ValueError(f"{field_name} must be positive, got {value}")


def validate_non_negative(value: int | float, field_name: str = "value") -> None:
    """
    Validate that a value is non-negative (>= 0).

    :param value: Value to validate
    :param field_name: Name of field for error message
    :raises ValueError: If value is negative
    """
    if value < 0:
        raise ValueError(f"{field_name} must be non-negative, got {value}")


def validate_horizon(n: int, field_name: str = "n", minimum: int = 1) -> None:
    """
    Validate an orbit horizon.

    :param n: Horizon (number of visited points or steps)
    :param field_name: Name of field for error message
    :param minimum: Smallest admissible value
    :raises ValueError: If n is not an integer at least ``minimum``
    """
    if isinstance(n, bool) or not isinstance(n, int):
        raise ValueError(f"{field_name} must be an integer, got {n!r}")
    if n < minimum:
        raise ValueError(f"{field_name} must be >= {minimum}, got {n}")


def validate_grid(
    values: Sequence, field_name: str = "grid", minimum_length: int = 1
) -> None:
    """
    Validate a horizon or radius grid.

    :param values: Grid values
    :param field_name: Name of field for error message
    :param minimum_length: Required number of distinct values
    :raises ConfigurationError: If the grid is too short or holds non-positive values
    """
    distinct = set(values)
    if len(distinct) < minimum_length:
        raise ConfigurationError(
            f"{field_name} needs at least {minimum_length} distinct values, "
            f"got {len(distinct)}"
        )
    for value in distinct:
        if value <= 0:
            raise ConfigurationError(
                f"{field_name} values must be positive, got {value}"
            )


def validate_mode(mode: str) -> None:
    """
    Validate a counting/search mode.

    :param mode: One of ``exact``, ``greedy``, ``auto``
    :raises ConfigurationError: If the mode is unknown
    """
    if mode not in VALID_MODES:
        raise ConfigurationError(
            f"Invalid mode '{mode}'. Must be one of: {', '.join(VALID_MODES)}"
        )


def validate_offset_convention(convention: str) -> None:
    """
    Validate the gluing offset convention.

    :param convention: ``definition`` or ``proof``
    :raises ConfigurationError: If the convention is unknown
    """
    if convention not in VALID_OFFSET_CONVENTIONS:
        raise ConfigurationError(
            f"Invalid offset convention '{convention}'. "
            f"Must be one of: {', '.join(VALID_OFFSET_CONVENTIONS)}"
        )


def validate_rate_method(method: str) -> None:
    """
    Validate a rate proxy name.

    :param method: ``slope`` or ``growth``
    :raises ConfigurationError: If the method is unknown
    """
    if method not in VALID_RATE_METHODS:
        raise ConfigurationError(
            f"Invalid rate method '{method}'. "
            f"Must be one of: {', '.join(VALID_RATE_METHODS)}"
        )


def validate_subset(
    subset: Iterable, universe: Iterable, field_name: str = "subset"
) -> None:
    """
    Validate that every member of ``subset`` is a point of ``universe``.

    :param subset: Candidate subset
    :param universe: Ambient point collection
    :param field_name: Name of field for error message
    :raises DomainError: If an unknown point is present
    """
    known = set(universe)
    unknown = sorted(str(p) for p in subset if p not in known)
    if unknown:
        raise DomainError(f"{field_name} has unknown points: {', '.join(unknown)}")


def validate_nonempty(subset: Iterable, field_name: str = "subset") -> None:
    """
    Validate that a subset is nonempty.

    :param subset: Candidate subset
    :param field_name: Name of field for error message
    :raises DomainError: If the subset is empty
    """
    if not list(subset):
        raise DomainError(f"{field_name} must be nonempty")
