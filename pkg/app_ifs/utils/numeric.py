"""
app_ifs.utils.numeric

Exact/float number handling shared by every estimator.

Distances are exact ``Fraction`` values when the inputs are rational and plain
floats otherwise. Float comparisons use the ``tolerances.comparison`` setting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Union

import numpy as np

from .validation import ConfigurationError

Number = Union[Fraction, float]


def comparison_tolerance() -> float:
    """The configured slack for float comparisons."""
    from ..config import get_config

    return get_config().tolerances.comparison


def as_number(value) -> Number:
    """
    Convert an input value to the internal number representation.

    Integers, ``Fraction`` instances and strings such as ``"1/3"`` become exact
    fractions; floats stay floats.

    :param value: Raw value from a description file or caller
    :return: Fraction or float
    :raises ConfigurationError: If the value is not numeric
    """
    if isinstance(value, bool):
        raise ConfigurationError(f"Expected a number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigurationError(f"Not a rational literal: {value!r}") from exc
    raise ConfigurationError(f"Expected a number, got {value!r}")


def is_exact(value: Number) -> bool:
    return isinstance(value, Fraction)


def less_than(a: Number, b: Number) -> bool:
    """Strict comparison a < b, exact for fractions and tolerant for floats."""
    if is_exact(a) and is_exact(b):
        return a < b
    return float(a) < float(b) - comparison_tolerance()


def at_most(a: Number, b: Number) -> bool:
    """Closed comparison a <= b, exact for fractions and tolerant for floats."""
    if is_exact(a) and is_exact(b):
        return a <= b
    return float(a) <= float(b) + comparison_tolerance()


def close(a: Number, b: Number, tolerance: Optional[float] = None) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    slack = comparison_tolerance() if tolerance is None else tolerance
    return abs(float(a) - float(b)) <= slack


def to_json_number(value: Optional[Number]):
    """Render a number for JSON: exact values as ``"p/q"`` strings, floats as-is."""
    if value is None:
        return None
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of log-counts against the horizon."""

    slope: float
    intercept: float
    residual: float
    horizons: tuple


def fit_rate(horizons: Sequence[int], log_counts: Sequence[float]) -> RateFit:
    """
    Fit ``log_counts ≈ slope * n + intercept`` by least squares.

    Constant data yields a slope of exactly zero.

    :param horizons: Horizons n (at least two distinct values)
    :param log_counts: Natural logarithms of the counts
    :return: RateFit with slope, intercept and RMS residual
    :raises ConfigurationError: If fewer than two horizons are given
    """
    if len(set(horizons)) < 2:
        raise ConfigurationError(
            f"A rate fit needs at least 2 horizons, got {len(set(horizons))}"
        )
    x = np.asarray(horizons, dtype=float)
    y = np.asarray(log_counts, dtype=float)
    if np.ptp(y) == 0:
        return RateFit(0.0, float(y[0]), 0.0, tuple(horizons))
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return RateFit(float(slope), float(intercept), residual, tuple(horizons))


def growth_rate(horizons: Sequence[int], log_counts: Sequence[float]) -> float:
    """Largest value of (1/n)·log count over the given horizons."""
    rates: List[float] = [c / n for n, c in zip(horizons, log_counts)]
    return max(rates) if rates else 0.0
