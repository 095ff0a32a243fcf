"""
app_ifs.models.metric

Finite metric-space models and Gromov–Hausdorff realizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from ..utils.numeric import Number, comparison_tolerance, is_exact
from ..utils.validation import ConfigurationError, DomainError

Point = str


@dataclass(frozen=True)
class MetricSpaceModel:
    """
    A finite point set with a distance table, standing in for a compact space
    at a declared resolution.

    The table is indexed by position in ``points``. Models are immutable; the
    metric axioms are checked by ``metric_core.verify_metric`` rather than here,
    so that corrupted inputs can still be reported on.
    """

    points: Tuple[Point, ...]
    matrix: Tuple[Tuple[Number, ...], ...]
    resolution: Number
    name: str = ""

    def __post_init__(self) -> None:
        if not self.points:
            raise ConfigurationError("A metric space model needs at least one point")
        if len(set(self.points)) != len(self.points):
            raise ConfigurationError(f"Duplicate point ids in model '{self.name}'")
        size = len(self.points)
        if len(self.matrix) != size or any(len(row) != size for row in self.matrix):
            raise ConfigurationError(
                f"Distance table must be {size}x{size} for model '{self.name}'"
            )

    @property
    def size(self) -> int:
        return len(self.points)

    @cached_property
    def index(self) -> Dict[Point, int]:
        return {p: i for i, p in enumerate(self.points)}

    def position(self, point: Point) -> int:
        try:
            return self.index[point]
        except KeyError as exc:
            raise DomainError(f"Unknown point '{point}' in model '{self.name}'") from exc

    def positions(self, subset: Iterable[Point]) -> np.ndarray:
        return np.array(sorted(self.position(p) for p in subset), dtype=np.int64)

    def dist(self, x: Point, y: Point) -> Number:
        return self.matrix[self.position(x)][self.position(y)]

    @cached_property
    def exact(self) -> bool:
        """True when every distance is an exact rational."""
        return all(is_exact(v) for row in self.matrix for v in row)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.matrix], dtype=float)

    @cached_property
    def _float_lookup(self) -> Optional[Dict[float, Fraction]]:
        # None when two distinct exact values share a float image.
        if not self.exact:
            return None
        lookup: Dict[float, Fraction] = {}
        for row in self.matrix:
            for value in row:
                key = float(value)
                seen = lookup.get(key)
                if seen is not None and seen != value:
                    return None
                lookup[key] = value
        return lookup

    def _tie_decision(self, radius: Number, closed: bool) -> Optional[bool]:
        lookup = self._float_lookup
        if lookup is None or not is_exact(radius):
            return None
        value = lookup.get(float(radius))
        if value is None:
            return False
        return value <= radius if closed else value < radius

    def below(self, values: np.ndarray, radius: Number) -> np.ndarray:
        """
        Elementwise ``values < radius`` for float images of table entries.

        :param values: Array whose entries are float images of distances in this model
        :param radius: Exact or float radius
        :return: Boolean mask
        """
        tie = self._tie_decision(radius, closed=False)
        if tie is None:
            return values < float(radius) - comparison_tolerance()
        r = float(radius)
        mask = values < r
        if tie:
            mask |= values == r
        return mask

    def within(self, values: np.ndarray, radius: Number) -> np.ndarray:
        """Elementwise ``values <= radius`` with the same tie rules as ``below``."""
        tie = self._tie_decision(radius, closed=True)
        if tie is None:
            return values <= float(radius) + comparison_tolerance()
        r = float(radius)
        mask = values < r
        if tie:
            mask |= values == r
        return mask


@dataclass(frozen=True)
class MetricViolation:
    axiom: str
    points: Tuple[Point, ...]
    detail: str


@dataclass(frozen=True)
class Realization:
    """A glued model with isometric embeddings of the two inputs."""

    glued: MetricSpaceModel
    embed_left: Dict[Point, Point]
    embed_right: Dict[Point, Point]


@dataclass(frozen=True)
class GHResult:
    """
    Gromov–Hausdorff distance between two models.

    ``distance`` is the value achieved by ``realization``. When ``exact`` is
    False it is only an upper bound and ``lower`` holds the certified lower bound.
    """

    distance: Number
    lower: Number
    exact: bool
    realization: Realization
    correspondence: Tuple[Tuple[Point, Point], ...]

    @property
    def upper(self) -> Number:
        return self.distance


@dataclass(frozen=True)
class GluedModel:
    model: MetricSpaceModel
    embeddings: List[Dict[Point, Point]] = field(default_factory=list)
    optimal: bool = True
