"""
app_ifs.models.capacity

Capacity tables, orbit capacity, small-boundary reports and the
partition-of-unity certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple

from .cover import CompatibilityResult
from .metric import Point


@dataclass(frozen=True)
class CapacityResult:
    """cap(n, x, A), or undefined when x has no infinite admissible orbit."""

    value: Optional[Fraction]
    defined: bool
    n: int


@dataclass
class CapacityTable:
    """
    Best average visit frequency to ``target`` over extendable prefixes.

    ``values`` is keyed by (n, x) and only holds points with Σ_x nonempty.
    """

    target: FrozenSet[Point]
    horizons: Tuple[int, ...]
    values: Dict[Tuple[int, Point], Fraction] = field(default_factory=dict)

    def sup(self, n: int) -> Optional[Fraction]:
        row = [v for (m, _), v in self.values.items() if m == n]
        return max(row) if row else None

    def curve(self) -> Dict[int, Optional[Fraction]]:
        return {n: self.sup(n) for n in self.horizons}


@dataclass
class OcapResult:
    """
    Orbit capacity as the maximum cycle mean of the visit indicator over the
    infinite core. ``cycle`` is one cycle attaining it.
    """

    value: Optional[Fraction]
    defined: bool
    cycle: Tuple[Point, ...] = ()
    curve: Dict[int, Optional[Fraction]] = field(default_factory=dict)
    excludes_empty_sigma_x: bool = True


@dataclass(frozen=True)
class SbpEntry:
    center: Point
    radius: Fraction
    witness: Optional[FrozenSet[Point]]
    witness_radius: Optional[object]
    shell: FrozenSet[Point]
    shell_ocap: Optional[Fraction]


@dataclass
class SbpReport:
    delta: object
    entries: List[SbpEntry] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(e.witness is not None for e in self.entries)

    @property
    def failures(self) -> List[SbpEntry]:
        return [e for e in self.entries if e.witness is None]


@dataclass
class PartitionOfUnity:
    """
    Functions φ_j over the model points, one per cover pair.

    ``boundary_region`` is the union of the sets where some φ_j is strictly
    between 0 and 1.
    """

    labels: Tuple[str, ...]
    functions: Dict[str, Dict[Point, Fraction]]
    carrier: FrozenSet[Point]
    boundary_region: FrozenSet[Point]
    subordinate_to: Tuple[FrozenSet[Point], ...] = ()

    def vector(self, x: Point) -> Tuple:
        return tuple(self.functions[label][x] for label in self.labels)


@dataclass
class LsbpCertificate:
    """Checks recorded for a constructed partition of unity."""

    delta: object
    N: int
    eps: object
    sum_to_one: bool
    subordinate: bool
    boundary_capacity: Optional[Fraction]
    boundary_small: bool
    premise_violations: List[Tuple[Point, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.sum_to_one and self.subordinate and self.boundary_small


@dataclass
class T2Result:
    """f_N on Σ_σ with its compatibility verdict and open-coordinate counts."""

    values: Dict[Point, Tuple]
    compatibility: CompatibilityResult
    open_coordinates: Dict[Point, int]
    budget: float

    @property
    def within_budget(self) -> bool:
        return all(count < self.budget for count in self.open_coordinates.values())
