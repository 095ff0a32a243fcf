"""
app_ifs.models.cover

Finite covers, refinement pools and compatibility results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .metric import MetricSpaceModel, Point


@dataclass(frozen=True)
class CoverElement:
    label: str
    members: FrozenSet[Point]


@dataclass(frozen=True)
class Cover:
    """
    Labeled point subsets over a carrier.

    Use ``Cover.build`` to normalize: members are cut to the carrier, empty
    elements dropped and duplicate sets merged under the first label.
    """

    elements: Tuple[CoverElement, ...]
    carrier: FrozenSet[Point]

    @classmethod
    def build(
        cls, elements: Iterable[Tuple[str, Iterable[Point]]], carrier: Iterable[Point]
    ) -> Cover:
        base = frozenset(carrier)
        seen: Dict[FrozenSet[Point], str] = {}
        for label, members in elements:
            cut = frozenset(members) & base
            if cut and cut not in seen:
                seen[cut] = label
        return cls(
            elements=tuple(CoverElement(label, members) for members, label in seen.items()),
            carrier=base,
        )

    @property
    def sets(self) -> FrozenSet[FrozenSet[Point]]:
        return frozenset(e.members for e in self.elements)

    @property
    def labels(self) -> List[str]:
        return [e.label for e in self.elements]

    def __len__(self) -> int:
        return len(self.elements)

    def uncovered(self) -> FrozenSet[Point]:
        union = frozenset().union(*(e.members for e in self.elements))
        return self.carrier - union


@dataclass(frozen=True)
class RefinementPool:
    """
    Candidate sets for refinements, each with diameter at least ``floor``.

    When ``model`` is set, a candidate cut down to a cover's carrier must still
    reach the floor to be used.
    """

    candidates: Tuple[FrozenSet[Point], ...]
    floor: object
    model: Optional[MetricSpaceModel] = None


@dataclass(frozen=True)
class RefinementResult:
    """
    Pool-restricted 𝒟 value.

    ``exact`` is False when the value came from greedy assembly; it is then an
    upper bound for the pool-restricted minimum.
    """

    value: int
    exact: bool
    witness: Tuple[FrozenSet[Point], ...]
    downgraded: bool = False
    pool_restricted: bool = True


@dataclass(frozen=True)
class CompatibilityResult:
    compatible: bool
    violating_fiber: Optional[FrozenSet[Point]] = None
    label: object = None


@dataclass
class FSigmaResult:
    """The F_σ(N, ·) map with its pointwise checks."""

    values: Dict[Point, Tuple]
    compatibility: Optional[CompatibilityResult]
    range_ok: bool
    u_matches: bool
    v_matches: bool
    lipschitz: Tuple[float, ...]
    defects: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            not self.defects
            and self.range_ok
            and self.u_matches
            and self.v_matches
            and self.compatibility is not None
            and self.compatibility.compatible
        )


@dataclass
class MdimReport:
    """𝒟 of orbit joins over a cover ladder, with per-cover growth slopes."""

    values: Dict[Tuple[int, int], Optional[int]]
    slopes: Dict[int, float]
    estimate: float
    exact: bool
    infeasible: List[Tuple[int, int]] = field(default_factory=list)
    pool_restricted: bool = True


@dataclass
class SubadditivityResult:
    form: str
    joined: int
    first: int
    second: int
    holds: bool
    resolved: bool


@dataclass
class PowerScalingRow:
    power: int
    map_id: str
    slope: Optional[float]
    scaled_base: Optional[float]
