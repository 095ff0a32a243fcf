"""
app_ifs.models.gluing

Orbit sequences, gaps, tracing witnesses and the certificates produced by the
gluing-orbit diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from ..utils.numeric import Number, to_json_number
from ..utils.validation import ConfigurationError
from .metric import Point
from .orbit import OrbitPrefix, SigmaGenerator


@dataclass(frozen=True)
class Segment:
    """
    Orbit segment (x, σ, m): the points x, v^{σ(1)}x, …, v^{σ(m−1)}x.

    ``unbounded`` marks a segment whose length stands in for +∞ and was cut at
    the working horizon.
    """

    point: Point
    sigma: SigmaGenerator
    length: int
    unbounded: bool = False

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ConfigurationError(f"Segment length must be >= 1, got {self.length}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": self.point,
            "sigma": self.sigma.to_dict(),
            "length": self.length,
            "unbounded": self.unbounded,
        }


@dataclass(frozen=True)
class OrbitSequence:
    segments: Tuple[Segment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ConfigurationError("An orbit sequence needs at least one segment")
        if any(s.unbounded for s in self.segments[:-1]):
            raise ConfigurationError("Only the last segment may be unbounded")

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def lengths(self) -> Tuple[int, ...]:
        return tuple(s.length for s in self.segments)

    @property
    def truncated(self) -> bool:
        return self.segments[-1].unbounded

    def to_dict(self) -> Dict[str, Any]:
        return {"segments": [s.to_dict() for s in self.segments]}


@dataclass(frozen=True)
class Gap:
    """Gap times t_1..t_{N−1}, each at least 1."""

    times: Tuple[int, ...]

    def __post_init__(self) -> None:
        if any(t < 1 for t in self.times):
            raise ConfigurationError(f"Gap times must be >= 1, got {list(self.times)}")

    def within(self, M: int) -> bool:
        return all(t <= M for t in self.times)


@dataclass(frozen=True)
class Tracer:
    """A candidate tracing orbit: start point and the symbols it uses."""

    point: Point
    symbols: Tuple[str, ...]
    sigma: Optional[SigmaGenerator] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": self.point,
            "symbols": list(self.symbols),
            "sigma": None if self.sigma is None else self.sigma.to_dict(),
        }


@dataclass(frozen=True)
class TraceResult:
    """Outcome of checking that a tracer follows every segment within ε."""

    tracer: Tracer
    gap: Gap
    offsets: Tuple[int, ...]
    max_deviation: Optional[Number]
    ok: bool
    eps: Number
    convention: str
    cause: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tracer": self.tracer.to_dict(),
            "gap": list(self.gap.times),
            "offsets": list(self.offsets),
            "max_deviation": to_json_number(self.max_deviation),
            "ok": self.ok,
            "eps": to_json_number(self.eps),
            "offset_convention": self.convention,
            "cause": self.cause,
        }


@dataclass
class TraceSearch:
    """
    find_trace outcome. ``incomplete`` means the gap budget ran out before the
    search space was exhausted, so an absent witness is not a proof of failure.
    """

    result: Optional[TraceResult]
    incomplete: bool = False
    gaps_tried: int = 0

    @property
    def found(self) -> bool:
        return self.result is not None


@dataclass
class GopEntry:
    eps: Number
    M: Optional[int]
    certificate: Optional[OrbitSequence] = None
    incomplete: bool = False

    @property
    def holds(self) -> bool:
        return self.M is not None


@dataclass
class RigidityReport:
    deficits: Dict[int, Number]
    tolerance: Number
    rigid_at: Optional[int]

    @property
    def rigid(self) -> bool:
        return self.rigid_at is not None


@dataclass
class UniformApReport:
    returns: Tuple[int, ...]
    horizon: int
    syndetic_bound: Optional[int]
    almost_periodic: bool
    by_sigma: Dict[str, Tuple[int, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class RecurrenceEntry:
    point: Point
    recurrent: bool
    witness: Optional[OrbitPrefix] = None
    vacuous: bool = False


@dataclass(frozen=True)
class ApEntry:
    """Worst syndetic bound of the return set of x over every admissible σ."""

    point: Point
    bound: int
    almost_periodic: bool


@dataclass(frozen=True)
class TransitiveScan:
    points: FrozenSet[Point]
    eps: Number
    horizon: int
    full_orbit: bool = True


@dataclass
class Theorem3Certificate:
    """
    Separated family built by gluing copies of p's orbit.

    ``aborted`` names the reason when the construction stopped early:
    ``rigid`` (some shift k has no τ), ``eps`` (ε ≥ γ/3) or ``gluing``
    (a tracer search failed).
    """

    gamma: Optional[Number]
    taus: Dict[int, Optional[int]]
    T: Optional[int]
    m1: Optional[int]
    m2: Optional[int]
    horizon: Optional[int]
    convention: str
    tracers: Dict[Tuple[int, ...], Tuple[Point, ...]] = field(default_factory=dict)
    separated: bool = False
    violating_pair: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None
    bound: Optional[float] = None
    entropy_estimate: Optional[float] = None
    aborted: Optional[str] = None
    failing_k: Optional[int] = None
    failing_sequence: Optional[OrbitSequence] = None

    @property
    def holds(self) -> bool:
        return self.aborted is None and self.separated

    @property
    def bound_consistent(self) -> Optional[bool]:
        if self.bound is None or self.entropy_estimate is None:
            return None
        return self.bound <= self.entropy_estimate


@dataclass
class NonRecurrenceCertificate:
    found: bool
    tracer: Optional[Tracer] = None
    t0: Optional[int] = None
    lam: Optional[Number] = None
    bound: Optional[Number] = None
    observed: Optional[Number] = None
    premise_ok: bool = False
    holds: bool = False


@dataclass
class Tec1Report:
    premise_ok: bool
    observed_gamma: Number
    slack: Number
    checked: int
    violations: List[Point] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.premise_ok or not self.violations


@dataclass
class CrossCheckReport:
    uniform_ap: bool
    continuity_modulus: Number
    equicontinuity_modulus: Number
    applicable: bool

    @property
    def consistent(self) -> bool:
        return not self.applicable or self.equicontinuity_modulus > 0
