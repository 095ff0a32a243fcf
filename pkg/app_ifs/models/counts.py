"""
app_ifs.models.counts

Result types for separated/spanning counts and rate estimates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..utils.numeric import Number, RateFit
from .orbit import OrbitPrefix


@dataclass(frozen=True)
class CountResult:
    """
    A separated or spanning cardinality.

    ``exact`` is False when some conflict-graph component was solved greedily;
    the count is then a lower bound (separated) or an upper bound (spanning).
    """

    count: int
    exact: bool
    witness: Tuple[OrbitPrefix, ...] = ()
    nodes: int = 0
    downgraded: bool = False
    empty_carrier: bool = False


@dataclass
class CountEntry:
    separated: CountResult
    spanning: Optional[CountResult] = None


@dataclass
class CountGrid:
    """Counts over an (n, ε) grid, keyed by (n, ε)."""

    entries: Dict[Tuple[int, Number], CountEntry] = field(default_factory=dict)
    sigma: Optional[str] = None

    @property
    def horizons(self) -> List[int]:
        return sorted({n for n, _ in self.entries})

    @property
    def radii(self) -> List[Number]:
        return sorted({eps for _, eps in self.entries})

    def separated(self, n: int, eps: Number) -> CountResult:
        return self.entries[(n, eps)].separated

    def spanning(self, n: int, eps: Number) -> Optional[CountResult]:
        return self.entries[(n, eps)].spanning

    def violations(self) -> List[str]:
        """
        Sandwich, monotonicity and exactness-flag failures.

        r(n,ε) ≤ s(n,ε) ≤ r(n,ε/2) is checked on exact values wherever ε/2 is on
        the grid; monotonicity is checked between exact neighbours.
        """
        found: List[str] = []
        keys = set(self.entries)
        for (n, eps), entry in sorted(self.entries.items()):
            sep, span = entry.separated, entry.spanning
            if sep.exact and sep.downgraded:
                found.append(f"n={n} eps={eps}: separated marked exact after downgrade")
            if span is not None and sep.exact and span.exact and span.count > sep.count:
                found.append(
                    f"n={n} eps={eps}: spanning {span.count} > separated {sep.count}"
                )
            half = eps / 2
            if (n, half) in keys:
                half_span = self.entries[(n, half)].spanning
                if (
                    half_span is not None
                    and sep.exact
                    and half_span.exact
                    and sep.count > half_span.count
                ):
                    found.append(
                        f"n={n} eps={eps}: separated {sep.count} > "
                        f"spanning at eps/2 {half_span.count}"
                    )

        horizons, radii = self.horizons, self.radii
        for eps in radii:
            for a, b in zip(horizons, horizons[1:]):
                if (a, eps) in keys and (b, eps) in keys:
                    lo, hi = self.separated(a, eps), self.separated(b, eps)
                    if lo.exact and hi.exact and lo.count > hi.count:
                        found.append(f"eps={eps}: s decreases from n={a} to n={b}")
        for n in horizons:
            for small, large in zip(radii, radii[1:]):
                if (n, small) in keys and (n, large) in keys:
                    fine, coarse = self.separated(n, small), self.separated(n, large)
                    if fine.exact and coarse.exact and coarse.count > fine.count:
                        found.append(
                            f"n={n}: s increases from eps={small} to eps={large}"
                        )
        return found


@dataclass(frozen=True)
class ScaleRate:
    """Rate proxies at one radius."""

    eps: Number
    slope: RateFit
    growth: float
    spanning_slope: Optional[float] = None
    exact: bool = True


@dataclass
class RateReport:
    """
    Entropy and metric mean dimension estimates from a CountGrid.

    ``umdim``/``lmdim`` are the max/min of rate/|log ε| over the smallest radii;
    ``omdim`` is filled in when a σ sample was supplied.
    """

    rates: List[ScaleRate]
    method: str
    entropy: float
    umdim: float
    lmdim: float
    limit_radii: Tuple[Number, ...]
    normalized: Dict[Number, float] = field(default_factory=dict)
    omdim: Optional[float] = None
    omdim_by_sigma: Dict[str, float] = field(default_factory=dict)
    grid: Optional[CountGrid] = None

    @property
    def exact(self) -> bool:
        return all(rate.exact for rate in self.rates)


@dataclass
class Theorem1Report:
    """The chain mdim ≤ lmdim ≤ umdim and per-entry s(σ,n,ε) ≤ s(n,ε)."""

    mdim: float
    lmdim: float
    umdim: float
    omdim: Optional[float]
    violations: List[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations
