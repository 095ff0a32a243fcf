"""
app_ifs.models.orbit

Symbol sequences and admissible orbit prefixes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Tuple, Union

import numpy as np

from ..utils.validation import ConfigurationError
from .metric import Point

_CONST_PATTERN = re.compile(r"^const\(\s*([^()\s]+)\s*\)$")


@dataclass(frozen=True)
class SigmaGenerator:
    """
    Eventually periodic symbol sequence ``pre · period^∞``.

    Symbols are numbered from 1, so ``symbol(1)`` is the first map applied.
    """

    pre: Tuple[str, ...]
    period: Tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.period:
            raise ConfigurationError("A sigma generator needs a nonempty period")

    @classmethod
    def const(cls, map_id: str) -> SigmaGenerator:
        return cls(pre=(), period=(map_id,))

    @classmethod
    def parse(cls, value: Union[str, Dict, SigmaGenerator]) -> SigmaGenerator:
        """
        Parse a generator description.

        Accepted forms:
          - ``const(v)``
          - ``"a,b|c,d"`` (preperiod a,b then period c,d repeated)
          - ``"c,d"`` (pure period)
          - ``{"pre": [...], "period": [...]}``

        :raises ConfigurationError: On malformed input
        """
        if isinstance(value, SigmaGenerator):
            return value
        if isinstance(value, dict):
            if "const" in value:
                return cls.const(str(value["const"]))
            if "period" not in value:
                raise ConfigurationError(f"Sigma description lacks 'period': {value}")
            pre = value.get("pre") or []
            period = value["period"]
            if not isinstance(pre, list) or not isinstance(period, list):
                raise ConfigurationError("Sigma 'pre' and 'period' must be lists")
            return cls(pre=tuple(str(s) for s in pre), period=tuple(str(s) for s in period))
        if not isinstance(value, str):
            raise ConfigurationError(f"Cannot parse sigma from {value!r}")

        text = value.strip()
        match = _CONST_PATTERN.match(text)
        if match:
            return cls.const(match.group(1))
        if text.count("|") > 1:
            raise ConfigurationError(f"Malformed sigma '{value}': more than one '|'")
        pre_text, _, period_text = text.rpartition("|")
        pre = _split_symbols(pre_text, value, allow_empty=True)
        period = _split_symbols(period_text, value, allow_empty=False)
        return cls(pre=pre, period=period)

    def symbol(self, n: int) -> str:
        """Map id applied at step n (n >= 1)."""
        if n < 1:
            raise ConfigurationError(f"Symbol index must be >= 1, got {n}")
        if n <= len(self.pre):
            return self.pre[n - 1]
        return self.period[(n - len(self.pre) - 1) % len(self.period)]

    def symbols(self, start: int, stop: int) -> List[str]:
        """Symbols applied at steps start+1 .. stop."""
        return [self.symbol(i) for i in range(start + 1, stop + 1)]

    def shifted(self, n: int) -> SigmaGenerator:
        """The tail sequence whose k-th symbol is this sequence's (n+k)-th."""
        if n < 0:
            raise ConfigurationError(f"Shift must be non-negative, got {n}")
        if n <= len(self.pre):
            return SigmaGenerator(pre=self.pre[n:], period=self.period)
        offset = (n - len(self.pre)) % len(self.period)
        return SigmaGenerator(
            pre=(), period=self.period[offset:] + self.period[:offset]
        )

    @property
    def map_ids(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(self.pre + self.period))

    def describe(self) -> str:
        if not self.pre and len(self.period) == 1:
            return f"const({self.period[0]})"
        period = ",".join(self.period)
        if self.pre:
            return f"{','.join(self.pre)}|{period}"
        return period

    def to_dict(self) -> Dict[str, List[str]]:
        return {"pre": list(self.pre), "period": list(self.period)}


def _split_symbols(text: str, original: str, allow_empty: bool) -> Tuple[str, ...]:
    parts = [p.strip() for p in text.split(",")] if text.strip() else []
    if any(not p for p in parts):
        raise ConfigurationError(f"Malformed sigma '{original}': empty symbol")
    if not parts and not allow_empty:
        raise ConfigurationError(f"Malformed sigma '{original}': empty period")
    return tuple(parts)


@dataclass(frozen=True)
class OrbitPrefix:
    """A finite admissible orbit: ``trace[i+1] = symbols[i](trace[i])``."""

    start: Point
    symbols: Tuple[str, ...]
    trace: Tuple[Point, ...]
    extendable: bool

    @property
    def length(self) -> int:
        return len(self.trace)

    @property
    def end(self) -> Point:
        return self.trace[-1]


@dataclass(frozen=True)
class PrefixTable:
    """
    Vectorised set of orbit prefixes of a common length.

    ``traces`` has shape (rows, n) holding point positions; ``symbols`` has
    shape (rows, n-1) holding map positions.
    """

    traces: np.ndarray
    symbols: np.ndarray
    points: Tuple[Point, ...]
    map_ids: Tuple[str, ...]
    extendable: np.ndarray

    def __len__(self) -> int:
        return int(self.traces.shape[0])

    @property
    def horizon(self) -> int:
        return int(self.traces.shape[1])

    def prefix(self, row: int) -> OrbitPrefix:
        trace = tuple(self.points[i] for i in self.traces[row])
        symbols = tuple(self.map_ids[k] for k in self.symbols[row])
        return OrbitPrefix(
            start=trace[0],
            symbols=symbols,
            trace=trace,
            extendable=bool(self.extendable[row]),
        )

    def prefixes(self) -> List[OrbitPrefix]:
        return [self.prefix(row) for row in range(len(self))]
