"""
app_ifs.models.gallery

Curated example systems with their expected properties.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

from ..utils.validation import ConfigurationError
from .system import FunctionSystem

VALID_PROVENANCE = ["DERIVED", "TRIVIAL"]


@dataclass(frozen=True)
class Expectation:
    """
    One expected property of a gallery system.

    ``tolerance`` is relative for real-valued quantities and ignored for
    booleans and integers. ``params`` carries the grids or points the
    matching estimator needs.
    """

    quantity: str
    value: Any
    provenance: str
    note: str = ""
    tolerance: float = 0.0
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.provenance not in VALID_PROVENANCE:
            raise ConfigurationError(
                f"Invalid provenance '{self.provenance}'. "
                f"Must be one of: {', '.join(VALID_PROVENANCE)}"
            )
        if self.tolerance < 0:
            raise ConfigurationError(f"tolerance must be non-negative, got {self.tolerance}")


@dataclass
class GallerySystem:
    name: str
    description: str
    parameters: Dict[str, Any]
    builder: Callable[[], FunctionSystem]
    expectations: Tuple[Expectation, ...] = ()
    _system: Optional[FunctionSystem] = field(default=None, repr=False, compare=False)

    def build(self) -> FunctionSystem:
        if self._system is None:
            self._system = self.builder()
        return self._system


@dataclass
class ExpectationOutcome:
    system: str
    expectation: Expectation
    observed: Any
    ok: bool
    detail: str = ""
