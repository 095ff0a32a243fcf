"""
app_ifs.config

Configuration management for the function-system toolkit.
Loads settings from YAML and provides type-safe runtime configuration,
plus the RunConfig read by the report runner.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .utils.validation import (
    ConfigurationError,
    validate_grid,
    validate_mode,
    validate_offset_convention,
    validate_rate_method,
)


@dataclass
class ToleranceConfig:
    """Float comparison tolerances."""

    comparison: float = 1e-9
    gh: float = 1e-12


@dataclass
class BudgetConfig:
    """Limits on exponential searches; exceeding one downgrades with a flag."""

    gh_exact_points: int = 8
    exact_nodes: int = 60
    exact_steps: int = 200_000
    cover_steps: int = 200_000
    trace_gaps: int = 4096
    max_prefixes: int = 20_000


@dataclass
class EstimatorConfig:
    """Rate-fit settings and conventions."""

    fit_tail: int = 4
    limit_scales: int = 2
    entropy_rate: str = "slope"
    mdim_rate: str = "growth"
    offset_convention: str = "definition"

    def __post_init__(self) -> None:
        validate_rate_method(self.entropy_rate)
        validate_rate_method(self.mdim_rate)
        validate_offset_convention(self.offset_convention)


@dataclass
class OutputConfig:
    """Report file locations (relative to the run directory)."""

    directory: str = "reports"
    csv_name: str = "counts.csv"
    summary_name: str = "summary.json"
    plot_data_dir: str = "plot_data"


@dataclass
class LoggingConfig:
    level: str = "WARNING"
    rich_tracebacks: bool = True


@dataclass
class AppConfig:
    """Application-level configuration."""

    version: str = "0.1.0"
    seed: int = 0


@dataclass
class IfsConfig:
    """Complete toolkit configuration."""

    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    budgets: BudgetConfig = field(default_factory=BudgetConfig)
    estimators: EstimatorConfig = field(default_factory=EstimatorConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)
    app: AppConfig = field(default_factory=AppConfig)

    @classmethod
    def from_yaml(cls, yaml_path: Path) -> IfsConfig:
        """Load configuration from YAML file."""
        if not yaml_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {yaml_path}")

        with open(yaml_path, "r") as f:
            data = yaml.safe_load(f) or {}

        try:
            return cls(
                tolerances=ToleranceConfig(**data.get("tolerances", {})),
                budgets=BudgetConfig(**data.get("budgets", {})),
                estimators=EstimatorConfig(**data.get("estimators", {})),
                output=OutputConfig(**data.get("output", {})),
                logging=LoggingConfig(**data.get("logging", {})),
                app=AppConfig(**data.get("app", {})),
            )
        except TypeError as exc:
            raise ConfigurationError(f"Unknown setting in {yaml_path}: {exc}") from exc

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# Global configuration instance
_config: Optional[IfsConfig] = None


def get_config(config_path: Optional[Path] = None) -> IfsConfig:
    """
    Get the global configuration instance.

    :param config_path: Optional path to configuration YAML file.
                       If not provided, uses default location.
    :return: IfsConfig instance
    """
    global _config

    if _config is None:
        if config_path is None:
            # Default configuration location
            project_root = Path(__file__).parent.parent
            config_path = project_root / "config" / "ifs" / "settings.yaml"

        _config = IfsConfig.from_yaml(config_path)

    return _config


def reset_config() -> None:
    """Reset the global configuration (useful for testing)."""
    global _config
    _config = None


VALID_ANALYSES = [
    "check",
    "entropy",
    "mmdim",
    "mdim",
    "ocap",
    "sbp",
    "gop",
    "theorem1",
]


@dataclass
class RunConfig:
    """
    One report run: which system, which analyses, which grids.

    Exactly one of ``system`` (a description file) or ``gallery`` (a gallery
    name) must be set.
    """

    system: Optional[str] = None
    gallery: Optional[str] = None
    analyses: List[str] = field(default_factory=lambda: ["check", "entropy"])
    n_grid: List[int] = field(default_factory=lambda: [1, 2, 3, 4])
    eps_grid: List[str] = field(default_factory=lambda: ["1/2", "1/4", "1/8"])
    mode: str = "auto"
    sigma_sample: List[Any] = field(default_factory=list)
    sets: Dict[str, List[str]] = field(default_factory=dict)
    cover_radius: Optional[str] = None
    pool_floor: str = "0"
    gop_eps: List[str] = field(default_factory=list)
    gop_max_gap: int = 4
    gop_sequences: int = 8
    delta: Optional[str] = None
    output: str = "reports"
    seed: int = 0

    def __post_init__(self) -> None:
        if (self.system is None) == (self.gallery is None):
            raise ConfigurationError("Set exactly one of 'system' or 'gallery'")
        unknown = [a for a in self.analyses if a not in VALID_ANALYSES]
        if unknown:
            raise ConfigurationError(
                f"Unknown analyses: {', '.join(unknown)}. "
                f"Must be among: {', '.join(VALID_ANALYSES)}"
            )
        validate_mode(self.mode)
        validate_grid(self.n_grid, "n_grid")
        if not self.eps_grid:
            raise ConfigurationError("eps_grid must not be empty")

    @classmethod
    def from_file(cls, path: Path) -> RunConfig:
        """
        Load a run description (YAML or JSON).

        :raises FileNotFoundError: If the file is missing
        :raises ConfigurationError: If the content is malformed
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Run file not found: {path}")
        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"Cannot parse run file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigurationError(f"Run file {path} must hold a mapping")
        if data.get("system") is not None:
            system_path = Path(data["system"])
            if not system_path.is_absolute():
                data["system"] = str(path.parent / system_path)
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigurationError(f"Unknown field in run file {path}: {exc}") from exc

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
