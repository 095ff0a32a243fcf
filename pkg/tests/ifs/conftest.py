"""
Pytest configuration and shared fixtures for function-system tests.
"""

import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Generator

import pytest
import yaml

from app_ifs.config import IfsConfig, reset_config
from app_ifs.generators import circle, identity, rotation
from app_ifs.ifs_model import make_system
from app_ifs.metric_core import make_model
from app_ifs.models.system import FunctionSystem


def line_model(positions, names, name="line"):
    """Points on a line at the given rational positions."""
    values = [Fraction(p) for p in positions]
    matrix = [[abs(a - b) for b in values] for a in values]
    return make_model(names, matrix, name=name)


@pytest.fixture(autouse=True)
def fresh_config() -> Generator[None, None, None]:
    """Every test starts from the default settings file."""
    reset_config()
    yield
    reset_config()


@pytest.fixture
def tmp_dir() -> Generator[Path, None, None]:
    """A temporary directory removed after the test."""
    with tempfile.TemporaryDirectory() as name:
        yield Path(name)


@pytest.fixture
def test_config_yaml() -> Generator[Path, None, None]:
    """A temporary settings YAML file."""
    with tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
        f.write(
            """
tolerances:
  comparison: 1.0e-9
budgets:
  exact_nodes: 40
  trace_gaps: 128
estimators:
  fit_tail: 3
  entropy_rate: growth
  offset_convention: proof
output:
  directory: "out"
logging:
  level: INFO
app:
  version: "0.1.0-test"
  seed: 7
"""
        )
        config_path = Path(f.name)

    yield config_path

    if config_path.exists():
        config_path.unlink()


@pytest.fixture
def test_config(test_config_yaml: Path) -> Generator[IfsConfig, None, None]:
    reset_config()
    yield IfsConfig.from_yaml(test_config_yaml)
    reset_config()


@pytest.fixture
def rotation4() -> FunctionSystem:
    """Rotation by one step on the 4-point circle."""
    return make_system(circle(4), [rotation(4, 1)], name="rotation-4")


@pytest.fixture
def rotation12() -> FunctionSystem:
    return make_system(circle(12), [rotation(12, 1)], name="rotation-12")


@pytest.fixture
def rotation_plus_identity() -> FunctionSystem:
    space = circle(4)
    return make_system(space, [rotation(4, 1), identity(space.points)])


@pytest.fixture
def stray_arrow() -> FunctionSystem:
    """A swap on {a, b} with c feeding into a."""
    space = line_model([0, Fraction(1, 4), 1], ["a", "b", "c"], "stray-arrow")
    return make_system(space, [("swap", [("a", "b"), ("b", "a")]), ("feed", [("c", "a")])])


@pytest.fixture
def write_yaml(tmp_dir: Path):
    """Write a mapping or list to a YAML file in the temporary directory."""

    def _write(name: str, data) -> Path:
        path = tmp_dir / name
        path.write_text(yaml.safe_dump(data, sort_keys=False))
        return path

    return _write
