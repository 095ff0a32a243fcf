"""
app_ifs.loaders

Read space, system, σ, cover, pair and orbit-sequence descriptions from
YAML or JSON files (JSON is read through the YAML parser).

Space file::

    name: circle-12
    metric: {generator: circle, n: 12}          # or an explicit matrix
    points: [a, b, c]                            # with an explicit matrix
    resolution: "1/4"                            # optional

System file::

    name: rotation
    space: circle.yaml                           # path or inline mapping
    maps:
      - generator: rotation(1)
      - id: swap
        pairs: [[a, b], [b, a]]
        domain: [a, b]                           # optional cross-check
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import yaml

from .cover_dimension import ball_cover
from .generators import MapSpec, build_named_maps, build_named_space
from .ifs_model import make_system
from .metric_core import make_model
from .models.cover import Cover
from .models.gluing import OrbitSequence, Segment
from .models.metric import MetricSpaceModel, Point
from .models.orbit import SigmaGenerator
from .models.system import FunctionSystem
from .utils.numeric import as_number
from .utils.validation import ConfigurationError, validate_subset

logger = logging.getLogger(__name__)

Source = Union[str, Path, Dict[str, Any]]


def read_document(path: Union[str, Path]) -> Any:
    """
    Parse a YAML or JSON file.

    :raises FileNotFoundError: If the file is missing
    :raises ConfigurationError: If the content cannot be parsed
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Description file not found: {path}")
    try:
        with open(path, "r") as f:
            return yaml.safe_load(f)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"Cannot parse {path}: {exc}") from exc


def _mapping(source: Source, what: str) -> Tuple[Dict[str, Any], Optional[Path]]:
    if isinstance(source, dict):
        return source, None
    data = read_document(source)
    if not isinstance(data, dict):
        raise ConfigurationError(f"{what} file {source} must hold a mapping")
    return data, Path(source).parent


def _generator_of(data: Dict[str, Any]) -> Optional[Dict[str, Any]]:
    metric = data.get("metric")
    if isinstance(metric, dict):
        params = {k: v for k, v in metric.items() if k != "generator"}
        if "generator" not in metric:
            raise ConfigurationError("A metric mapping needs a 'generator' name")
        return {"name": metric["generator"], "params": params}
    return None


def load_space(source: Source) -> MetricSpaceModel:
    """
    Build a MetricSpaceModel from a description.

    :raises ConfigurationError: On a missing metric, a bad matrix or an
        unknown generator
    """
    data, _ = _mapping(source, "Space")
    generator = _generator_of(data)
    name = str(data.get("name", ""))
    if generator is not None:
        model = build_named_space(generator["name"], **generator["params"])
        if name:
            model = MetricSpaceModel(
                points=model.points,
                matrix=model.matrix,
                resolution=model.resolution,
                name=name,
            )
    else:
        matrix = data.get("metric")
        points = data.get("points")
        if not isinstance(matrix, list) or not isinstance(points, list):
            raise ConfigurationError(
                "A space needs 'points' with an explicit 'metric' matrix, "
                "or a 'metric' generator mapping"
            )
        try:
            model = make_model(points, matrix, name=name)
        except TypeError as exc:
            raise ConfigurationError(f"Bad distance table: {exc}") from exc
    if data.get("resolution") is not None:
        model = MetricSpaceModel(
            points=model.points,
            matrix=model.matrix,
            resolution=as_number(data["resolution"]),
            name=model.name,
        )
    logger.debug("Loaded space '%s' with %d points", model.name, model.size)
    return model


def _explicit_map(entry: Dict[str, Any]) -> MapSpec:
    if "id" not in entry or "pairs" not in entry:
        raise ConfigurationError(f"Map entry needs 'id' and 'pairs': {entry}")
    pairs = entry["pairs"]
    if not isinstance(pairs, list) or any(
        not isinstance(p, (list, tuple)) or len(p) != 2 for p in pairs
    ):
        raise ConfigurationError(f"Map '{entry['id']}': pairs must be [x, y] lists")
    normalized = [(str(x), str(y)) for x, y in pairs]
    domain = entry.get("domain")
    if domain is not None and {str(x) for x in domain} != {x for x, _ in normalized}:
        raise ConfigurationError(
            f"Map '{entry['id']}': declared domain does not match its pairs"
        )
    return (str(entry["id"]), normalized)


def load_system(source: Source) -> FunctionSystem:
    """
    Build a FunctionSystem from a description.

    :raises ConfigurationError: On malformed maps, unknown generators or maps
        that leave the space
    """
    data, base = _mapping(source, "System")
    space_ref = data.get("space")
    if space_ref is None:
        raise ConfigurationError("A system description needs a 'space'")
    relative = isinstance(space_ref, str) and not Path(space_ref).is_absolute()
    if relative and base is not None:
        space_ref = base / space_ref
    space_data, _ = _mapping(space_ref, "Space")
    space = load_space(space_data)
    generator = _generator_of(space_data) or {}

    entries = data.get("maps")
    if not isinstance(entries, list) or not entries:
        raise ConfigurationError("A system description needs a nonempty 'maps' list")
    specs: List[MapSpec] = []
    for entry in entries:
        if isinstance(entry, str):
            specs.extend(build_named_maps(entry, space, generator))
        elif isinstance(entry, dict) and "generator" in entry:
            specs.extend(build_named_maps(str(entry["generator"]), space, generator))
        elif isinstance(entry, dict):
            specs.append(_explicit_map(entry))
        else:
            raise ConfigurationError(f"Cannot read map entry {entry!r}")
    return make_system(space, specs, name=str(data.get("name", space.name)))


def load_sigma(value: Union[str, Dict[str, Any], SigmaGenerator]) -> SigmaGenerator:
    return SigmaGenerator.parse(value)


def load_subset(model: MetricSpaceModel, value: Sequence) -> FrozenSet[Point]:
    """A point subset; every member must be a point of the model."""
    if not isinstance(value, (list, tuple, set, frozenset)):
        raise ConfigurationError(f"A subset must be a list of points, got {value!r}")
    members = [str(p) for p in value]
    try:
        validate_subset(members, model.points, "subset")
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc
    return frozenset(members)


def load_cover(model: MetricSpaceModel, value: Any) -> Cover:
    """
    A cover of the whole space from ``{balls: r}``, ``{elements: {label: [...]}}``
    or a plain list of point lists.

    :raises ConfigurationError: If the elements do not cover the space
    """
    if isinstance(value, dict) and "balls" in value:
        return ball_cover(model, as_number(value["balls"]))
    if isinstance(value, dict) and "elements" in value:
        raw = value["elements"]
        items = raw.items() if isinstance(raw, dict) else enumerate(raw)
    elif isinstance(value, list):
        items = enumerate(value)
    else:
        raise ConfigurationError(f"Cannot read a cover from {value!r}")
    elements = [(str(label), load_subset(model, members)) for label, members in items]
    cover = Cover.build(elements, model.points)
    missing = cover.uncovered()
    if missing:
        raise ConfigurationError(
            f"Cover leaves points uncovered: {', '.join(sorted(missing))}"
        )
    return cover


def load_pairs(
    model: MetricSpaceModel, value: Any
) -> List[Tuple[FrozenSet[Point], FrozenSet[Point]]]:
    """Cover pairs (U_i, V_i) from a list of ``{U: [...], V: [...]}`` entries."""
    if not isinstance(value, list) or not value:
        raise ConfigurationError("Pairs must be a nonempty list of {U, V} entries")
    pairs = []
    for entry in value:
        if not isinstance(entry, dict) or "U" not in entry or "V" not in entry:
            raise ConfigurationError(f"Pair entry needs 'U' and 'V': {entry!r}")
        pairs.append((load_subset(model, entry["U"]), load_subset(model, entry["V"])))
    return pairs


def load_orbit_sequence(value: Any) -> OrbitSequence:
    """
    An orbit sequence from a list of ``{point, sigma, length, unbounded}``
    entries.
    """
    if not isinstance(value, list) or not value:
        raise ConfigurationError("An orbit sequence must be a nonempty list")
    segments = []
    for entry in value:
        if not isinstance(entry, dict) or not {"point", "sigma", "length"} <= set(entry):
            raise ConfigurationError(
                f"Segment entry needs 'point', 'sigma' and 'length': {entry!r}"
            )
        segments.append(
            Segment(
                point=str(entry["point"]),
                sigma=SigmaGenerator.parse(entry["sigma"]),
                length=int(entry["length"]),
                unbounded=bool(entry.get("unbounded", False)),
            )
        )
    return OrbitSequence(tuple(segments))
