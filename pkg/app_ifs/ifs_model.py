"""
app_ifs.ifs_model

Function-system construction, the admissibility graph and the IFS
witness-set condition.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

from .models.metric import MetricSpaceModel, Point
from .models.system import AdmissibilityGraph, FunctionSystem, PartialMap

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IfsCheck:
    """Outcome of the IFS condition test."""

    is_ifs: bool
    witness: Optional[FrozenSet[Point]]
    finite_family: bool = True


def make_system(
    space: MetricSpaceModel,
    maps: Sequence[Tuple[str, Iterable[Tuple[Point, Point]]]],
    name: str = "",
) -> FunctionSystem:
    """
    Build a function system from (id, pairs) entries.

    :param space: Ambient model
    :param maps: Sequence of (map id, iterable of (x, v(x)) pairs)
    :param name: Optional system name
    :return: FunctionSystem
    """
    partial = tuple(
        PartialMap(id=str(map_id), pairs=tuple((str(x), str(y)) for x, y in pairs))
        for map_id, pairs in maps
    )
    return FunctionSystem(space=space, maps=partial, name=name)


def build_graph(fs: FunctionSystem) -> AdmissibilityGraph:
    """
    Admissibility graph of a system with its infinite core.

    :param fs: Function system
    :return: AdmissibilityGraph (cached on the system)
    """
    graph = fs.graph
    logger.debug(
        "System '%s': %d edges, infinite core of %d points",
        fs.name,
        graph.graph.number_of_edges(),
        len(graph.infinite_core),
    )
    return graph


def _image_union(fs: FunctionSystem, subset: FrozenSet[Point]) -> FrozenSet[Point]:
    return frozenset(y for v in fs.maps for x, y in v.pairs if x in subset)


def _domain_union(fs: FunctionSystem) -> FrozenSet[Point]:
    return frozenset(x for v in fs.maps for x in v.domain)


def satisfies_ifs_condition(fs: FunctionSystem, subset: Iterable[Point]) -> bool:
    """
    Test ∅ ≠ ⋃ v(D(v) ∩ O) ⊆ ⋃ D(v) ∩ O for a candidate set O.
    """
    candidate = frozenset(subset)
    images = _image_union(fs, candidate)
    return bool(images) and images <= (_domain_union(fs) & candidate)


def ifs_witness(fs: FunctionSystem) -> Optional[FrozenSet[Point]]:
    """
    Maximal witness set O for the IFS condition, or None.

    Iterated deletion starts from the whole space and removes any x ∈ D(v) ∩ O
    whose image leaves (⋃ D(v)) ∩ O, until nothing changes. Points in no domain
    never violate the condition and stay in O.

    :param fs: Function system
    :return: The maximal O, or None when no nonempty witness survives
    """
    domains = _domain_union(fs)
    current = set(fs.space.points)
    changed = True
    while changed:
        changed = False
        for v in fs.maps:
            for x, y in v.pairs:
                if x in current and (y not in current or y not in domains):
                    current.discard(x)
                    changed = True
    witness = frozenset(current)
    if not _image_union(fs, witness):
        logger.debug("System '%s' has no nonempty IFS witness", fs.name)
        return None
    return witness


def check_ifs(fs: FunctionSystem) -> IfsCheck:
    """Wrapper over ifs_witness: true iff a witness exists."""
    witness = ifs_witness(fs)
    return IfsCheck(is_ifs=witness is not None, witness=witness)
