"""
app_ifs.models.system

Partial maps, function systems and the admissibility graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx
import numpy as np

from ..utils.validation import ConfigurationError
from .metric import MetricSpaceModel, Point


@dataclass(frozen=True)
class PartialMap:
    """
    An injection defined on a subset of the space.

    ``pairs`` lists (x, v(x)) for every x in the domain, in the order given.
    """

    id: str
    pairs: Tuple[Tuple[Point, Point], ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise ConfigurationError("Map id must be a nonempty string")
        if not self.pairs:
            raise ConfigurationError(f"Map '{self.id}' has an empty domain")
        sources = [x for x, _ in self.pairs]
        targets = [y for _, y in self.pairs]
        if len(set(sources)) != len(sources):
            raise ConfigurationError(f"Map '{self.id}' lists a domain point twice")
        if len(set(targets)) != len(targets):
            raise ConfigurationError(f"Map '{self.id}' is not injective")

    @cached_property
    def image_of(self) -> Dict[Point, Point]:
        return dict(self.pairs)

    @property
    def domain(self) -> FrozenSet[Point]:
        return frozenset(self.image_of)

    @property
    def image(self) -> FrozenSet[Point]:
        return frozenset(self.image_of.values())

    def __call__(self, x: Point) -> Optional[Point]:
        return self.image_of.get(x)


@dataclass(frozen=True)
class FunctionSystem:
    """
    A finite metric model with a finite ordered family of partial maps.

    Map order is the symbol order used for every lexicographic choice.
    """

    space: MetricSpaceModel
    maps: Tuple[PartialMap, ...]
    name: str = ""

    def __post_init__(self) -> None:
        ids = [v.id for v in self.maps]
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"Duplicate map ids in system '{self.name}'")
        known = set(self.space.points)
        for v in self.maps:
            stray = sorted((v.domain | v.image) - known)
            if stray:
                raise ConfigurationError(
                    f"Map '{v.id}' uses points outside the space: {', '.join(stray)}"
                )

    @property
    def map_ids(self) -> Tuple[str, ...]:
        return tuple(v.id for v in self.maps)

    @cached_property
    def map_index(self) -> Dict[str, int]:
        return {v.id: k for k, v in enumerate(self.maps)}

    def map_position(self, map_id: str) -> int:
        try:
            return self.map_index[map_id]
        except KeyError as exc:
            raise ConfigurationError(
                f"Unknown map id '{map_id}' in system '{self.name}'"
            ) from exc

    def get_map(self, map_id: str) -> PartialMap:
        return self.maps[self.map_position(map_id)]

    @cached_property
    def step_table(self) -> np.ndarray:
        """
        Array of shape (maps, points): position of v(x), or -1 where x is
        outside the domain of v.
        """
        table = np.full((len(self.maps), self.space.size), -1, dtype=np.int64)
        for k, v in enumerate(self.maps):
            for x, y in v.pairs:
                table[k, self.space.position(x)] = self.space.position(y)
        return table

    @cached_property
    def graph(self) -> AdmissibilityGraph:
        return AdmissibilityGraph.from_system(self)


@dataclass(frozen=True)
class AdmissibilityGraph:
    """
    Labeled transition graph x -(v)-> v(x) over the space points.

    ``infinite_core`` holds the points from which an infinite labeled path
    exists, i.e. the points that reach a cycle.
    """

    graph: nx.MultiDiGraph
    infinite_core: FrozenSet[Point]
    core_mask: np.ndarray

    @classmethod
    def from_system(cls, fs: FunctionSystem) -> AdmissibilityGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(fs.space.points)
        for v in fs.maps:
            for x, y in v.pairs:
                graph.add_edge(x, y, key=v.id, map=v.id)

        cyclic: set = set()
        for component in nx.strongly_connected_components(graph):
            if len(component) > 1:
                cyclic.update(component)
        cyclic.update(x for x, _ in nx.selfloop_edges(graph))

        core = set(cyclic)
        for node in cyclic:
            core.update(nx.ancestors(graph, node))

        mask = np.zeros(fs.space.size, dtype=bool)
        for x in core:
            mask[fs.space.position(x)] = True
        return cls(graph=graph, infinite_core=frozenset(core), core_mask=mask)

    @property
    def nodes(self) -> List[Point]:
        return list(self.graph.nodes)

    @property
    def edges(self) -> List[Tuple[Point, str, Point]]:
        return [(x, key, y) for x, y, key in self.graph.edges(keys=True)]

    def core_subgraph(self) -> nx.MultiDiGraph:
        return self.graph.subgraph(self.infinite_core).copy()
