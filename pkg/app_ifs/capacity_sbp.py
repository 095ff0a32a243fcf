"""
app_ifs.capacity_sbp

Orbit capacity by dynamic programming and maximum cycle mean, small sets,
the small-boundary property on δ-shells, and the partition-of-unity and f_N
constructions.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .cover_dimension import compatible, orbit_join
from .metric_core import ball, set_distance
from .models.capacity import (
    CapacityResult,
    CapacityTable,
    LsbpCertificate,
    OcapResult,
    PartitionOfUnity,
    SbpEntry,
    SbpReport,
    T2Result,
)
from .models.cover import Cover
from .models.metric import MetricSpaceModel, Point
from .models.orbit import SigmaGenerator
from .models.system import FunctionSystem
from .orbit_engine import sigma_sigma, sigma_trace_table
from .utils.numeric import Number, as_number, at_most, close, less_than
from .utils.validation import (
    DomainError,
    validate_horizon,
    validate_positive,
    validate_subset,
)

logger = logging.getLogger(__name__)

DEFAULT_CURVE = (1, 2, 4, 8, 16, 32)


def _indicator(fs: FunctionSystem, target: Iterable[Point]) -> np.ndarray:
    members = list(target)
    validate_subset(members, fs.space.points, "A")
    mask = np.zeros(fs.space.size, dtype=np.int64)
    for x in members:
        mask[fs.space.position(x)] = 1
    return mask


def _best_visits(fs: FunctionSystem, weights: np.ndarray, horizon: int) -> List[np.ndarray]:
    """
    best[n-1][x] = most visits to A along an extendable length-n prefix from x,
    or -1 when x is outside the infinite core.
    """
    core = fs.graph.core_mask
    table = fs.step_table
    valid = (table >= 0) & core[np.maximum(table, 0)]
    best = np.where(core, weights, -1)
    rows = [best]
    for _ in range(1, horizon):
        following = np.where(valid, best[np.maximum(table, 0)], -1)
        step = following.max(axis=0) if len(fs.maps) else np.full(fs.space.size, -1)
        best = np.where(core & (step >= 0), weights + step, -1)
        rows.append(best)
    return rows


def capacity(fs: FunctionSystem, A: Iterable[Point], n: int, x: Point) -> CapacityResult:
    """
    cap(n, x, A): the largest fraction of steps 0..n-1 spent in A over
    admissible length-n prefixes from x that extend to an infinite orbit.

    :return: CapacityResult; undefined when Σ_x is empty
    """
    validate_horizon(n, "n")
    weights = _indicator(fs, A)
    best = _best_visits(fs, weights, n)[-1][fs.space.position(x)]
    if best < 0:
        return CapacityResult(value=None, defined=False, n=n)
    return CapacityResult(value=Fraction(int(best), n), defined=True, n=n)


def capacity_table(
    fs: FunctionSystem, A: Iterable[Point], horizons: Sequence[int]
) -> CapacityTable:
    """Fill cap(n, x, A) for every point and horizon in one sweep."""
    members = frozenset(A)
    wanted = sorted(set(horizons))
    for n in wanted:
        validate_horizon(n, "n")
    table = CapacityTable(target=members, horizons=tuple(wanted))
    if not wanted:
        return table
    rows = _best_visits(fs, _indicator(fs, members), wanted[-1])
    for n in wanted:
        for position, best in enumerate(rows[n - 1]):
            if best >= 0:
                table.values[(n, fs.space.points[position])] = Fraction(int(best), n)
    return table


def _karp(
    graph: nx.DiGraph, nodes: List[Point], weight: Dict[Point, int]
) -> Tuple[Fraction, Point]:
    """Maximum mean cycle of node weights in a strongly connected graph."""
    size = len(nodes)
    source = nodes[0]
    walks: List[Dict[Point, Optional[int]]] = [{v: None for v in nodes}]
    walks[0][source] = 0
    for k in range(1, size + 1):
        level: Dict[Point, Optional[int]] = {}
        for v in nodes:
            options = [
                walks[k - 1][u] + weight[u]
                for u in graph.predecessors(v)
                if walks[k - 1][u] is not None
            ]
            level[v] = max(options) if options else None
        walks.append(level)

    best: Optional[Fraction] = None
    best_node = source
    for v in nodes:
        final = walks[size][v]
        if final is None:
            continue
        worst = min(
            Fraction(final - walks[k][v], size - k)
            for k in range(size)
            if walks[k][v] is not None
        )
        if best is None or worst > best:
            best, best_node = worst, v
    return (best if best is not None else Fraction(0)), best_node


def _best_cycle(
    graph: nx.DiGraph, nodes: List[Point], weight: Dict[Point, int], mean: Fraction
) -> Tuple[Point, ...]:
    for cycle in nx.simple_cycles(graph.subgraph(nodes)):
        if Fraction(sum(weight[v] for v in cycle), len(cycle)) == mean:
            return tuple(cycle)
    return ()


def ocap(
    fs: FunctionSystem,
    A: Iterable[Point],
    curve_horizons: Sequence[int] = DEFAULT_CURVE,
    with_cycle: bool = False,
) -> OcapResult:
    """
    Orbit capacity of A: the maximum cycle mean of 1_A over cycles of the
    admissibility graph inside the infinite core.

    Points with no infinite orbit are excluded. The DP curve
    n ↦ sup_x cap(n, x, A) is attached for comparison.

    :param with_cycle: Also return one cycle attaining the maximum
    :return: OcapResult; undefined when the infinite core is empty
    """
    members = frozenset(A)
    weights = _indicator(fs, members)
    core = fs.graph.infinite_core
    if not core:
        logger.warning("System '%s' has an empty infinite core; ocap undefined", fs.name)
        return OcapResult(value=None, defined=False)

    graph = nx.DiGraph(fs.graph.core_subgraph())
    weight = {x: int(weights[fs.space.position(x)]) for x in graph.nodes}
    best: Optional[Fraction] = None
    best_component: List[Point] = []
    for component in nx.strongly_connected_components(graph):
        nodes = sorted(component, key=fs.space.position)
        if len(nodes) == 1 and not graph.has_edge(nodes[0], nodes[0]):
            continue
        mean, _ = _karp(graph.subgraph(nodes), nodes, weight)
        if best is None or mean > best:
            best, best_component = mean, nodes

    curve = capacity_table(fs, members, curve_horizons).curve() if curve_horizons else {}
    value = best if best is not None else Fraction(0)
    cycle = _best_cycle(graph, best_component, weight, value) if with_cycle else ()
    return OcapResult(value=value, defined=True, cycle=cycle, curve=curve)


def is_small(fs: FunctionSystem, A: Iterable[Point]) -> bool:
    """A is small when ocap(A) = 0; an undefined ocap is not small."""
    result = ocap(fs, A, curve_horizons=())
    return result.defined and result.value == 0


def shell(model: MetricSpaceModel, V: Iterable[Point], delta: Number) -> FrozenSet[Point]:
    """
    δ-shell boundary surrogate {y : d(y, V) ≤ δ and d(y, X∖V) ≤ δ}.

    Empty when V is empty or the whole space.
    """
    inside = frozenset(V)
    outside = frozenset(model.points) - inside
    if not inside or not outside:
        return frozenset()
    width = as_number(delta)
    return frozenset(
        y
        for y in model.points
        if at_most(set_distance(model, y, inside), width)
        and at_most(set_distance(model, y, outside), width)
    )


def frontier(model: MetricSpaceModel, V: Iterable[Point], width: Number) -> FrozenSet[Point]:
    """Points of V within ``width`` of the complement of V."""
    inside = frozenset(V)
    outside = frozenset(model.points) - inside
    if not outside:
        return frozenset()
    return frozenset(
        y for y in inside if at_most(set_distance(model, y, outside), width)
    )


def _radii_from(model: MetricSpaceModel, center: Point, limit: Number) -> List[Number]:
    row = model.matrix[model.position(center)]
    radii = sorted({v for v in row if v > 0 and at_most(v, limit)} | {limit})
    return radii


def sbp_check(
    fs: FunctionSystem,
    delta,
    balls: Optional[Sequence[Tuple[Point, object]]] = None,
) -> SbpReport:
    """
    For each (x, U = B(x, r)) find a sub-ball V = B(x, r') ∋ x, r' ≤ r, whose
    δ-shell has orbit capacity zero.

    :param delta: Shell width (> 0)
    :param balls: (center, radius) pairs; defaults to every point with every
                  positive distance from it as radius
    """
    width = as_number(delta)
    validate_positive(float(width), "delta")
    model = fs.space
    if balls is None:
        balls = [
            (x, r)
            for x in model.points
            for r in sorted({v for v in model.matrix[model.position(x)] if v > 0})
        ]
    report = SbpReport(delta=width)
    for center, raw_radius in balls:
        radius = as_number(raw_radius)
        best_shell: FrozenSet[Point] = frozenset()
        best_value: Optional[Fraction] = None
        witness = witness_radius = None
        for r in _radii_from(model, center, radius):
            V = ball(model, center, r)
            boundary = shell(model, V, width)
            value = ocap(fs, boundary, curve_horizons=()).value
            if value is None:
                continue
            if best_value is None or value < best_value:
                best_value, best_shell = value, boundary
            if value == 0:
                witness, witness_radius, best_shell = V, r, boundary
                break
        report.entries.append(
            SbpEntry(
                center=center,
                radius=radius,
                witness=witness,
                witness_radius=witness_radius,
                shell=best_shell,
                shell_ocap=best_value,
            )
        )
    if not report.holds:
        logger.info(
            "SBP fails for %d of %d neighborhoods",
            len(report.failures),
            len(report.entries),
        )
    return report


def lsbp_partition(
    fs: FunctionSystem,
    sigma: SigmaGenerator,
    pairs: Sequence[Tuple[Iterable[Point], Iterable[Point]]],
    eps,
    N: int,
    delta,
    width=None,
) -> Tuple[PartitionOfUnity, LsbpCertificate]:
    """
    Partition of unity subordinate to the cover {U_j} from shrunk sets V_j ⊆ U_j.

    ψ_j is 1 on V_j and max(0, 1 − d(x, ∂V_j)/δ) elsewhere, where ∂V_j is the
    frontier of V_j at ``width`` (default: the model resolution). Then
    φ_1 = ψ_1 and φ_{i+1} = min(ψ_{i+1}, 1 − Σ_{l≤i} φ_l).

    The certificate records sum-to-one and subordination on Σ_σ, the capacity
    of the boundary region at horizon N against ε, and every (x, j) where
    the δ-neighbourhood premise (1/N)Σ 1_{B_δ,j}(v^{σ(i)}x) < ε/|α| fails.

    :raises DomainError: If some V_j is not inside U_j
    """
    validate_horizon(N, "N")
    model = fs.space
    d = as_number(delta)
    validate_positive(float(d), "delta")
    threshold = as_number(eps)
    frontier_width = model.resolution if width is None else as_number(width)
    sets = [(frozenset(u), frozenset(v)) for u, v in pairs]
    for j, (u, v) in enumerate(sets):
        validate_subset(list(u | v), model.points, f"pair {j}")
        if not v <= u:
            raise DomainError(f"Pair {j}: V is not contained in U")

    labels = tuple(f"U{j}" for j in range(len(sets)))
    boundaries = [frontier(model, v, frontier_width) for _, v in sets]
    psi: List[Dict[Point, Fraction]] = []
    for (_, v), edge in zip(sets, boundaries):
        values: Dict[Point, Fraction] = {}
        for x in model.points:
            if x in v:
                values[x] = Fraction(1)
            else:
                gap = set_distance(model, x, edge)
                values[x] = Fraction(0) if gap is None else max(Fraction(0), 1 - gap / d)
        psi.append(values)

    phi: Dict[str, Dict[Point, Fraction]] = {label: {} for label in labels}
    for x in model.points:
        used = Fraction(0)
        for label, values in zip(labels, psi):
            share = min(values[x], 1 - used)
            phi[label][x] = share
            used += share

    carrier = sigma_sigma(fs, sigma)
    region = frozenset(
        x for x in model.points if any(0 < phi[label][x] < 1 for label in labels)
    )
    partition = PartitionOfUnity(
        labels=labels,
        functions=phi,
        carrier=carrier,
        boundary_region=region,
        subordinate_to=tuple(u for u, _ in sets),
    )

    sum_to_one = all(close(sum(phi[label][x] for label in labels), 1) for x in carrier)
    subordinate = all(
        all(phi[label][x] == 0 for x in carrier if x not in u)
        for label, (u, _) in zip(labels, sets)
    )
    cap_table = capacity_table(fs, region, [N])
    boundary_capacity = cap_table.sup(N)
    boundary_small = boundary_capacity is not None and less_than(boundary_capacity, threshold)

    violations: List[Tuple[Point, str]] = []
    points = sorted(carrier, key=model.position)
    if points:
        traces = sigma_trace_table(fs, sigma, N, model.positions(points))
        share = threshold / len(sets) if sets else threshold
        for label, edge in zip(labels, boundaries):
            near = np.zeros(model.size, dtype=bool)
            for y in model.points:
                gap = set_distance(model, y, edge)
                near[model.position(y)] = gap is not None and less_than(gap, d)
            visits = near[traces].sum(axis=1)
            for x, count in zip(points, visits):
                if not less_than(Fraction(int(count), N), share):
                    violations.append((x, label))
    if violations:
        logger.warning(
            "Boundary-neighbourhood premise fails at %d (point, element) pairs", len(violations)
        )

    certificate = LsbpCertificate(
        delta=d,
        N=N,
        eps=threshold,
        sum_to_one=sum_to_one,
        subordinate=subordinate,
        boundary_capacity=boundary_capacity,
        boundary_small=boundary_small,
        premise_violations=violations,
    )
    return partition, certificate


def t2_map(
    fs: FunctionSystem,
    sigma: SigmaGenerator,
    partition: PartitionOfUnity,
    N: int,
    eps,
) -> T2Result:
    """
    f_N(x) = (Φ(x), Φ(v^{σ(1)}x), …, Φ(v^{σ(N−1)}x)) on Σ_σ.

    Compatibility is checked against α_0^{N−1}(σ) for α = {U_j}, the sets the
    partition is subordinate to; open
    coordinates (values strictly between 0 and 1) are counted per orbit and
    compared with ε·N·|α|.
    """
    validate_horizon(N, "N")
    model = fs.space
    points = sorted(sigma_sigma(fs, sigma), key=model.position)
    values: Dict[Point, Tuple] = {}
    open_counts: Dict[Point, int] = {}
    if points:
        traces = sigma_trace_table(fs, sigma, N, model.positions(points))
        for x, row in zip(points, traces):
            vector = tuple(
                value for p in row for value in partition.vector(model.points[p])
            )
            values[x] = vector
            open_counts[x] = sum(1 for value in vector if 0 < value < 1)
    cover = Cover.build(zip(partition.labels, partition.subordinate_to), model.points)
    joined = orbit_join(fs, sigma, cover, 0, N - 1, carrier=points)
    verdict = compatible(values, joined)
    budget = float(as_number(eps)) * N * len(partition.labels)
    return T2Result(
        values=values, compatibility=verdict, open_coordinates=open_counts, budget=budget
    )
