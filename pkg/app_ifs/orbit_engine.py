"""
app_ifs.orbit_engine

Orbit evaluation along symbol sequences, prefix enumeration and the joint
orbit distances that every counting quantity is built on.

Distances along orbits use the indices 0..n-1: a horizon of n visits n points.
"""

from __future__ import annotations

import logging
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .models.metric import Point
from .models.orbit import OrbitPrefix, PrefixTable, SigmaGenerator
from .models.system import FunctionSystem
from .utils.numeric import Number
from .utils.validation import DomainError, validate_horizon, validate_subset

logger = logging.getLogger(__name__)

INDEX_CONVENTION = "0..n-1"

SymbolSource = Union[SigmaGenerator, Sequence[str]]


def _symbol_at(source: SymbolSource, n: int) -> Optional[str]:
    if isinstance(source, SigmaGenerator):
        return source.symbol(n)
    if n - 1 < len(source):
        return source[n - 1]
    return None


def validate_sigma(fs: FunctionSystem, sigma: SigmaGenerator) -> None:
    """Raise ConfigurationError when sigma uses a map the system lacks."""
    for map_id in sigma.map_ids:
        fs.map_position(map_id)


def evaluate(
    fs: FunctionSystem, x: Point, sigma: SigmaGenerator, n: int
) -> Optional[Point]:
    """
    v^{σ(n)}(x): apply σ's first n symbols to x.

    :param fs: Function system
    :param x: Start point
    :param sigma: Symbol sequence
    :param n: Number of steps (0 returns x)
    :return: The image, or None when some step leaves a domain
    :raises ConfigurationError: If σ names an unknown map
    """
    return evaluate_window(fs, x, sigma, 0, n)


def evaluate_window(
    fs: FunctionSystem, x: Point, sigma: SymbolSource, a: int, b: int
) -> Optional[Point]:
    """
    v^{σ(b,a)}(x) = v_b ∘ … ∘ v_{a+1}(x).

    :param a: Start index (a >= 0)
    :param b: End index (b >= a)
    :return: The image, or None when undefined
    """
    validate_horizon(a, "a", minimum=0)
    validate_horizon(b, "b", minimum=a)
    if isinstance(sigma, SigmaGenerator):
        validate_sigma(fs, sigma)
    position = fs.space.position(x)
    for i in range(a + 1, b + 1):
        map_id = _symbol_at(sigma, i)
        if map_id is None:
            return None
        position = int(fs.step_table[fs.map_position(map_id), position])
        if position < 0:
            return None
    return fs.space.points[position]


def orbit_trace(
    fs: FunctionSystem, x: Point, sigma: SymbolSource, n: int
) -> Optional[Tuple[Point, ...]]:
    """Visited points x, v^{σ(1)}x, …, v^{σ(n-1)}x, or None when undefined."""
    validate_horizon(n, "n")
    position = fs.space.position(x)
    trace = [position]
    for i in range(1, n):
        map_id = _symbol_at(sigma, i)
        if map_id is None:
            return None
        position = int(fs.step_table[fs.map_position(map_id), position])
        if position < 0:
            return None
        trace.append(position)
    return tuple(fs.space.points[p] for p in trace)


def sigma_trace_table(
    fs: FunctionSystem,
    sigma: SigmaGenerator,
    n: int,
    starts: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Orbit positions of many starts along σ.

    :return: Array of shape (starts, n) with -1 from the first undefined step on
    """
    validate_sigma(fs, sigma)
    if starts is None:
        starts = np.arange(fs.space.size, dtype=np.int64)
    table = np.full((len(starts), n), -1, dtype=np.int64)
    if n == 0:
        return table
    table[:, 0] = starts
    current = np.asarray(starts, dtype=np.int64)
    for i in range(1, n):
        k = fs.map_position(sigma.symbol(i))
        nxt = np.where(current >= 0, fs.step_table[k, np.maximum(current, 0)], -1)
        table[:, i] = nxt
        current = nxt
    return table


def certified_horizon(fs: FunctionSystem, sigma: SigmaGenerator) -> int:
    """Horizon after which Σ_σ computed at that horizon cannot shrink further."""
    return len(sigma.pre) + fs.space.size * len(sigma.period)


def sigma_sigma(
    fs: FunctionSystem, sigma: SigmaGenerator, n: Optional[int] = None
) -> FrozenSet[Point]:
    """
    Σ_σ at a horizon: points on which σ's first n steps are all defined.

    :param n: Horizon; defaults to the certified horizon, where the result
              equals the true Σ_σ for the eventually periodic σ
    :return: Set of points
    """
    horizon = certified_horizon(fs, sigma) if n is None else n
    validate_horizon(horizon, "n")
    table = sigma_trace_table(fs, sigma, horizon + 1)
    alive = table[:, -1] >= 0
    return frozenset(fs.space.points[i] for i in np.flatnonzero(alive))


def shift_sigma(sigma: SigmaGenerator, n: int) -> SigmaGenerator:
    """σ(+∞, n): the sequence with its first n symbols dropped."""
    return sigma.shifted(n)


def enumerate_prefixes(
    fs: FunctionSystem,
    n: int,
    starts: Optional[Iterable[Point]] = None,
    sigma: Optional[SigmaGenerator] = None,
    require_extendable: bool = False,
    dedupe: bool = True,
    max_rows: Optional[int] = None,
) -> PrefixTable:
    """
    Enumerate admissible length-n orbit prefixes.

    Without σ every map is tried at every step. With σ only its symbols are
    used, and ``require_extendable`` keeps starts in Σ_σ. Without σ it keeps
    prefixes ending in the infinite core. With ``dedupe`` prefixes with equal
    traces collapse to the one with the least symbol word.

    :param fs: Function system
    :param n: Horizon (number of visited points)
    :param starts: Start points; defaults to all points
    :param sigma: Optional fixed symbol sequence
    :param require_extendable: Keep only prefixes of infinite admissible orbits
    :param dedupe: Collapse equal traces
    :param max_rows: Abort with DomainError when the table grows past this
    :return: PrefixTable
    """
    validate_horizon(n, "n")
    model = fs.space
    if starts is None:
        start_positions = np.arange(model.size, dtype=np.int64)
    else:
        start_list = list(starts)
        validate_subset(start_list, model.points, "starts")
        start_positions = model.positions(start_list)

    if sigma is not None and require_extendable:
        keep = sigma_sigma(fs, sigma)
        start_positions = np.array(
            [p for p in start_positions if model.points[p] in keep], dtype=np.int64
        )

    traces = start_positions.reshape(-1, 1)
    symbols = np.zeros((len(start_positions), 0), dtype=np.int64)
    table = fs.step_table

    for step in range(1, n):
        last = traces[:, -1]
        if sigma is not None:
            k = fs.map_position(sigma.symbol(step))
            nxt = table[k, last]
            ok = nxt >= 0
            traces = np.hstack([traces[ok], nxt[ok].reshape(-1, 1)])
            symbols = np.hstack(
                [symbols[ok], np.full((int(ok.sum()), 1), k, dtype=np.int64)]
            )
        else:
            trace_parts: List[np.ndarray] = []
            symbol_parts: List[np.ndarray] = []
            for k in range(len(fs.maps)):
                nxt = table[k, last]
                ok = nxt >= 0
                if not ok.any():
                    continue
                trace_parts.append(np.hstack([traces[ok], nxt[ok].reshape(-1, 1)]))
                symbol_parts.append(
                    np.hstack(
                        [symbols[ok], np.full((int(ok.sum()), 1), k, dtype=np.int64)]
                    )
                )
            if trace_parts:
                traces = np.vstack(trace_parts)
                symbols = np.vstack(symbol_parts)
            else:
                traces = np.zeros((0, step + 1), dtype=np.int64)
                symbols = np.zeros((0, step), dtype=np.int64)
            if dedupe and len(traces):
                traces, symbols = _dedupe(traces, symbols)
        if max_rows is not None and len(traces) > max_rows:
            raise DomainError(
                f"Prefix table exceeds the budget of {max_rows} rows at step {step}"
            )

    if sigma is None and require_extendable and len(traces):
        keep_rows = fs.graph.core_mask[traces[:, -1]]
        traces, symbols = traces[keep_rows], symbols[keep_rows]

    if sigma is not None:
        if dedupe and len(traces):
            traces, symbols = _dedupe(traces, symbols)
        if require_extendable:
            extendable = np.ones(len(traces), dtype=bool)
        else:
            carrier = model.positions(sigma_sigma(fs, sigma))
            extendable = np.isin(traces[:, 0], carrier)
    else:
        extendable = (
            fs.graph.core_mask[traces[:, -1]]
            if len(traces)
            else np.zeros(0, dtype=bool)
        )

    logger.debug("Enumerated %d prefixes of length %d", len(traces), n)
    return PrefixTable(
        traces=traces,
        symbols=symbols,
        points=model.points,
        map_ids=fs.map_ids,
        extendable=extendable,
    )


def _dedupe(traces: np.ndarray, symbols: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # Rows are visited in increasing symbol-word order per trace, so the
    # retained symbols are the least word for that trace.
    order = np.lexsort(symbols.T[::-1]) if symbols.shape[1] else np.arange(len(traces))
    traces, symbols = traces[order], symbols[order]
    _, first = np.unique(traces, axis=0, return_index=True)
    first = np.sort(first)
    kept_traces, kept_symbols = traces[first], symbols[first]
    order = np.lexsort(kept_traces.T[::-1])
    return kept_traces[order], kept_symbols[order]


def sigma_x_prefixes(
    fs: FunctionSystem, x: Point, n: int, require_extendable: bool = False
) -> List[OrbitPrefix]:
    """
    All admissible length-n prefixes from x, one per symbol word.

    With ``require_extendable`` only prefixes ending in the infinite core are
    kept; these are exactly the restrictions of sequences in Σ_x.
    """
    table = enumerate_prefixes(
        fs, n, starts=[x], require_extendable=require_extendable, dedupe=False
    )
    return table.prefixes()


def joint_distance(
    fs: FunctionSystem,
    first: Tuple[Point, SymbolSource],
    second: Tuple[Point, SymbolSource],
    n: int,
) -> Number:
    """
    max over i in 0..n-1 of d(v^{σ(i)}x, v^{φ(i)}y).

    :param first: (x, σ) as a point with a generator or a symbol word
    :param second: (y, φ)
    :param n: Horizon
    :raises DomainError: If either orbit is undefined before step n-1
    """
    trace_x = orbit_trace(fs, first[0], first[1], n)
    trace_y = orbit_trace(fs, second[0], second[1], n)
    if trace_x is None or trace_y is None:
        raise DomainError(f"Orbit undefined before step {n - 1}")
    model = fs.space
    return max(model.dist(a, b) for a, b in zip(trace_x, trace_y))


def bowen_ball(
    fs: FunctionSystem, sigma: SigmaGenerator, x: Point, n: int, radius: Number
) -> FrozenSet[Point]:
    """
    Dynamical ball {y ∈ Σ_σ : d^σ_n(x, y) < radius}.

    :raises DomainError: If x is not in Σ_σ
    """
    validate_horizon(n, "n")
    model = fs.space
    carrier = sigma_sigma(fs, sigma)
    if x not in carrier:
        raise DomainError(f"Point '{x}' is not in Σ_σ for {sigma.describe()}")
    starts = model.positions(carrier)
    table = sigma_trace_table(fs, sigma, n, starts)
    own = sigma_trace_table(fs, sigma, n, np.array([model.position(x)]))[0]
    joint = np.max(model.array[own[None, :], table], axis=1)
    mask = model.below(joint, radius)
    return frozenset(model.points[p] for p in starts[mask])


def extend_prefix(
    fs: FunctionSystem, point: Point, steps: int
) -> Tuple[Tuple[str, ...], Tuple[Point, ...]]:
    """
    Least continuation of ``steps`` steps from a core point inside the core.

    At each step the first map (in system order) whose image stays in the
    infinite core is used.

    :return: (symbols, trace) with len(trace) == steps + 1
    :raises DomainError: If the point is outside the infinite core
    """
    validate_horizon(steps, "steps", minimum=0)
    model = fs.space
    core = fs.graph.core_mask
    position = model.position(point)
    if not core[position]:
        raise DomainError(f"Point '{point}' has no infinite admissible orbit")
    symbols: List[str] = []
    trace = [position]
    for _ in range(steps):
        k, position = _least_core_step(fs, position)
        symbols.append(fs.maps[k].id)
        trace.append(position)
    return tuple(symbols), tuple(model.points[p] for p in trace)


def _least_core_step(fs: FunctionSystem, position: int) -> Tuple[int, int]:
    core = fs.graph.core_mask
    for k in range(len(fs.maps)):
        image = int(fs.step_table[k, position])
        if image >= 0 and core[image]:
            return k, image
    raise DomainError(f"No core successor for '{fs.space.points[position]}'")


def complete_sigma(
    fs: FunctionSystem, start: Point, symbols: Sequence[str]
) -> SigmaGenerator:
    """
    Turn an admissible prefix ending in the core into an eventually periodic σ.

    The continuation follows the least core step from the endpoint until a
    point repeats; the repeated stretch becomes the period.
    """
    trace = orbit_trace(fs, start, list(symbols), len(symbols) + 1)
    if trace is None:
        raise DomainError("Prefix is not admissible")
    position = fs.space.position(trace[-1])
    if not fs.graph.core_mask[position]:
        raise DomainError(f"Prefix endpoint '{trace[-1]}' has no infinite orbit")
    seen = {position: 0}
    tail: List[str] = []
    while True:
        k, position = _least_core_step(fs, position)
        tail.append(fs.maps[k].id)
        if position in seen:
            cut = seen[position]
            return SigmaGenerator(
                pre=tuple(symbols) + tuple(tail[:cut]), period=tuple(tail[cut:])
            )
        seen[position] = len(tail)
