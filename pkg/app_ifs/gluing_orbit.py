"""
app_ifs.gluing_orbit

Orbit sequences and ε-tracing, the gluing orbit property, return sets and
almost periodicity, rigidity and continuity moduli, recurrence and
transitivity scans, and the positive-entropy construction from gluing.

Universal quantifiers over symbol sequences are evaluated on the
admissibility graph restricted to the infinite core, never by sampling.
"""

from __future__ import annotations

import itertools
import logging
import math
import random
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import BudgetConfig, get_config
from .models.gluing import (
    ApEntry,
    CrossCheckReport,
    Gap,
    GopEntry,
    NonRecurrenceCertificate,
    OrbitSequence,
    RecurrenceEntry,
    RigidityReport,
    Segment,
    Tec1Report,
    Theorem3Certificate,
    Tracer,
    TraceResult,
    TraceSearch,
    TransitiveScan,
    UniformApReport,
)
from .models.metric import MetricSpaceModel, Point
from .models.orbit import OrbitPrefix, SigmaGenerator
from .models.system import FunctionSystem
from .orbit_engine import (
    complete_sigma,
    extend_prefix,
    orbit_trace,
    sigma_sigma,
    sigma_trace_table,
)
from .utils.numeric import Number, as_number, at_most, less_than
from .utils.validation import (
    ConfigurationError,
    DomainError,
    validate_horizon,
    validate_offset_convention,
    validate_positive,
)

logger = logging.getLogger(__name__)

UNBOUNDED = math.inf


def _convention(convention: Optional[str]) -> str:
    chosen = convention
    if chosen is None:
        chosen = get_config().estimators.offset_convention
    validate_offset_convention(chosen)
    return chosen


def offsets(
    lengths: Sequence[int], gap: Gap, convention: str = "definition"
) -> Tuple[int, ...]:
    """
    Start times s_j of each segment in the tracing orbit.

    ``definition``: s_1 = 0, s_{j+1} = s_j + m_j + t_j − 1.
    ``proof``: s_1 = 0, s_{j+1} = s_j + m_j + t_j.
    """
    validate_offset_convention(convention)
    if len(gap.times) != len(lengths) - 1:
        raise ConfigurationError(
            f"Gap has {len(gap.times)} times for {len(lengths)} segments"
        )
    extra = 0 if convention == "proof" else -1
    starts = [0]
    for m, t in zip(lengths, gap.times):
        starts.append(starts[-1] + m + t + extra)
    return tuple(starts)


def _segment_positions(fs: FunctionSystem, segment: Segment) -> Tuple[int, ...]:
    trace = orbit_trace(fs, segment.point, segment.sigma, segment.length)
    if trace is None:
        raise DomainError(
            f"Segment from '{segment.point}' along {segment.sigma.describe()} "
            f"is undefined within {segment.length} points"
        )
    return tuple(fs.space.position(y) for y in trace)


def _near(model: MetricSpaceModel, eps: Number) -> np.ndarray:
    return model.below(model.array, eps)


# ---------------------------------------------------------------------------
# Tracing
# ---------------------------------------------------------------------------


def check_trace(
    fs: FunctionSystem,
    sequence: OrbitSequence,
    gap: Gap,
    tracer: Tracer,
    eps,
    convention: Optional[str] = None,
) -> TraceResult:
    """
    Check d(v^{φ(s_j+l)}z, v^{σ_j(l)}x_j) < ε for every segment j and l < m_j.

    The tracer runs along ``tracer.sigma`` when given, otherwise along its
    symbol word. An undefined tracer step gives ok=False with a cause.
    """
    chosen = _convention(convention)
    radius = as_number(eps)
    model = fs.space
    starts = offsets(sequence.lengths, gap, chosen)
    horizon = starts[-1] + sequence.lengths[-1]
    source: Union[SigmaGenerator, Sequence[str]] = (
        tracer.sigma if tracer.sigma is not None else tracer.symbols
    )
    path = orbit_trace(fs, tracer.point, source, horizon)
    if path is None:
        return TraceResult(
            tracer=tracer,
            gap=gap,
            offsets=starts,
            max_deviation=None,
            ok=False,
            eps=radius,
            convention=chosen,
            cause=f"tracer orbit undefined before step {horizon - 1}",
        )

    worst: Optional[Number] = None
    ok = True
    for start, segment in zip(starts, sequence.segments):
        for offset, target in enumerate(_segment_positions(fs, segment)):
            deviation = model.matrix[model.position(path[start + offset])][target]
            if worst is None or deviation > worst:
                worst = deviation
            ok = ok and less_than(deviation, radius)
    return TraceResult(
        tracer=tracer,
        gap=gap,
        offsets=starts,
        max_deviation=worst,
        ok=ok,
        eps=radius,
        convention=chosen,
    )


def _successor_mask(fs: FunctionSystem, mask: np.ndarray) -> np.ndarray:
    """Points with some map step landing in ``mask``."""
    table = fs.step_table
    if not len(fs.maps):
        return np.zeros(fs.space.size, dtype=bool)
    return ((table >= 0) & mask[np.maximum(table, 0)]).any(axis=0)


def _image_mask(fs: FunctionSystem, mask: np.ndarray) -> np.ndarray:
    """Core points reached in one step from ``mask``."""
    core = fs.graph.core_mask
    out = np.zeros(fs.space.size, dtype=bool)
    for row in fs.step_table:
        targets = row[mask & (row >= 0)]
        out[targets] = True
    return out & core


def _least_path(
    fs: FunctionSystem, start: int, levels: Sequence[np.ndarray]
) -> Tuple[Tuple[str, ...], Tuple[int, ...]]:
    """Follow the least map into levels[0], levels[1], … from ``start``."""
    symbols: List[str] = []
    trace = [start]
    position = start
    for mask in levels:
        for k, v in enumerate(fs.maps):
            image = int(fs.step_table[k, position])
            if image >= 0 and mask[image]:
                symbols.append(v.id)
                trace.append(image)
                position = image
                break
        else:
            raise DomainError("No admissible step into the required set")
    return tuple(symbols), tuple(trace)


def find_trace(
    fs: FunctionSystem,
    sequence: OrbitSequence,
    eps,
    M: int,
    budget: Optional[BudgetConfig] = None,
    convention: Optional[str] = None,
) -> TraceSearch:
    """
    Least ε-tracing witness for an orbit sequence with gaps in [1, M].

    Gap vectors are tried in lexicographic order. For each, a backward pass
    marks the positions from which the required balls can be followed to an
    endpoint in the infinite core; the least start point and least map at
    every step give the tracer. Running out of ``budgets.trace_gaps`` returns
    an absent witness flagged incomplete.
    """
    validate_positive(M, "M")
    chosen = _convention(convention)
    budgets = budget if budget is not None else get_config().budgets
    radius = as_number(eps)
    model = fs.space
    targets = [_segment_positions(fs, s) for s in sequence.segments]
    if sequence.truncated:
        logger.debug("Last segment is unbounded; tracing %d points", len(targets[-1]))

    if len(sequence) == 1:
        segment = sequence.segments[0]
        tracer = Tracer(
            point=segment.point,
            symbols=tuple(segment.sigma.symbols(0, segment.length - 1)),
            sigma=segment.sigma,
        )
        result = check_trace(fs, sequence, Gap(()), tracer, radius, chosen)
        return TraceSearch(result=result, gaps_tried=1)

    near = _near(model, radius)
    core = fs.graph.core_mask
    tried = 0
    for times in itertools.product(range(1, M + 1), repeat=len(sequence) - 1):
        tried += 1
        if tried > budgets.trace_gaps:
            logger.warning(
                "Tracer search stopped after %d gap vectors; result incomplete",
                budgets.trace_gaps,
            )
            return TraceSearch(result=None, incomplete=True, gaps_tried=tried - 1)
        gap = Gap(times)
        starts = offsets(sequence.lengths, gap, chosen)
        horizon = starts[-1] + sequence.lengths[-1]
        allowed = np.ones((horizon, model.size), dtype=bool)
        for start, positions in zip(starts, targets):
            for offset, target in enumerate(positions):
                allowed[start + offset] &= near[target]

        feasible = [None] * horizon
        feasible[-1] = allowed[-1] & core
        for i in range(horizon - 2, -1, -1):
            feasible[i] = allowed[i] & _successor_mask(fs, feasible[i + 1])
        candidates = np.flatnonzero(feasible[0])
        if not len(candidates):
            continue

        start = int(candidates[0])
        symbols, _ = _least_path(fs, start, feasible[1:])
        z = model.points[start]
        tracer = Tracer(point=z, symbols=symbols, sigma=complete_sigma(fs, z, symbols))
        result = check_trace(fs, sequence, gap, tracer, radius, chosen)
        if not result.ok:
            logger.error("Tracer for gap %s failed its own check", list(times))
        logger.debug("Traced %d segments with gap %s", len(sequence), list(times))
        return TraceSearch(result=result, gaps_tried=tried)
    return TraceSearch(result=None, gaps_tried=tried)


def sample_orbit_sequences(
    fs: FunctionSystem,
    count: int,
    segments: int = 2,
    max_length: int = 3,
    seed: int = 0,
) -> List[OrbitSequence]:
    """
    Seeded random orbit sequences built from infinite-core orbits.

    :raises ConfigurationError: If the system has no infinite orbit to sample
    """
    validate_positive(count, "count")
    validate_positive(segments, "segments")
    validate_positive(max_length, "max_length")
    model = fs.space
    core = [model.points[i] for i in np.flatnonzero(fs.graph.core_mask)]
    if not core:
        raise ConfigurationError(f"System '{fs.name}' has no infinite orbits to sample")
    rng = random.Random(seed)
    table = fs.step_table
    core_mask = fs.graph.core_mask
    sequences: List[OrbitSequence] = []
    for _ in range(count):
        parts: List[Segment] = []
        for _ in range(segments):
            x = rng.choice(core)
            length = rng.randint(1, max_length)
            position = model.position(x)
            symbols: List[str] = []
            for _ in range(length - 1):
                options = [
                    k
                    for k in range(len(fs.maps))
                    if table[k, position] >= 0 and core_mask[table[k, position]]
                ]
                k = rng.choice(options)
                symbols.append(fs.maps[k].id)
                position = int(table[k, position])
            parts.append(Segment(x, complete_sigma(fs, x, symbols), length))
        sequences.append(OrbitSequence(tuple(parts)))
    return sequences


def _traces_all(
    fs: FunctionSystem,
    sequences: Sequence[OrbitSequence],
    eps,
    M: int,
    budget: Optional[BudgetConfig],
    convention: str,
) -> Tuple[bool, Optional[OrbitSequence], bool]:
    incomplete = False
    for sequence in sequences:
        search = find_trace(fs, sequence, eps, M, budget, convention)
        incomplete = incomplete or search.incomplete
        if not search.found:
            return False, sequence, incomplete
    return True, None, incomplete


def gop_estimate(
    fs: FunctionSystem,
    eps_grid: Sequence,
    sequences: Optional[Sequence[OrbitSequence]] = None,
    max_M: int = 4,
    count: int = 8,
    segments: int = 2,
    max_length: int = 3,
    seed: int = 0,
    budget: Optional[BudgetConfig] = None,
    convention: Optional[str] = None,
) -> List[GopEntry]:
    """
    Least M in [1, max_M] tracing every orbit sequence, per ε.

    Sequences default to ``sample_orbit_sequences``. When even max_M fails the
    entry carries the first failing sequence as certificate.

    :raises ConfigurationError: If there are no sequences to test
    """
    validate_positive(max_M, "max_M")
    chosen = _convention(convention)
    pool = (
        list(sequences)
        if sequences is not None
        else sample_orbit_sequences(fs, count, segments, max_length, seed)
    )
    if not pool:
        raise ConfigurationError("gop_estimate needs at least one orbit sequence")

    entries: List[GopEntry] = []
    for raw in eps_grid:
        eps = as_number(raw)
        ok, failing, incomplete = _traces_all(fs, pool, eps, max_M, budget, chosen)
        if not ok:
            logger.info("GOP fails at eps=%s up to M=%d", eps, max_M)
            entries.append(
                GopEntry(eps=eps, M=None, certificate=failing, incomplete=incomplete)
            )
            continue
        low, high = 1, max_M
        while low < high:
            middle = (low + high) // 2
            if _traces_all(fs, pool, eps, middle, budget, chosen)[0]:
                high = middle
            else:
                low = middle + 1
        entries.append(GopEntry(eps=eps, M=low))
    return entries


# ---------------------------------------------------------------------------
# Rigidity, returns and moduli
# ---------------------------------------------------------------------------


def _carrier_positions(fs: FunctionSystem, sigma: SigmaGenerator) -> np.ndarray:
    carrier = sigma_sigma(fs, sigma)
    return np.array(
        sorted(fs.space.position(x) for x in carrier), dtype=np.int64
    )


def _exact_at(
    model: MetricSpaceModel,
    rows: np.ndarray,
    cols: np.ndarray,
    mask: np.ndarray,
    pick,
) -> Optional[Number]:
    """Exact table value at the masked entry chosen by ``pick`` (argmin/argmax)."""
    if not mask.any():
        return None
    values = model.array[rows, cols]
    fill = np.inf if pick is np.argmin else -np.inf
    index = np.unravel_index(pick(np.where(mask, values, fill)), values.shape)
    return model.matrix[int(rows[index])][int(cols[index])]


def rigidity_deficit(
    fs: FunctionSystem,
    sigma: SigmaGenerator,
    m_values: Iterable[int],
    tolerance=None,
) -> RigidityReport:
    """
    sup over Σ_σ of d(v^{σ(m)}x, x) for each m.

    σ is rigid at tolerance τ (default: the model resolution) when some m
    has deficit below τ.

    :raises DomainError: If Σ_σ is empty
    """
    model = fs.space
    horizons = sorted(set(m_values))
    for m in horizons:
        validate_horizon(m, "m")
    positions = _carrier_positions(fs, sigma)
    if not len(positions):
        raise DomainError(f"Σ_σ is empty for {sigma.describe()}")
    tau = model.resolution if tolerance is None else as_number(tolerance)
    last = horizons[-1] if horizons else 0
    table = sigma_trace_table(fs, sigma, last + 1, positions)
    deficits: Dict[int, Number] = {}
    rigid_at: Optional[int] = None
    for m in horizons:
        start, end = table[:, 0], table[:, m]
        everywhere = np.ones(len(start), dtype=bool)
        deficits[m] = _exact_at(model, start, end, everywhere, np.argmax)
        if rigid_at is None and less_than(deficits[m], tau):
            rigid_at = m
    return RigidityReport(deficits=deficits, tolerance=tau, rigid_at=rigid_at)


def return_set(
    fs: FunctionSystem, x: Point, sigma: SigmaGenerator, eps, horizon: int
) -> Tuple[int, ...]:
    """R(x, σ, ε) ∩ [0, horizon]: the n with d(v^{σ(n)}x, x) < ε."""
    validate_horizon(horizon, "horizon", minimum=0)
    model = fs.space
    trace = orbit_trace(fs, x, sigma, horizon + 1)
    if trace is None:
        raise DomainError(
            f"Orbit of '{x}' along {sigma.describe()} ends before {horizon}"
        )
    row = model.array[model.position(x), [model.position(y) for y in trace]]
    return tuple(int(n) for n in np.flatnonzero(model.below(row, as_number(eps))))


def syndetic_bound(values: Iterable[int], horizon: int) -> Optional[int]:
    """
    Least L such that every window [n, n+L−1] inside [0, horizon] meets the set.

    :return: L, or None when the set has no element in [0, horizon]
    """
    members = sorted({v for v in values if 0 <= v <= horizon})
    if not members:
        return None
    bound = max(members[0] + 1, horizon - members[-1] + 1)
    for a, b in zip(members, members[1:]):
        bound = max(bound, b - a)
    return bound


def is_syndetic(bound: Optional[int], horizon: int) -> bool:
    """A bound counts at finite horizon when two full windows fit in [0, horizon]."""
    return bound is not None and 2 * bound <= horizon + 1


def _core_adjacency(fs: FunctionSystem) -> np.ndarray:
    core = fs.graph.core_mask
    adjacency = np.zeros((fs.space.size, fs.space.size), dtype=bool)
    for row in fs.step_table:
        sources = np.flatnonzero((row >= 0) & core)
        targets = row[sources]
        keep = core[targets]
        adjacency[sources[keep], targets[keep]] = True
    return adjacency


def uniform_ap_check(
    fs: FunctionSystem,
    eps,
    horizon: int,
    sigma_sample: Sequence = (),
) -> UniformApReport:
    """
    R(ε) ∩ [0, horizon]: the n such that every infinite-core orbit of length n
    returns within ε of its start, over all points and all admissible σ.

    ``sigma_sample`` adds per-σ return sets over Σ_σ for reporting only.
    """
    validate_horizon(horizon, "horizon", minimum=0)
    model = fs.space
    radius = as_number(eps)
    far = ~_near(model, radius)
    adjacency = _core_adjacency(fs).astype(np.int64)
    reach = np.diag(fs.graph.core_mask).astype(np.int64)
    returns: List[int] = []
    for n in range(horizon + 1):
        if not ((reach > 0) & far).any():
            returns.append(n)
        reach = ((reach @ adjacency) > 0).astype(np.int64)

    by_sigma: Dict[str, Tuple[int, ...]] = {}
    for raw in sigma_sample:
        sigma = SigmaGenerator.parse(raw)
        positions = _carrier_positions(fs, sigma)
        if not len(positions):
            by_sigma[sigma.describe()] = tuple(range(horizon + 1))
            continue
        table = sigma_trace_table(fs, sigma, horizon + 1, positions)
        close = model.below(model.array[table[:, :1], table], radius)
        hits = np.flatnonzero(close.all(axis=0))
        by_sigma[sigma.describe()] = tuple(int(n) for n in hits)

    bound = syndetic_bound(returns, horizon)
    return UniformApReport(
        returns=tuple(returns),
        horizon=horizon,
        syndetic_bound=bound,
        almost_periodic=is_syndetic(bound, horizon),
        by_sigma=by_sigma,
    )


def _pair_floor(
    model: MetricSpaceModel, positions: np.ndarray, joint: np.ndarray, eps: Number
) -> Number:
    violating = ~model.below(joint, eps)
    np.fill_diagonal(violating, False)
    rows = np.repeat(positions[:, None], len(positions), axis=1)
    cols = np.repeat(positions[None, :], len(positions), axis=0)
    floor = _exact_at(model, rows, cols, violating, np.argmin)
    return UNBOUNDED if floor is None else floor


def equicontinuity_modulus(
    fs: FunctionSystem, sigma: SigmaGenerator, eps, horizon: int
) -> Number:
    """
    Largest δ with d(x, y) < δ ⇒ d(v^{σ(n)}x, v^{σ(n)}y) < ε for all
    n ≤ horizon and x, y ∈ Σ_σ: the least distance of a violating pair, or
    inf when no pair violates.
    """
    validate_horizon(horizon, "horizon", minimum=0)
    model = fs.space
    radius = as_number(eps)
    positions = _carrier_positions(fs, sigma)
    if not len(positions):
        return UNBOUNDED
    table = sigma_trace_table(fs, sigma, horizon + 1, positions)
    joint = np.zeros((len(positions), len(positions)))
    for column in table.T:
        joint = np.maximum(joint, model.array[np.ix_(column, column)])
    return _pair_floor(model, positions, joint, radius)


def uniform_continuity_modulus(
    fs: FunctionSystem, sigma: SigmaGenerator, k: int, eps, horizon: int
) -> Number:
    """
    Largest δ such that for every window start n ≤ horizon, x, y ∈ Σ_{σ(+∞,n)}
    with d(x, y) < δ stay within ε for the next 1..k steps of the shifted σ.

    Shifts repeat once past the preperiod, so only distinct tails are scanned.
    """
    validate_horizon(k, "k")
    validate_horizon(horizon, "horizon", minimum=0)
    model = fs.space
    radius = as_number(eps)
    distinct = min(horizon, len(sigma.pre) + len(sigma.period) - 1)
    best: Number = UNBOUNDED
    for n in range(distinct + 1):
        tail = sigma.shifted(n)
        positions = _carrier_positions(fs, tail)
        if len(positions) < 2:
            continue
        table = sigma_trace_table(fs, tail, k + 1, positions)
        joint = np.zeros((len(positions), len(positions)))
        for column in table.T[1:]:
            joint = np.maximum(joint, model.array[np.ix_(column, column)])
        floor = _pair_floor(model, positions, joint, radius)
        if floor < best:
            best = floor
    return best


# ---------------------------------------------------------------------------
# Recurrence and transitivity
# ---------------------------------------------------------------------------


def _avoid_levels(
    fs: FunctionSystem, avoid: np.ndarray, horizon: int
) -> List[np.ndarray]:
    """levels[L] marks starts of core walks of L points all inside ``avoid``."""
    levels = [np.ones(fs.space.size, dtype=bool), avoid.copy()]
    for _ in range(2, horizon + 1):
        levels.append(avoid & _successor_mask(fs, levels[-1]))
    return levels


def recurrence_scan(fs: FunctionSystem, eps, horizon: int) -> List[RecurrenceEntry]:
    """
    Classify every point as recurrent at scale ε within the horizon.

    x is recurrent when every core branch from x comes back within ε at some
    step 1..horizon; otherwise the least branch that stays away is the
    witness. Points with no infinite orbit are vacuously recurrent.
    """
    validate_horizon(horizon, "horizon")
    model = fs.space
    near = _near(model, as_number(eps))
    core = fs.graph.core_mask
    entries: List[RecurrenceEntry] = []
    for position, x in enumerate(model.points):
        if not core[position]:
            entries.append(RecurrenceEntry(point=x, recurrent=True, vacuous=True))
            continue
        levels = _avoid_levels(fs, core & ~near[position], horizon)
        first = np.zeros(model.size, dtype=bool)
        first[position] = True
        if not (_image_mask(fs, first) & levels[horizon]).any():
            entries.append(RecurrenceEntry(point=x, recurrent=True))
            continue
        symbols, trace = _least_path(
            fs, position, [levels[horizon - i] for i in range(horizon)]
        )
        witness = OrbitPrefix(
            start=x,
            symbols=symbols,
            trace=tuple(model.points[p] for p in trace),
            extendable=True,
        )
        entries.append(RecurrenceEntry(point=x, recurrent=False, witness=witness))
    return entries


def almost_periodic_scan(fs: FunctionSystem, eps, horizon: int) -> List[ApEntry]:
    """
    Worst syndetic bound of R(x, σ, ε) over all admissible σ, per core point.

    The bound along one branch is one more than its longest run of
    non-returns in 1..horizon; the worst branch is found by pairing the
    points reachable at step i with the longest avoiding walk starting there.
    """
    validate_horizon(horizon, "horizon")
    model = fs.space
    near = _near(model, as_number(eps))
    core = fs.graph.core_mask
    entries: List[ApEntry] = []
    for position in np.flatnonzero(core):
        levels = _avoid_levels(fs, core & ~near[position], horizon)
        reached = np.zeros(model.size, dtype=bool)
        reached[position] = True
        longest = 0
        for i in range(1, horizon + 1):
            reached = _image_mask(fs, reached)
            for length in range(horizon - i + 1, longest, -1):
                if (reached & levels[length]).any():
                    longest = length
                    break
        bound = longest + 1
        entries.append(
            ApEntry(
                point=model.points[position],
                bound=bound,
                almost_periodic=is_syndetic(bound, horizon),
            )
        )
    return entries


def transitive_points(
    fs: FunctionSystem, sigma: SigmaGenerator, eps, horizon: int
) -> TransitiveScan:
    """Points of Σ_σ whose orbit at steps 1..horizon is ε-dense in the space."""
    validate_horizon(horizon, "horizon")
    model = fs.space
    radius = as_number(eps)
    near = _near(model, radius)
    positions = _carrier_positions(fs, sigma)
    found = []
    if len(positions):
        table = sigma_trace_table(fs, sigma, horizon + 1, positions)
        for row in table:
            if near[row[1:]].any(axis=0).all():
                found.append(model.points[row[0]])
    return TransitiveScan(points=frozenset(found), eps=radius, horizon=horizon)


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------


def _full_trace(fs: FunctionSystem, tracer: Tracer, length: int) -> Tuple[int, ...]:
    path = orbit_trace(fs, tracer.point, list(tracer.symbols), len(tracer.symbols) + 1)
    if path is None:
        raise DomainError(f"Tracer from '{tracer.point}' is not admissible")
    positions = [fs.space.position(y) for y in path]
    if len(positions) < length:
        _, tail = extend_prefix(fs, path[-1], length - len(positions))
        positions.extend(fs.space.position(y) for y in tail[1:])
    return tuple(positions[:length])


def theorem3_construct(
    fs: FunctionSystem,
    sigma: SigmaGenerator,
    p: Point,
    eps,
    M: int,
    N: int,
    horizon: int,
    budget: Optional[BudgetConfig] = None,
    convention: Optional[str] = None,
    entropy_estimate: Optional[float] = None,
) -> Theorem3Certificate:
    """
    Build 2^N pairwise separated orbits by gluing copies of p's orbit.

    For k = 1..max(2M, horizon) the scan finds the largest separation g_k of
    d(v^{σ(τ)}p, v^{σ(τ+k)}p) over τ = 1..horizon. A shift with g_k = 0
    returns the orbit onto itself, so σ is rigid along p and the construction
    stops there. Otherwise γ sits halfway between 3ε and the least g_k with
    k ≤ 2M, and τ_k is the least τ beating γ. With T = 2M + max τ_k,
    m_1 = T + M and m_2 = T, every word a ∈ {1,2}^N gives the sequence
    (p, σ, m_{a(k)} + 1) for k ≤ N followed by (p, σ, m_2 + 1); its tracer is
    extended in the core to (N+1)(T+2M) points and all tracers are checked
    pairwise (ε)-separated over that horizon.
    """
    validate_positive(M, "M")
    validate_positive(N, "N")
    validate_horizon(horizon, "horizon")
    chosen = _convention(convention)
    radius = as_number(eps)
    model = fs.space
    shifts = max(2 * M, horizon)
    orbit = orbit_trace(fs, p, sigma, horizon + shifts + 1)
    if orbit is None:
        raise DomainError(f"Orbit of '{p}' along {sigma.describe()} ends too early")
    positions = np.array([model.position(y) for y in orbit], dtype=np.int64)

    spread: Dict[int, Number] = {}
    for k in range(1, shifts + 1):
        rows, cols = positions[1 : horizon + 1], positions[1 + k : horizon + 1 + k]
        everywhere = np.ones(len(rows), dtype=bool)
        spread[k] = _exact_at(model, rows, cols, everywhere, np.argmax)
        if spread[k] == 0:
            logger.info("Orbit of '%s' returns isometrically under shift %d", p, k)
            return Theorem3Certificate(
                gamma=None,
                taus={j: None for j in range(1, 2 * M + 1)},
                T=None, m1=None, m2=None, horizon=None,
                convention=chosen,
                aborted="rigid",
                failing_k=k,
            )
    floor = min(spread[k] for k in range(1, 2 * M + 1))
    if not less_than(3 * radius, floor):
        return Theorem3Certificate(
            gamma=floor, taus={}, T=None, m1=None, m2=None, horizon=None,
            convention=chosen, aborted="eps",
        )
    gamma = (floor + 3 * radius) / 2

    taus: Dict[int, Optional[int]] = {}
    for k in range(1, 2 * M + 1):
        taus[k] = next(
            tau
            for tau in range(1, horizon + 1)
            if less_than(gamma, model.matrix[positions[tau]][positions[tau + k]])
        )
    T = 2 * M + max(taus.values())
    m1, m2 = T + M, T
    total = (N + 1) * (T + 2 * M)

    tracers: Dict[Tuple[int, ...], Tuple[Point, ...]] = {}
    rows: List[Tuple[int, ...]] = []
    words = list(itertools.product((1, 2), repeat=N))
    for word in words:
        lengths = [m1 + 1 if a == 1 else m2 + 1 for a in word] + [m2 + 1]
        sequence = OrbitSequence(tuple(Segment(p, sigma, m) for m in lengths))
        search = find_trace(fs, sequence, radius, M, budget, chosen)
        if not search.found:
            return Theorem3Certificate(
                gamma=gamma, taus=taus, T=T, m1=m1, m2=m2, horizon=total,
                convention=chosen, aborted="gluing", failing_sequence=sequence,
            )
        trace = _full_trace(fs, search.result.tracer, total)
        rows.append(trace)
        tracers[word] = tuple(model.points[i] for i in trace)

    table = np.array(rows, dtype=np.int64)
    joint = np.zeros((len(rows), len(rows)))
    for column in table.T:
        joint = np.maximum(joint, model.array[np.ix_(column, column)])
    close = model.below(joint, radius)
    np.fill_diagonal(close, False)
    violating = None
    if close.any():
        i, j = (int(v) for v in np.argwhere(close)[0])
        violating = (words[i], words[j])
        logger.warning("Tracers %s and %s are not separated", words[i], words[j])

    return Theorem3Certificate(
        gamma=gamma,
        taus=taus,
        T=T,
        m1=m1,
        m2=m2,
        horizon=total,
        convention=chosen,
        tracers=tracers,
        separated=violating is None,
        violating_pair=violating,
        bound=math.log(2) / (T + 2 * M),
        entropy_estimate=entropy_estimate,
    )


def nonrecurrence_via_gluing(
    fs: FunctionSystem,
    x: Point,
    sigma: SigmaGenerator,
    y: Point,
    delta,
    eps,
    M: int,
    horizon: int,
    budget: Optional[BudgetConfig] = None,
    convention: Optional[str] = None,
) -> NonRecurrenceCertificate:
    """
    Glue the single point y in front of (x, σ, horizon) and certify that the
    tracer z never comes back: d(v^{φ(n)}z, z) ≥ min(δ − 2ε, λ) for
    1 ≤ n ≤ horizon, where λ is the least return distance during the
    transit before the x segment starts.

    ``premise_ok`` records whether d(y, v^{σ(n)}x) ≥ δ along the x segment.
    """
    validate_horizon(horizon, "horizon")
    chosen = _convention(convention)
    model = fs.space
    d, radius = as_number(delta), as_number(eps)
    sequence = OrbitSequence(
        (
            Segment(y, complete_sigma(fs, y, ()), 1),
            Segment(x, sigma, horizon, unbounded=True),
        )
    )
    targets = _segment_positions(fs, sequence.segments[1])
    premise_ok = all(
        at_most(d, model.matrix[model.position(y)][t]) for t in targets
    )
    search = find_trace(fs, sequence, radius, M, budget, chosen)
    if not search.found:
        return NonRecurrenceCertificate(found=False, premise_ok=premise_ok)

    result = search.result
    transit_end = result.offsets[1]
    trace = _full_trace(fs, result.tracer, len(result.tracer.symbols) + 1)
    start = trace[0]
    transit = [model.matrix[start][trace[s]] for s in range(1, transit_end)]
    lam = min(transit) if transit else None
    bound = d - 2 * radius if lam is None else min(d - 2 * radius, lam)
    last = min(horizon, len(trace) - 1)
    observed = min(model.matrix[start][trace[n]] for n in range(1, last + 1))
    return NonRecurrenceCertificate(
        found=True,
        tracer=result.tracer,
        t0=result.gap.times[0],
        lam=lam,
        bound=bound,
        observed=observed,
        premise_ok=premise_ok,
        holds=at_most(bound, observed),
    )


def tec1_check(
    fs: FunctionSystem,
    sigma: SigmaGenerator,
    p: Point,
    m: int,
    gamma,
    eps,
    horizon: int,
) -> Tec1Report:
    """
    Return-closeness transfer at scale ε.

    Premise: d(v^{σ(n)}p, v^{σ(n+m)}p) ≤ γ for n ≤ horizon and p's orbit is
    ε-dense in Σ_σ. Conclusion checked: d(x, v^{σ(m)}x) ≤ γ + 2ω for every
    x ∈ Σ_σ within ε of the orbit, where ω is the largest of d(u, w) and
    d(v^{σ(m)}u, v^{σ(m)}w) over pairs of Σ_σ closer than ε.
    """
    validate_horizon(m, "m")
    validate_horizon(horizon, "horizon", minimum=0)
    model = fs.space
    g, radius = as_number(gamma), as_number(eps)
    positions = _carrier_positions(fs, sigma)
    if model.position(p) not in set(positions.tolist()):
        raise DomainError(f"'{p}' is not in Σ_σ for {sigma.describe()}")
    orbit = orbit_trace(fs, p, sigma, horizon + m + 1)
    if orbit is None:
        raise DomainError(f"Orbit of '{p}' ends before step {horizon + m}")
    path = np.array([model.position(q) for q in orbit], dtype=np.int64)
    observed = max(model.matrix[path[n]][path[n + m]] for n in range(horizon + 1))

    near = _near(model, radius)
    visited = path[: horizon + 1]
    dense = bool(near[np.ix_(visited, positions)].any(axis=0).all())
    premise_ok = at_most(observed, g) and dense

    table = sigma_trace_table(fs, sigma, m + 1, positions)
    images = table[:, m]
    pairs = near[np.ix_(positions, positions)]
    spread = np.maximum(
        model.array[np.ix_(positions, positions)], model.array[np.ix_(images, images)]
    )
    slack: Number = 0
    if pairs.any():
        best = np.argmax(np.where(pairs, spread, -np.inf))
        i, j = np.unravel_index(best, spread.shape)
        slack = max(
            model.matrix[positions[i]][positions[j]], model.matrix[images[i]][images[j]]
        )
    limit = g + 2 * slack

    reached = near[np.ix_(visited, positions)].any(axis=0)
    violations: List[Point] = []
    checked = 0
    for row, hit in zip(table, reached):
        if not hit:
            continue
        checked += 1
        if not at_most(model.matrix[row[0]][row[m]], limit):
            violations.append(model.points[row[0]])
    return Tec1Report(
        premise_ok=premise_ok,
        observed_gamma=observed,
        slack=slack,
        checked=checked,
        violations=violations,
    )


def equicontinuity_cross_check(
    fs: FunctionSystem, sigma: SigmaGenerator, eps, horizon: int, k: int
) -> CrossCheckReport:
    """
    Uniformly almost periodic systems with a uniformly continuous σ must have
    a positive equicontinuity modulus.
    """
    uniform = uniform_ap_check(fs, eps, horizon)
    continuity = uniform_continuity_modulus(fs, sigma, k, eps, horizon)
    modulus = equicontinuity_modulus(fs, sigma, eps, horizon)
    return CrossCheckReport(
        uniform_ap=uniform.almost_periodic,
        continuity_modulus=continuity,
        equicontinuity_modulus=modulus,
        applicable=uniform.almost_periodic and continuity > 0,
    )
