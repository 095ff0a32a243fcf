"""
app_ifs.cover_dimension

Finite covers: order, join, pullbacks along symbol sequences, refinement
search for 𝒟, compatibility of maps with covers and the mean dimension
estimate.

On a finite model every cover is refined by singletons, so 𝒟 is computed over
a RefinementPool whose candidates have diameter at least a floor. All 𝒟 and
mean dimension values carry that pool-restricted meaning.
"""

from __future__ import annotations

import logging
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config import BudgetConfig, get_config
from .metric_core import ball, diameter, set_distance
from .models.cover import (
    CompatibilityResult,
    Cover,
    FSigmaResult,
    MdimReport,
    PowerScalingRow,
    RefinementPool,
    RefinementResult,
    SubadditivityResult,
)
from .models.metric import MetricSpaceModel, Point
from .models.orbit import SigmaGenerator
from .models.system import FunctionSystem
from .orbit_engine import evaluate, sigma_sigma, sigma_trace_table
from .utils.numeric import Number, as_number, fit_rate, less_than
from .utils.validation import (
    DomainError,
    RefinementInfeasibleError,
    validate_horizon,
    validate_mode,
)

logger = logging.getLogger(__name__)


def order(alpha: Cover) -> int:
    """
    ord(α) = max over carrier points of (number of elements containing it) − 1.

    :raises DomainError: If a carrier point is uncovered
    """
    missing = alpha.uncovered()
    if missing:
        raise DomainError(f"Cover misses carrier points: {', '.join(sorted(missing))}")
    if not alpha.carrier:
        return -1
    return max(sum(1 for e in alpha.elements if x in e.members) for x in alpha.carrier) - 1


def join(alpha: Cover, beta: Cover) -> Cover:
    """α ∨ β: nonempty pairwise intersections, labels joined with '|'."""
    if alpha.carrier != beta.carrier:
        raise DomainError("join needs covers over the same carrier")
    return Cover.build(
        (
            (f"{a.label}|{b.label}", a.members & b.members)
            for a in alpha.elements
            for b in beta.elements
        ),
        alpha.carrier,
    )


def refines(beta: Cover, alpha: Cover) -> bool:
    """True iff every element of β sits inside some element of α."""
    return all(
        any(b.members <= a.members for a in alpha.elements) for b in beta.elements
    )


def _orbit_positions(
    fs: FunctionSystem, sigma: SigmaGenerator, steps: int, carrier: Iterable[Point]
) -> Tuple[List[Point], np.ndarray]:
    model = fs.space
    points = sorted(carrier, key=model.position)
    starts = np.array([model.position(x) for x in points], dtype=np.int64)
    table = sigma_trace_table(fs, sigma, steps + 1, starts)
    return points, table


def pullback(fs: FunctionSystem, sigma: SigmaGenerator, n: int, alpha: Cover) -> Cover:
    """
    v^{−σ(n)}α: preimages of α's elements under v^{σ(n)}.

    The carrier shrinks to the points of α's carrier whose n-th image is
    defined and lies in α's carrier. n = 0 returns α.
    """
    validate_horizon(n, "n", minimum=0)
    if n == 0:
        return alpha
    model = fs.space
    points, table = _orbit_positions(fs, sigma, n, alpha.carrier)
    image: Dict[Point, Point] = {}
    for x, row in zip(points, table):
        if row[n] >= 0 and model.points[row[n]] in alpha.carrier:
            image[x] = model.points[row[n]]
    if not image:
        logger.warning("Pullback by %s at n=%d has an empty carrier", sigma.describe(), n)
    return Cover.build(
        (
            (e.label, (x for x, y in image.items() if y in e.members))
            for e in alpha.elements
        ),
        image.keys(),
    )


def orbit_join(
    fs: FunctionSystem,
    sigma: SigmaGenerator,
    alpha: Cover,
    a: int,
    b: int,
    carrier: Optional[Iterable[Point]] = None,
) -> Cover:
    """
    α_a^b(σ) = v^{−σ(a)}α ∨ … ∨ v^{−σ(b)}α built pointwise.

    Each carrier point lands in the element labeled by every tuple of α-labels
    its orbit visits at steps a..b. The carrier defaults to Σ_σ and is cut to
    points whose steps a..b stay in α's carrier.
    """
    validate_horizon(a, "a", minimum=0)
    validate_horizon(b, "b", minimum=a)
    model = fs.space
    base = set(sigma_sigma(fs, sigma) if carrier is None else carrier)
    points, table = _orbit_positions(fs, sigma, b, base)

    membership: Dict[Point, List[int]] = {}
    for j, element in enumerate(alpha.elements):
        for x in element.members:
            membership.setdefault(x, []).append(j)

    groups: Dict[Tuple[int, ...], set] = {}
    kept: List[Point] = []
    for x, row in zip(points, table):
        steps = row[a : b + 1]
        if (steps < 0).any():
            continue
        visited = [model.points[p] for p in steps]
        if any(y not in alpha.carrier for y in visited):
            continue
        kept.append(x)
        labels: List[Tuple[int, ...]] = [()]
        for y in visited:
            labels = [t + (j,) for t in labels for j in membership.get(y, [])]
        for t in labels:
            groups.setdefault(t, set()).add(x)

    names = [e.label for e in alpha.elements]
    return Cover.build(
        (("|".join(names[j] for j in t), members) for t, members in sorted(groups.items())),
        kept,
    )


# ---------------------------------------------------------------------------
# Pools and refinements
# ---------------------------------------------------------------------------


def ball_cover(
    model: MetricSpaceModel, radius, carrier: Optional[Iterable[Point]] = None
) -> Cover:
    """Open balls of a common radius centred at every carrier point."""
    base = list(model.points if carrier is None else carrier)
    r = as_number(radius)
    return Cover.build(((f"B({x})", ball(model, x, r)) for x in base), base)


def make_pool(
    model: MetricSpaceModel, candidates: Iterable[Iterable[Point]], floor
) -> RefinementPool:
    """Keep the distinct candidates whose diameter is at least ``floor``."""
    cut = as_number(floor)
    kept: Dict[FrozenSet[Point], None] = {}
    for candidate in candidates:
        members = frozenset(candidate)
        if members and members not in kept and diameter(model, members) >= cut:
            kept[members] = None
    return RefinementPool(candidates=tuple(kept), floor=cut, model=model)


def default_pool(model: MetricSpaceModel, alpha: Cover, floor) -> RefinementPool:
    """
    Metric balls of every radius, α's elements and their pairwise
    intersections, filtered by the diameter floor.
    """
    radii = sorted({v for row in model.matrix for v in row if v > 0})
    if radii:
        radii.append(radii[-1] * 2)
    candidates: List[FrozenSet[Point]] = []
    for x in model.points:
        candidates.append(frozenset([x]))
        candidates.extend(ball(model, x, r) for r in radii)
    sets = [e.members for e in alpha.elements]
    candidates.extend(sets)
    candidates.extend(s & t for i, s in enumerate(sets) for t in sets[i + 1 :])
    return make_pool(model, candidates, floor)


def _usable(alpha: Cover, pool: RefinementPool) -> List[FrozenSet[Point]]:
    found: Dict[FrozenSet[Point], None] = {}
    for candidate in pool.candidates:
        cut = candidate & alpha.carrier
        if not cut or cut in found:
            continue
        if pool.model is not None and less_than(diameter(pool.model, cut), pool.floor):
            continue
        if any(cut <= e.members for e in alpha.elements):
            found[cut] = None
    return list(found)


class _SearchExceeded(Exception):
    pass


def _cover_with_cap(
    masks: List[int], options: List[List[int]], size: int, cap: int, limit: List[int]
) -> Optional[List[int]]:
    full = (1 << size) - 1
    counts = [0] * size
    chosen: List[int] = []

    def recurse(covered: int, saturated: int) -> bool:
        limit[0] -= 1
        if limit[0] < 0:
            raise _SearchExceeded
        if covered == full:
            return True
        best_point, best_fits = -1, None
        uncovered = full & ~covered
        while uncovered:
            low = uncovered & -uncovered
            p = low.bit_length() - 1
            uncovered ^= low
            fits = [c for c in options[p] if not masks[c] & saturated]
            if best_fits is None or len(fits) < len(best_fits):
                best_point, best_fits = p, fits
                if not fits:
                    return False
        best_fits.sort(key=lambda c: (-(masks[c] & ~covered).bit_count(), c))
        for c in best_fits:
            chosen.append(c)
            added = 0
            mask = masks[c]
            while mask:
                low = mask & -mask
                p = low.bit_length() - 1
                mask ^= low
                counts[p] += 1
                if counts[p] == cap:
                    added |= low
            if recurse(covered | masks[c], saturated | added):
                return True
            mask = masks[c]
            while mask:
                low = mask & -mask
                counts[low.bit_length() - 1] -= 1
                mask ^= low
            chosen.pop()
        return False

    return list(chosen) if recurse(0, 0) else None


def _greedy_refinement(masks: List[int], options: List[List[int]], size: int) -> List[int]:
    full = (1 << size) - 1
    counts = [0] * size
    covered = 0
    chosen: List[int] = []
    while covered != full:
        uncovered = [p for p in range(size) if not covered >> p & 1]
        target = min(uncovered, key=lambda p: (len(options[p]), p))

        def cost(c: int) -> Tuple[int, int, int]:
            members = [p for p in range(size) if masks[c] >> p & 1]
            return (max(counts[p] + 1 for p in members), -(masks[c] & ~covered).bit_count(), c)

        c = min(options[target], key=cost)
        chosen.append(c)
        covered |= masks[c]
        for p in range(size):
            if masks[c] >> p & 1:
                counts[p] += 1
    return chosen


def D_of(
    alpha: Cover,
    pool: RefinementPool,
    mode: str = "auto",
    budget: Optional[BudgetConfig] = None,
) -> RefinementResult:
    """
    Pool-restricted 𝒟(α): least order of a cover of the carrier assembled from
    pool candidates (cut to the carrier, and still at the pool's diameter floor)
    that refines α.

    :param alpha: Cover to refine
    :param pool: Candidate sets
    :param mode: ``exact``, ``greedy`` or ``auto``
    :param budget: Search budgets; defaults to the global configuration
    :raises RefinementInfeasibleError: If the usable candidates miss a carrier point
    """
    validate_mode(mode)
    budgets = budget if budget is not None else get_config().budgets
    points = sorted(alpha.carrier)
    if not points:
        return RefinementResult(value=-1, exact=True, witness=())
    index = {x: i for i, x in enumerate(points)}
    usable = _usable(alpha, pool)
    masks = [sum(1 << index[x] for x in c) for c in usable]
    options: List[List[int]] = [[] for _ in points]
    for c, mask in enumerate(masks):
        for x in usable[c]:
            options[index[x]].append(c)
    missing = [points[p] for p, opts in enumerate(options) if not opts]
    if missing:
        raise RefinementInfeasibleError(
            f"No pool candidate refining the cover contains: {', '.join(missing)}"
        )

    greedy = _greedy_refinement(masks, options, len(points))
    greedy_value = _order_of(masks, greedy, len(points))
    if mode == "greedy":
        return RefinementResult(
            value=greedy_value, exact=False, witness=tuple(usable[c] for c in greedy)
        )

    limit = [budgets.cover_steps]
    try:
        for target in range(0, greedy_value):
            found = _cover_with_cap(masks, options, len(points), target + 1, limit)
            if found is not None:
                return RefinementResult(
                    value=_order_of(masks, found, len(points)),
                    exact=True,
                    witness=tuple(usable[c] for c in found),
                )
    except _SearchExceeded:
        logger.warning(
            "Refinement search over %d candidates exceeded the budget; "
            "reporting the greedy upper bound",
            len(usable),
        )
        return RefinementResult(
            value=greedy_value,
            exact=False,
            witness=tuple(usable[c] for c in greedy),
            downgraded=True,
        )
    return RefinementResult(
        value=greedy_value, exact=True, witness=tuple(usable[c] for c in greedy)
    )


def _order_of(masks: List[int], chosen: List[int], size: int) -> int:
    return max(sum(masks[c] >> p & 1 for c in chosen) for p in range(size)) - 1


def subadditivity_check(
    alpha: Cover,
    beta: Cover,
    pool: RefinementPool,
    form: str = "additive",
    mode: str = "exact",
    budget: Optional[BudgetConfig] = None,
) -> SubadditivityResult:
    """
    Compare 𝒟(α ∨ β) with 𝒟(α) + 𝒟(β) (``additive``) or max(𝒟(α), 𝒟(β)) (``max``).

    The ``max`` reading is reported with ``resolved`` False.
    """
    if form not in ("additive", "max"):
        raise DomainError(f"Unknown subadditivity form '{form}'")
    joined = D_of(join(alpha, beta), pool, mode, budget).value
    first = D_of(alpha, pool, mode, budget).value
    second = D_of(beta, pool, mode, budget).value
    bound = first + second if form == "additive" else max(first, second)
    return SubadditivityResult(
        form=form,
        joined=joined,
        first=first,
        second=second,
        holds=joined <= bound,
        resolved=form == "additive",
    )


# ---------------------------------------------------------------------------
# Mean dimension
# ---------------------------------------------------------------------------


def _growth_slope(horizons: List[int], values: List[int]) -> float:
    if len(horizons) < 2:
        return 0.0
    return fit_rate(horizons, [float(v) for v in values]).slope


def mdim_estimate(
    fs: FunctionSystem,
    sigma: SigmaGenerator,
    ladder: Sequence[Cover],
    n_grid: Sequence[int],
    floors: Sequence = (0,),
    mode: str = "auto",
    budget: Optional[BudgetConfig] = None,
) -> MdimReport:
    """
    Tabulate 𝒟(α_0^{n−1}(σ)) over a cover ladder and horizon grid.

    Each cover's growth is the least-squares slope of 𝒟 against n; the estimate
    is the largest slope (clipped at 0). Pools default to ``default_pool`` of
    the joined cover at the ladder's floor.

    :param floors: One floor per ladder entry, or a single floor for all
    """
    horizons = sorted(set(n_grid))
    for n in horizons:
        validate_horizon(n, "n")
    if len(floors) not in (1, len(ladder)):
        raise DomainError("Give one floor, or one per ladder cover")
    values: Dict[Tuple[int, int], Optional[int]] = {}
    slopes: Dict[int, float] = {}
    infeasible: List[Tuple[int, int]] = []
    exact = True
    for k, alpha in enumerate(ladder):
        floor = floors[0] if len(floors) == 1 else floors[k]
        feasible_n: List[int] = []
        feasible_d: List[int] = []
        for n in horizons:
            joined = orbit_join(fs, sigma, alpha, 0, n - 1)
            try:
                result = D_of(joined, default_pool(fs.space, joined, floor), mode, budget)
            except RefinementInfeasibleError:
                values[(k, n)] = None
                infeasible.append((k, n))
                continue
            values[(k, n)] = result.value
            exact = exact and result.exact
            feasible_n.append(n)
            feasible_d.append(result.value)
        slopes[k] = _growth_slope(feasible_n, feasible_d)
    if infeasible:
        logger.warning("Pool refinement infeasible at %d (cover, n) entries", len(infeasible))
    estimate = max([0.0] + [max(s, 0.0) for s in slopes.values()])
    return MdimReport(
        values=values, slopes=slopes, estimate=estimate, exact=exact, infeasible=infeasible
    )


def power_join_identity(
    fs: FunctionSystem, v: str, v_power: str, n: int, k: int, alpha: Cover
) -> Tuple[bool, Cover, Cover]:
    """
    Compare α_0^{kn−1}(σ_v) with ∨_{j<k} v^{−jn} α_0^{n−1}(σ_v) as set families.

    ``v_power`` must be a map of the system equal to v^n on the carrier.

    :return: (equal, left-hand cover, right-hand cover)
    :raises DomainError: If ``v_power`` is not v^n
    """
    validate_horizon(n, "n")
    validate_horizon(k, "k")
    base = SigmaGenerator.const(v)
    power = SigmaGenerator.const(v_power)
    carrier = sigma_sigma(fs, base) & sigma_sigma(fs, power) & alpha.carrier
    for x in carrier:
        if evaluate(fs, x, base, n) != fs.get_map(v_power)(x):
            raise DomainError(f"Map '{v_power}' differs from {v}^{n} at '{x}'")
    left = orbit_join(fs, base, alpha, 0, k * n - 1, carrier=carrier)
    block = orbit_join(fs, base, alpha, 0, n - 1, carrier=carrier)
    right = orbit_join(fs, power, block, 0, k - 1, carrier=carrier)
    return left.sets == right.sets, left, right


def power_scaling(
    fs: FunctionSystem,
    powers: Mapping[int, str],
    alpha: Cover,
    n_grid: Sequence[int],
    floor=0,
    mode: str = "auto",
    budget: Optional[BudgetConfig] = None,
) -> List[PowerScalingRow]:
    """
    𝒟-growth along σ_{v^j} for each power j, next to j times the growth for v.

    ``powers`` maps j to the map id of v^j and must contain j = 1.
    Infeasible pool refinements leave the slope unset.
    """
    if 1 not in powers:
        raise DomainError("powers must include the base map under key 1")
    slopes: Dict[int, Optional[float]] = {}
    for j, map_id in sorted(powers.items()):
        report = mdim_estimate(
            fs, SigmaGenerator.const(map_id), [alpha], n_grid, (floor,), mode, budget
        )
        slopes[j] = None if report.infeasible else report.slopes[0]
    base = slopes[1]
    return [
        PowerScalingRow(
            power=j,
            map_id=powers[j],
            slope=slopes[j],
            scaled_base=None if base is None else j * base,
        )
        for j in sorted(powers)
    ]


# ---------------------------------------------------------------------------
# Compatible maps
# ---------------------------------------------------------------------------


def compatible(f: Mapping[Point, object], alpha: Cover) -> CompatibilityResult:
    """
    Sufficient α-compatibility test: every fiber of f lies in one α element.

    :raises DomainError: If f is not defined on every carrier point
    """
    missing = sorted(x for x in alpha.carrier if x not in f)
    if missing:
        raise DomainError(f"Map undefined on carrier points: {', '.join(missing)}")
    fibers: Dict[object, set] = {}
    for x in sorted(alpha.carrier):
        fibers.setdefault(f[x], set()).add(x)
    for label, fiber in fibers.items():
        if not any(fiber <= e.members for e in alpha.elements):
            return CompatibilityResult(
                compatible=False, violating_fiber=frozenset(fiber), label=label
            )
    return CompatibilityResult(compatible=True)


def pair_cover(
    model: MetricSpaceModel, pairs: Sequence[Tuple[Iterable[Point], Iterable[Point]]]
) -> Cover:
    """∨_i {U_i, V_i} over the whole space."""
    cover = Cover.build([("X", model.points)], model.points)
    for i, (u, v) in enumerate(pairs):
        cover = join(
            cover, Cover.build([(f"U{i}", u), (f"V{i}", v)], model.points)
        )
    return cover


def f_sigma_map(
    fs: FunctionSystem,
    sigma: SigmaGenerator,
    N: int,
    pairs: Sequence[Tuple[Iterable[Point], Iterable[Point]]],
) -> FSigmaResult:
    """
    F_σ(N, x) = (w_i(v^{σ(j)}x))_{j<N, i} on Σ_σ, with
    w_i(x) = d(x, X∖V_i) / (d(x, X∖V_i) + d(x, X∖U_i)).

    Checks 0 ≤ w_i ≤ 1, U_i = {w_i < 1}, V_i = {w_i > 0} and compatibility
    of F_σ(N, ·) with α_0^{N−1}(σ) for α = ∨{U_i, V_i}. A pair equal to the
    whole space, or not covering it, is reported as a cover defect.
    """
    validate_horizon(N, "N")
    model = fs.space
    everything = frozenset(model.points)
    sets = [(frozenset(u), frozenset(v)) for u, v in pairs]
    defects: List[str] = []
    for i, (u, v) in enumerate(sets):
        if u == everything or v == everything:
            defects.append(f"pair {i}: U or V is the whole space")
        elif u | v != everything:
            defects.append(f"pair {i}: U and V do not cover the space")
    if defects:
        return FSigmaResult(
            values={}, compatibility=None, range_ok=False,
            u_matches=False, v_matches=False, lipschitz=(), defects=defects,
        )

    weights: List[Dict[Point, Number]] = []
    for u, v in sets:
        outside_v, outside_u = everything - v, everything - u
        w: Dict[Point, Number] = {}
        for x in model.points:
            a = set_distance(model, x, outside_v)
            b = set_distance(model, x, outside_u)
            w[x] = a / (a + b)
        weights.append(w)

    range_ok = all(0 <= w[x] <= 1 for w in weights for x in model.points)
    u_matches = all(
        frozenset(x for x in model.points if w[x] < 1) == u for w, (u, _) in zip(weights, sets)
    )
    v_matches = all(
        frozenset(x for x in model.points if w[x] > 0) == v for w, (_, v) in zip(weights, sets)
    )
    lipschitz = tuple(_lipschitz(model, w) for w in weights)

    carrier = sigma_sigma(fs, sigma)
    points, table = _orbit_positions(fs, sigma, N - 1, carrier)
    values: Dict[Point, Tuple] = {}
    for x, row in zip(points, table):
        values[x] = tuple(
            w[model.points[row[j]]] for j in range(N) for w in weights
        )
    joined = orbit_join(fs, sigma, pair_cover(model, sets), 0, N - 1, carrier=carrier)
    verdict = compatible(values, joined) if values else CompatibilityResult(True)
    return FSigmaResult(
        values=values,
        compatibility=verdict,
        range_ok=range_ok,
        u_matches=u_matches,
        v_matches=v_matches,
        lipschitz=lipschitz,
    )


def _lipschitz(model: MetricSpaceModel, w: Mapping[Point, Number]) -> float:
    worst = 0.0
    for i, x in enumerate(model.points):
        for y in model.points[i + 1 :]:
            ratio = abs(float(w[x]) - float(w[y])) / float(model.dist(x, y))
            worst = max(worst, ratio)
    return worst
