"""
app_ifs.complexity_estimators

Separated and spanning counts over orbit prefixes, topological entropy and
metric mean dimension estimates.

Counting works on a conflict graph: nodes are extendable orbit prefixes with
distinct traces, and two nodes conflict when their joint distance is < ε.
A separated set is an independent set; a spanning set is a dominating set.
"""

from __future__ import annotations

import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .config import BudgetConfig, EstimatorConfig, get_config
from .models.counts import (
    CountEntry,
    CountGrid,
    CountResult,
    RateReport,
    ScaleRate,
    Theorem1Report,
)
from .models.orbit import PrefixTable, SigmaGenerator
from .models.system import FunctionSystem
from .orbit_engine import enumerate_prefixes, sigma_sigma
from .utils.numeric import Number, as_number, comparison_tolerance, fit_rate, growth_rate
from .utils.validation import (
    ConfigurationError,
    validate_grid,
    validate_horizon,
    validate_mode,
    validate_positive,
    validate_rate_method,
)

logger = logging.getLogger(__name__)

# Largest number of float cells materialised per conflict-matrix chunk.
_CHUNK_CELLS = 4_000_000


class _BudgetExceeded(Exception):
    pass


def _budgets(budget: Optional[BudgetConfig]) -> BudgetConfig:
    return budget if budget is not None else get_config().budgets


def _estimators(estimators: Optional[EstimatorConfig]) -> EstimatorConfig:
    return estimators if estimators is not None else get_config().estimators


# ---------------------------------------------------------------------------
# Conflict graphs
# ---------------------------------------------------------------------------


def conflict_matrices(
    fs: FunctionSystem, table: PrefixTable, radii: Sequence[Number]
) -> Dict[Number, np.ndarray]:
    """
    Boolean conflict matrices (joint distance < ε) for several radii at once.

    :return: Mapping radius -> (rows, rows) boolean matrix with a true diagonal
    """
    model = fs.space
    traces = table.traces
    rows = len(table)
    result = {eps: np.zeros((rows, rows), dtype=bool) for eps in radii}
    if rows == 0:
        return result
    chunk = max(1, _CHUNK_CELLS // max(rows, 1))
    for lo in range(0, rows, chunk):
        hi = min(rows, lo + chunk)
        joint = np.zeros((hi - lo, rows), dtype=float)
        for i in range(table.horizon):
            block = model.array[np.ix_(traces[lo:hi, i], traces[:, i])]
            np.maximum(joint, block, out=joint)
        for eps in radii:
            result[eps][lo:hi] = model.below(joint, eps)
    for matrix in result.values():
        np.fill_diagonal(matrix, True)
    return result


def _clique_partition(conflict: np.ndarray) -> Optional[List[np.ndarray]]:
    """Groups of the partition when conflict is an equivalence relation, else None."""
    unique_rows, inverse = np.unique(conflict, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    groups: List[np.ndarray] = []
    for g in range(len(unique_rows)):
        members = np.flatnonzero(inverse == g)
        if not np.array_equal(np.flatnonzero(unique_rows[g]), members):
            return None
        groups.append(members)
    groups.sort(key=lambda members: int(members[0]))
    return groups


def _components(conflict: np.ndarray) -> List[List[int]]:
    graph = nx.Graph()
    graph.add_nodes_from(range(conflict.shape[0]))
    graph.add_edges_from(map(tuple, np.argwhere(np.triu(conflict, 1))))
    return sorted(
        (sorted(component) for component in nx.connected_components(graph)),
        key=lambda component: component[0],
    )


def _bit_adjacency(conflict: np.ndarray, nodes: List[int]) -> List[int]:
    sub = conflict[np.ix_(nodes, nodes)]
    adjacency = []
    for i in range(len(nodes)):
        bits = 0
        for j in np.flatnonzero(sub[i]):
            if j != i:
                bits |= 1 << int(j)
        adjacency.append(bits)
    return adjacency


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------------------
# Independent sets (separated)
# ---------------------------------------------------------------------------


def greedy_independent(adjacency: List[int]) -> List[int]:
    """Maximal independent set by repeated minimum-degree choice."""
    remaining = (1 << len(adjacency)) - 1
    chosen: List[int] = []
    while remaining:
        v = min(_bits(remaining), key=lambda u: ((adjacency[u] & remaining).bit_count(), u))
        chosen.append(v)
        remaining &= ~(adjacency[v] | (1 << v))
    return chosen


def exact_independent(adjacency: List[int], step_limit: int) -> List[int]:
    """
    Maximum independent set by branch and bound on bitsets.

    :raises _BudgetExceeded: When more than ``step_limit`` nodes are expanded
    """
    best = greedy_independent(adjacency)
    best_mask = sum(1 << v for v in best)
    best_size = len(best)
    steps = 0

    def recurse(candidates: int, chosen: int, size: int) -> None:
        nonlocal best_mask, best_size, steps
        steps += 1
        if steps > step_limit:
            raise _BudgetExceeded
        if not candidates:
            if size > best_size:
                best_size, best_mask = size, chosen
            return
        if size + candidates.bit_count() <= best_size:
            return
        degrees = [((adjacency[v] & candidates).bit_count(), v) for v in _bits(candidates)]
        low_degree, low = min(degrees)
        if low_degree <= 1:
            recurse(candidates & ~(adjacency[low] | (1 << low)), chosen | (1 << low), size + 1)
            return
        _, high = max(degrees)
        recurse(candidates & ~(adjacency[high] | (1 << high)), chosen | (1 << high), size + 1)
        recurse(candidates & ~(1 << high), chosen, size)

    recurse((1 << len(adjacency)) - 1, 0, 0)
    return sorted(_bits(best_mask))


# ---------------------------------------------------------------------------
# Dominating sets (spanning)
# ---------------------------------------------------------------------------


def greedy_dominating(adjacency: List[int]) -> List[int]:
    """Net scan: each still-uncovered node joins and covers its neighbourhood."""
    covered = 0
    chosen: List[int] = []
    for v in range(len(adjacency)):
        if not covered >> v & 1:
            chosen.append(v)
            covered |= adjacency[v] | (1 << v)
    return chosen


def exact_dominating(adjacency: List[int], step_limit: int) -> List[int]:
    """
    Minimum dominating set by branch and bound over closed neighbourhoods.

    :raises _BudgetExceeded: When more than ``step_limit`` nodes are expanded
    """
    size = len(adjacency)
    full = (1 << size) - 1
    closed = [adjacency[v] | (1 << v) for v in range(size)]
    best = greedy_dominating(adjacency)
    steps = 0

    def recurse(covered: int, chosen: List[int]) -> None:
        nonlocal best, steps
        steps += 1
        if steps > step_limit:
            raise _BudgetExceeded
        if covered == full:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        uncovered = full & ~covered
        widest = max((closed[w] & uncovered).bit_count() for w in range(size))
        needed = -(-uncovered.bit_count() // widest)
        if len(chosen) + needed >= len(best):
            return
        target = min(_bits(uncovered), key=lambda u: (closed[u].bit_count(), u))
        options = sorted(
            _bits(closed[target]),
            key=lambda w: (-(closed[w] & uncovered).bit_count(), w),
        )
        for w in options:
            chosen.append(w)
            recurse(covered | closed[w], chosen)
            chosen.pop()

    recurse(0, [])
    return sorted(best)


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------


def _solve(
    conflict: np.ndarray, kind: str, mode: str, budget: BudgetConfig
) -> Tuple[List[int], bool, bool]:
    """Witness rows, exactness and downgrade flag for one conflict matrix."""
    rows = conflict.shape[0]
    if rows == 0:
        return [], True, False
    groups = _clique_partition(conflict)
    if groups is not None:
        return [int(members[0]) for members in groups], True, False

    witness: List[int] = []
    exact = True
    downgraded = False
    for component in _components(conflict):
        if len(component) == 1:
            witness.append(component[0])
            continue
        sub = conflict[np.ix_(component, component)]
        if sub.all():
            witness.append(component[0])
            continue
        adjacency = _bit_adjacency(conflict, component)
        local: Optional[List[int]] = None
        if mode != "greedy" and len(component) <= budget.exact_nodes:
            try:
                local = (
                    exact_independent(adjacency, budget.exact_steps)
                    if kind == "separated"
                    else exact_dominating(adjacency, budget.exact_steps)
                )
            except _BudgetExceeded:
                local = None
        if local is None:
            if mode == "exact":
                downgraded = True
                logger.warning(
                    "Exact %s search over a %d-node component exceeded the budget; "
                    "using the greedy bound",
                    kind,
                    len(component),
                )
            local = (
                greedy_independent(adjacency)
                if kind == "separated"
                else greedy_dominating(adjacency)
            )
            exact = False
        witness.extend(component[i] for i in local)
    return sorted(witness), exact, downgraded


def _count_from_table(
    table: PrefixTable,
    conflict: np.ndarray,
    kind: str,
    mode: str,
    budget: BudgetConfig,
    with_witness: bool,
) -> CountResult:
    rows, exact, downgraded = _solve(conflict, kind, mode, budget)
    witness = tuple(table.prefix(r) for r in rows) if with_witness else ()
    return CountResult(
        count=len(rows),
        exact=exact,
        witness=witness,
        nodes=len(table),
        downgraded=downgraded,
    )


def _count(
    fs: FunctionSystem,
    n: int,
    eps,
    kind: str,
    mode: str,
    sigma: Optional[SigmaGenerator],
    budget: Optional[BudgetConfig],
) -> CountResult:
    validate_horizon(n, "n")
    radius = as_number(eps)
    validate_positive(radius, "eps")
    validate_mode(mode)
    budgets = _budgets(budget)
    table = enumerate_prefixes(
        fs, n, sigma=sigma, require_extendable=True, max_rows=budgets.max_prefixes
    )
    if len(table) == 0:
        return CountResult(count=0, exact=True, empty_carrier=True)
    conflict = conflict_matrices(fs, table, [radius])[radius]
    return _count_from_table(table, conflict, kind, mode, budgets, with_witness=True)


def separated_count(
    fs: FunctionSystem,
    n: int,
    eps,
    mode: str = "auto",
    budget: Optional[BudgetConfig] = None,
) -> CountResult:
    """
    s(n, ε): largest set of extendable orbit prefixes pairwise ≥ ε apart.

    :param fs: Function system
    :param n: Horizon
    :param eps: Radius
    :param mode: ``exact``, ``greedy`` or ``auto``
    :param budget: Search budgets; defaults to the global configuration
    :return: CountResult; a greedy count is a lower bound
    """
    return _count(fs, n, eps, "separated", mode, None, budget)


def spanning_count(
    fs: FunctionSystem,
    n: int,
    eps,
    mode: str = "auto",
    budget: Optional[BudgetConfig] = None,
) -> CountResult:
    """
    r(n, ε): smallest set of extendable prefixes within < ε of every other one.

    A greedy count is an upper bound.
    """
    return _count(fs, n, eps, "spanning", mode, None, budget)


def orbit_separated_count(
    fs: FunctionSystem,
    sigma: SigmaGenerator,
    n: int,
    eps,
    mode: str = "auto",
    budget: Optional[BudgetConfig] = None,
) -> CountResult:
    """
    s(σ, n, ε): separated count along the single sequence σ, starts in Σ_σ.

    An empty Σ_σ yields a zero count with ``empty_carrier`` set.
    """
    result = _count(fs, n, eps, "separated", mode, sigma, budget)
    if result.empty_carrier:
        logger.warning("Σ_σ is empty for %s; separated count is 0", sigma.describe())
    return result


def count_grid(
    fs: FunctionSystem,
    n_grid: Sequence[int],
    eps_grid: Sequence,
    mode: str = "auto",
    sigma: Optional[SigmaGenerator] = None,
    spanning: bool = True,
    budget: Optional[BudgetConfig] = None,
) -> CountGrid:
    """
    Fill a CountGrid with separated (and optionally spanning) counts.

    One prefix table and one chunked distance sweep serve every radius at a
    given horizon.
    """
    validate_mode(mode)
    horizons = sorted(set(n_grid))
    radii = sorted({as_number(e) for e in eps_grid})
    validate_grid(horizons, "n grid")
    validate_grid(radii, "eps grid")
    budgets = _budgets(budget)
    grid = CountGrid(sigma=sigma.describe() if sigma is not None else None)
    for n in horizons:
        validate_horizon(n, "n")
        table = enumerate_prefixes(
            fs, n, sigma=sigma, require_extendable=True, max_rows=budgets.max_prefixes
        )
        if len(table) == 0:
            empty = CountResult(count=0, exact=True, empty_carrier=True)
            for eps in radii:
                grid.entries[(n, eps)] = CountEntry(
                    separated=empty, spanning=empty if spanning else None
                )
            continue
        matrices = conflict_matrices(fs, table, radii)
        for eps in radii:
            sep = _count_from_table(table, matrices[eps], "separated", mode, budgets, False)
            span = (
                _count_from_table(table, matrices[eps], "spanning", mode, budgets, False)
                if spanning
                else None
            )
            grid.entries[(n, eps)] = CountEntry(separated=sep, spanning=span)
            logger.debug(
                "n=%d eps=%s: s=%d%s", n, eps, sep.count, "" if sep.exact else " (bound)"
            )
    return grid


# ---------------------------------------------------------------------------
# Rates
# ---------------------------------------------------------------------------


def _log_count(count: int) -> float:
    return math.log(count) if count > 0 else 0.0


def _scale_rates(grid: CountGrid, fit_tail: int) -> List[ScaleRate]:
    horizons = grid.horizons
    if len(horizons) < 2:
        raise ConfigurationError(
            f"Rate estimates need at least 2 horizons, got {len(horizons)}"
        )
    tail = horizons[-max(fit_tail, 2):]
    rates: List[ScaleRate] = []
    for eps in grid.radii:
        seps = [grid.separated(n, eps) for n in tail]
        logs = [_log_count(r.count) for r in seps]
        spans = [grid.spanning(n, eps) for n in tail]
        spanning_slope = None
        if all(s is not None for s in spans):
            spanning_slope = fit_rate(tail, [_log_count(s.count) for s in spans]).slope
        rates.append(
            ScaleRate(
                eps=eps,
                slope=fit_rate(tail, logs),
                growth=growth_rate(tail, logs),
                spanning_slope=spanning_slope,
                exact=all(r.exact for r in seps),
            )
        )
    return rates


def _rate_value(rate: ScaleRate, method: str) -> float:
    return rate.slope.slope if method == "slope" else rate.growth


def _normalized(rates: List[ScaleRate], method: str) -> Dict[Number, float]:
    values: Dict[Number, float] = {}
    for rate in rates:
        log_eps = abs(math.log(float(rate.eps)))
        if log_eps == 0:
            continue
        values[rate.eps] = _rate_value(rate, method) / log_eps
    return values


def _limit_radii(radii: Sequence[Number], limit_scales: int) -> Tuple[Number, ...]:
    usable = [eps for eps in sorted(radii) if float(eps) < 1]
    return tuple(usable[: max(limit_scales, 1)])


def _report(
    grid: CountGrid, method: str, estimators: EstimatorConfig
) -> RateReport:
    rates = _scale_rates(grid, estimators.fit_tail)
    normalized = _normalized(rates, method)
    limit = tuple(e for e in _limit_radii(grid.radii, estimators.limit_scales) if e in normalized)
    limit_values = [normalized[e] for e in limit]
    entropy = max(_rate_value(rate, method) for rate in rates)
    return RateReport(
        rates=rates,
        method=method,
        entropy=max(entropy, 0.0),
        umdim=max(limit_values) if limit_values else 0.0,
        lmdim=min(limit_values) if limit_values else 0.0,
        limit_radii=limit,
        normalized=normalized,
        grid=grid,
    )


def entropy_estimate(
    fs: FunctionSystem,
    n_grid: Sequence[int],
    eps_grid: Sequence,
    mode: str = "auto",
    grid: Optional[CountGrid] = None,
    estimators: Optional[EstimatorConfig] = None,
    budget: Optional[BudgetConfig] = None,
) -> RateReport:
    """
    Topological entropy estimate: the largest per-ε slope of log s(n, ε).

    :param grid: Precomputed counts; computed when omitted
    :raises ConfigurationError: With fewer than 2 horizons
    """
    if len(set(n_grid)) < 2:
        raise ConfigurationError(
            f"Entropy needs at least 2 horizons, got {len(set(n_grid))}"
        )
    settings = _estimators(estimators)
    counts = grid if grid is not None else count_grid(fs, n_grid, eps_grid, mode, budget=budget)
    report = _report(counts, settings.entropy_rate, settings)
    logger.info("Entropy estimate %.6f (%s)", report.entropy, settings.entropy_rate)
    return report


def _validate_mdim_grid(radii: Sequence[Number]) -> None:
    if len(radii) < 3:
        raise ConfigurationError(
            f"Mean dimension needs at least 3 radii, got {len(radii)}"
        )
    if any(float(e) >= 1 for e in radii):
        raise ConfigurationError("Mean dimension radii must be below 1")
    if float(max(radii)) / float(min(radii)) < 4 - comparison_tolerance():
        raise ConfigurationError("Mean dimension radii must span at least 3 dyadic scales")


def mmdim_estimate(
    fs: FunctionSystem,
    n_grid: Sequence[int],
    eps_grid: Sequence,
    mode: str = "auto",
    sigmas: Sequence[SigmaGenerator] = (),
    grid: Optional[CountGrid] = None,
    estimators: Optional[EstimatorConfig] = None,
    budget: Optional[BudgetConfig] = None,
) -> RateReport:
    """
    Upper, lower and orbit metric mean dimension estimates.

    rate(ε)/|log ε| is tabulated for every radius; umdim and lmdim are its max
    and min over the smallest ``limit_scales`` radii. The orbit value takes the
    lower recipe for each sampled σ and then the largest over the sample.
    """
    if len(set(n_grid)) < 2:
        raise ConfigurationError(
            f"Mean dimension needs at least 2 horizons, got {len(set(n_grid))}"
        )
    radii = sorted({as_number(e) for e in eps_grid})
    _validate_mdim_grid(radii)
    settings = _estimators(estimators)
    validate_rate_method(settings.mdim_rate)
    counts = grid if grid is not None else count_grid(fs, n_grid, radii, mode, budget=budget)
    report = _report(counts, settings.mdim_rate, settings)

    for sigma in sigmas:
        if not sigma_sigma(fs, sigma):
            logger.warning("Skipping %s: Σ_σ is empty", sigma.describe())
            continue
        orbit_grid = count_grid(
            fs, n_grid, radii, mode, sigma=sigma, spanning=False, budget=budget
        )
        orbit_report = _report(orbit_grid, settings.mdim_rate, settings)
        report.omdim_by_sigma[sigma.describe()] = orbit_report.lmdim
    if report.omdim_by_sigma:
        report.omdim = max(report.omdim_by_sigma.values())
    logger.info(
        "Metric mean dimension: umdim %.4f, lmdim %.4f, omdim %s",
        report.umdim,
        report.lmdim,
        "n/a" if report.omdim is None else f"{report.omdim:.4f}",
    )
    return report


def theorem1_chain(
    fs: FunctionSystem,
    n_grid: Sequence[int],
    eps_grid: Sequence,
    sigmas: Sequence[SigmaGenerator] = (),
    mode: str = "auto",
    mdim: float = 0.0,
    estimators: Optional[EstimatorConfig] = None,
    budget: Optional[BudgetConfig] = None,
) -> Theorem1Report:
    """
    Check mdim ≤ omdim ≤ lmdim ≤ umdim and s(σ,n,ε) ≤ s(n,ε) entrywise.

    The entrywise check only fires where the unrestricted count is exact.

    :param mdim: Mean dimension estimate from cover_dimension.mdim_estimate
    :return: Theorem1Report listing violated links
    """
    radii = sorted({as_number(e) for e in eps_grid})
    grid = count_grid(fs, n_grid, radii, mode, spanning=False, budget=budget)
    report = mmdim_estimate(
        fs, n_grid, radii, mode, sigmas=sigmas, grid=grid,
        estimators=estimators, budget=budget,
    )
    violations: List[str] = []
    tol = comparison_tolerance()
    if mdim > report.lmdim + tol:
        violations.append(f"mdim {mdim:.6f} > lmdim {report.lmdim:.6f}")
    if report.lmdim > report.umdim + tol:
        violations.append(f"lmdim {report.lmdim:.6f} > umdim {report.umdim:.6f}")
    if report.omdim is not None and report.omdim > report.lmdim + tol:
        violations.append(f"omdim {report.omdim:.6f} > lmdim {report.lmdim:.6f}")

    for sigma in sigmas:
        for n in grid.horizons:
            for eps in radii:
                full = grid.separated(n, eps)
                if not full.exact:
                    continue
                restricted = orbit_separated_count(fs, sigma, n, eps, mode, budget)
                if restricted.count > full.count:
                    violations.append(
                        f"{sigma.describe()} n={n} eps={eps}: "
                        f"s(σ)={restricted.count} > s={full.count}"
                    )
    return Theorem1Report(
        mdim=mdim,
        lmdim=report.lmdim,
        umdim=report.umdim,
        omdim=report.omdim,
        violations=violations,
    )
