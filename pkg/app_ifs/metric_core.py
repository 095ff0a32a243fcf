"""
app_ifs.metric_core

Finite metric-space models: construction, metric-axiom verification,
Hausdorff and Gromov–Hausdorff distances, and realization gluing.
"""

from __future__ import annotations

import itertools
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .models.metric import (
    GHResult,
    GluedModel,
    MetricSpaceModel,
    MetricViolation,
    Point,
    Realization,
)
from .config import get_config
from .utils.numeric import Number, as_number, comparison_tolerance, is_exact
from .utils.validation import DomainError, validate_nonempty, validate_subset

logger = logging.getLogger(__name__)

def make_model(
    points: Sequence,
    matrix: Sequence[Sequence],
    resolution=None,
    name: str = "",
) -> MetricSpaceModel:
    """
    Build a model from raw ids and a raw distance table.

    :param points: Point identifiers (converted to strings)
    :param matrix: Square table of numbers, ints/strings become exact fractions
    :param resolution: Declared resolution; defaults to the smallest positive distance
    :param name: Optional model name
    :return: MetricSpaceModel
    """
    ids = tuple(str(p) for p in points)
    table = tuple(tuple(as_number(v) for v in row) for row in matrix)
    if resolution is None:
        positive = [v for row in table for v in row if v > 0]
        resolution = min(positive) if positive else Fraction(1)
    return MetricSpaceModel(
        points=ids, matrix=table, resolution=as_number(resolution), name=name
    )


def relabel(model: MetricSpaceModel, prefix: str) -> MetricSpaceModel:
    """Return a copy whose point ids carry ``prefix:``."""
    return MetricSpaceModel(
        points=tuple(f"{prefix}:{p}" for p in model.points),
        matrix=model.matrix,
        resolution=model.resolution,
        name=model.name,
    )


def verify_metric(model: MetricSpaceModel) -> List[MetricViolation]:
    """
    Check the metric axioms on every pair and triple.

    Violations are returned as data; an empty list means the table is a metric.

    :param model: Model to check
    :return: List of MetricViolation records
    """
    violations: List[MetricViolation] = []
    pts = model.points
    size = model.size
    table = model.matrix

    for i in range(size):
        if table[i][i] != 0:
            violations.append(
                MetricViolation("identity", (pts[i],), f"d(x,x) = {table[i][i]}")
            )
        for j in range(size):
            if i == j:
                continue
            if table[i][j] < 0:
                violations.append(
                    MetricViolation(
                        "nonnegativity", (pts[i], pts[j]), f"d = {table[i][j]}"
                    )
                )
            elif j > i and table[i][j] == 0:
                violations.append(
                    MetricViolation("positivity", (pts[i], pts[j]), "d(x,y) = 0")
                )
            if j > i and not _equal(table[i][j], table[j][i]):
                violations.append(
                    MetricViolation(
                        "symmetry",
                        (pts[i], pts[j]),
                        f"d(x,y) = {table[i][j]}, d(y,x) = {table[j][i]}",
                    )
                )

    arr = model.array
    slack = comparison_tolerance()
    for j in range(size):
        through = arr[:, j][:, None] + arr[j, :][None, :]
        excess = arr - through
        if model.exact:
            candidates = np.argwhere(excess > -slack)
        else:
            candidates = np.argwhere(excess > slack)
        for i, k in candidates:
            if i == j or k == j or i == k:
                continue
            if model.exact and not table[i][k] > table[i][j] + table[j][k]:
                continue
            violations.append(
                MetricViolation(
                    "triangle",
                    (pts[i], pts[j], pts[k]),
                    f"d(x,z) = {table[i][k]} > {table[i][j]} + {table[j][k]}",
                )
            )
    return violations


def _equal(a: Number, b: Number) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(float(a) - float(b)) <= comparison_tolerance()


def ball(model: MetricSpaceModel, center: Point, radius: Number) -> frozenset:
    """Open ball {y : d(center, y) < radius}."""
    row = model.array[model.position(center)]
    mask = model.below(row, radius)
    return frozenset(model.points[i] for i in np.flatnonzero(mask))


def diameter(model: MetricSpaceModel, subset: Iterable[Point]) -> Number:
    idx = [model.position(p) for p in subset]
    if len(idx) < 2:
        return Fraction(0) if model.exact else 0.0
    return max(model.matrix[a][b] for a in idx for b in idx)


def set_distance(
    model: MetricSpaceModel, point: Point, subset: Iterable[Point]
) -> Optional[Number]:
    """Distance from a point to a set; None for the empty set."""
    row = model.matrix[model.position(point)]
    values = [row[model.position(q)] for q in subset]
    return min(values) if values else None


def hausdorff_distance(
    model: MetricSpaceModel, first: Iterable[Point], second: Iterable[Point]
) -> Number:
    """
    Hausdorff distance between two nonempty subsets of a model.

    :param model: Ambient model
    :param first: Subset A
    :param second: Subset B
    :return: max(sup_a inf_b d(a,b), sup_b inf_a d(a,b))
    :raises DomainError: If a subset is empty or holds unknown points
    """
    a_pts = list(first)
    b_pts = list(second)
    validate_nonempty(a_pts, "first subset")
    validate_nonempty(b_pts, "second subset")
    validate_subset(a_pts, model.points, "first subset")
    validate_subset(b_pts, model.points, "second subset")
    a_idx = [model.position(p) for p in a_pts]
    b_idx = [model.position(p) for p in b_pts]
    table = model.matrix
    forward = max(min(table[a][b] for b in b_idx) for a in a_idx)
    backward = max(min(table[a][b] for a in a_idx) for b in b_idx)
    return max(forward, backward)


def _distortion(
    left: MetricSpaceModel,
    right: MetricSpaceModel,
    pairs: Sequence[Tuple[int, int]],
) -> Number:
    worst: Number = Fraction(0) if left.exact and right.exact else 0.0
    for (x, y), (x2, y2) in itertools.combinations(pairs, 2):
        gap = abs(left.matrix[x][x2] - right.matrix[y][y2])
        if gap > worst:
            worst = gap
    return worst


def _correspondence_pairs(
    f: Sequence[int], g: Sequence[int]
) -> List[Tuple[int, int]]:
    pairs = {(x, fx) for x, fx in enumerate(f)}
    pairs.update((gy, y) for y, gy in enumerate(g))
    return sorted(pairs)


def _exhaustive_correspondence(
    left: MetricSpaceModel, right: MetricSpaceModel, slack: float
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    dx = left.array
    dy = right.array
    p, q = left.size, right.size

    def map_distortion(src: np.ndarray, dst: np.ndarray, assignment) -> float:
        a = np.asarray(assignment)
        return float(np.max(np.abs(src - dst[np.ix_(a, a)])))

    fs = [(f, map_distortion(dx, dy, f)) for f in itertools.product(range(q), repeat=p)]
    gs = [(g, map_distortion(dy, dx, g)) for g in itertools.product(range(p), repeat=q)]

    best_value = np.inf
    best: Tuple[Tuple[int, ...], Tuple[int, ...]] = (fs[0][0], gs[0][0])
    for f, dis_f in fs:
        if dis_f >= best_value - slack:
            continue
        f_arr = np.asarray(f)
        dy_f = dy[f_arr, :]
        for g, dis_g in gs:
            if dis_g >= best_value - slack:
                continue
            cross = float(np.max(np.abs(dx[:, np.asarray(g)] - dy_f)))
            value = max(dis_f, dis_g, cross)
            if value < best_value - slack:
                best_value = value
                best = (f, g)
    return best


def _greedy_assignment(
    src: np.ndarray, dst: np.ndarray, slack: float
) -> Tuple[int, ...]:
    assignment: List[int] = []
    for x in range(src.shape[0]):
        best_y, best_cost = 0, np.inf
        for y in range(dst.shape[0]):
            cost = 0.0
            for x_prev, y_prev in enumerate(assignment):
                cost = max(cost, abs(src[x, x_prev] - dst[y, y_prev]))
            if cost < best_cost - slack:
                best_y, best_cost = y, cost
        assignment.append(best_y)
    return tuple(assignment)


def _amalgamate(
    base: MetricSpaceModel,
    anchor: Dict[int, int],
    other: MetricSpaceModel,
    other_prefix: str,
    pairs: Sequence[Tuple[int, int]],
    radius: Number,
    slack: float,
) -> Tuple[MetricSpaceModel, Dict[Point, Point]]:
    """
    Glue ``other`` onto ``base`` along a correspondence.

    ``anchor`` maps indices of the corresponded model into ``base`` indices.
    Cross distances are d(z, y) = min over (x', y') of d(z, x') + radius + d(y', y);
    points of ``other`` at distance zero from a base point are identified with it.
    """
    exact = base.exact and other.exact and is_exact(radius)
    zero: Number = Fraction(0) if exact else 0.0
    cross: List[List[Number]] = []
    for z in range(base.size):
        row: List[Number] = []
        for y in range(other.size):
            row.append(
                min(
                    base.matrix[z][anchor[xp]] + radius + other.matrix[yp][y]
                    for xp, yp in pairs
                )
            )
        cross.append(row)

    merged: Dict[int, int] = {}
    for y in range(other.size):
        for z in range(base.size):
            if cross[z][y] == zero or (not exact and abs(float(cross[z][y])) <= slack):
                merged[y] = z
                break

    kept = [y for y in range(other.size) if y not in merged]
    points = list(base.points) + [f"{other_prefix}:{other.points[y]}" for y in kept]
    size = len(points)
    table: List[List[Number]] = [[zero] * size for _ in range(size)]
    for a in range(base.size):
        for b in range(base.size):
            table[a][b] = base.matrix[a][b]
    for offset_a, ya in enumerate(kept):
        ia = base.size + offset_a
        for z in range(base.size):
            table[ia][z] = table[z][ia] = cross[z][ya]
        for offset_b, yb in enumerate(kept):
            table[ia][base.size + offset_b] = other.matrix[ya][yb]

    embedding: Dict[Point, Point] = {}
    for y in range(other.size):
        if y in merged:
            embedding[other.points[y]] = base.points[merged[y]]
        else:
            embedding[other.points[y]] = points[base.size + kept.index(y)]

    glued = MetricSpaceModel(
        points=tuple(points),
        matrix=tuple(tuple(row) for row in table),
        resolution=min(base.resolution, other.resolution),
        name=f"{base.name}+{other.name}".strip("+"),
    )
    return glued, embedding


def gh_distance(
    first: MetricSpaceModel,
    second: MetricSpaceModel,
    max_points: Optional[int] = None,
) -> GHResult:
    """
    Gromov–Hausdorff distance with a realization that achieves it.

    Exhaustive correspondence search runs when the combined size is within
    ``max_points``; beyond that a greedy correspondence gives an upper bound and
    half the diameter difference gives the lower bound, and the result is
    flagged as not exact.

    :param first: Model X
    :param second: Model Y
    :param max_points: Largest combined size searched exhaustively; defaults
                       to ``budgets.gh_exact_points``
    :return: GHResult
    """
    settings = get_config()
    if max_points is None:
        max_points = settings.budgets.gh_exact_points
    slack = settings.tolerances.gh
    p, q = first.size, second.size
    exact_search = p + q <= max_points
    if exact_search:
        f, g = _exhaustive_correspondence(first, second, slack)
    else:
        logger.warning(
            "GH search over %d points exceeds the exact cap %d; returning bounds only",
            p + q,
            max_points,
        )
        f = _greedy_assignment(first.array, second.array, slack)
        g = _greedy_assignment(second.array, first.array, slack)

    pairs = _correspondence_pairs(f, g)
    dis = _distortion(first, second, pairs)
    radius = dis / 2
    base = relabel(first, "0")
    glued, right_embedding = _amalgamate(
        base, {i: i for i in range(p)}, second, "1", pairs, radius, slack
    )
    left_embedding = {x: f"0:{x}" for x in first.points}
    realization = Realization(
        glued=glued, embed_left=left_embedding, embed_right=right_embedding
    )

    if exact_search:
        lower = radius
    else:
        lower = abs(diameter(first, first.points) - diameter(second, second.points)) / 2
    correspondence = tuple((first.points[x], second.points[y]) for x, y in pairs)
    return GHResult(
        distance=radius,
        lower=lower,
        exact=exact_search,
        realization=realization,
        correspondence=correspondence,
    )


def glue_realization(
    models: Sequence[MetricSpaceModel], max_points: Optional[int] = None
) -> GluedModel:
    """
    Glue an ordered list of models left to right.

    Each new model is attached to the ambient space along an optimal (or, past
    the exact cap, greedy) correspondence with its predecessor, so consecutive
    embedded copies sit at their Gromov–Hausdorff distance.

    :param models: Ordered nonempty list of models
    :param max_points: Exact-search cap passed to gh_distance
    :return: GluedModel with one embedding per input model
    """
    if not models:
        raise DomainError("glue_realization needs at least one model")
    ambient = relabel(models[0], "0")
    embeddings: List[Dict[Point, Point]] = [
        {x: f"0:{x}" for x in models[0].points}
    ]
    optimal = True
    for position in range(1, len(models)):
        previous, current = models[position - 1], models[position]
        result = gh_distance(previous, current, max_points=max_points)
        optimal = optimal and result.exact
        prev_embedding = embeddings[-1]
        anchor = {
            i: ambient.position(prev_embedding[x])
            for i, x in enumerate(previous.points)
        }
        pairs = [
            (previous.position(x), current.position(y))
            for x, y in result.correspondence
        ]
        ambient, embedding = _amalgamate(
            ambient, anchor, current, str(position), pairs, result.distance,
            get_config().tolerances.gh,
        )
        embeddings.append(embedding)
    if not optimal:
        logger.warning("Glued model uses bound-only correspondences; tagged non-optimal")
    return GluedModel(model=ambient, embeddings=embeddings, optimal=optimal)
