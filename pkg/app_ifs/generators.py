"""
app_ifs.generators

Named spaces and maps: cyclic grids, torus and cube grids, sequence windows,
and the rotations, cat maps, shifts, doubling branches and identities that
act on them.

All distances are exact fractions.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .models.metric import MetricSpaceModel, Point
from .models.system import PartialMap
from .utils.validation import ConfigurationError, validate_positive

MapSpec = Tuple[str, List[Tuple[Point, Point]]]


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------


def _circle_gap(i: int, j: int, n: int) -> Fraction:
    step = abs(i - j) % n
    return Fraction(min(step, n - step), n)


def circle(n: int, name: Optional[str] = None) -> MetricSpaceModel:
    """The n-point grid {i/n} on the circle ℝ/ℤ with arc-length distance."""
    validate_positive(n, "n")
    points = tuple(str(i) for i in range(n))
    matrix = tuple(tuple(_circle_gap(i, j, n) for j in range(n)) for i in range(n))
    return MetricSpaceModel(
        points=points,
        matrix=matrix,
        resolution=Fraction(1, n),
        name=name or f"circle-{n}",
    )


def torus_point(i: int, j: int) -> Point:
    return f"{i},{j}"


def torus_grid(n: int, name: Optional[str] = None) -> MetricSpaceModel:
    """The n×n grid on the 2-torus with the max of the two circle distances."""
    validate_positive(n, "n")
    cells = [(i, j) for i in range(n) for j in range(n)]
    matrix = tuple(
        tuple(
            max(_circle_gap(a, c, n), _circle_gap(b, d, n)) for (c, d) in cells
        )
        for (a, b) in cells
    )
    return MetricSpaceModel(
        points=tuple(torus_point(i, j) for i, j in cells),
        matrix=matrix,
        resolution=Fraction(1, n),
        name=name or f"torus-{n}",
    )


def cube_grid(k: int, dim: int = 1, name: Optional[str] = None) -> MetricSpaceModel:
    """
    The grid {0, 1/(k−1), …, 1}^dim in the cube with the sup distance.

    :param k: Levels per coordinate (at least 2)
    :param dim: Number of coordinates
    """
    if k < 2:
        raise ConfigurationError(f"cube_grid needs at least 2 levels, got {k}")
    validate_positive(dim, "dim")
    cells = list(itertools.product(range(k), repeat=dim))
    matrix = tuple(
        tuple(
            max(Fraction(abs(a - b), k - 1) for a, b in zip(u, v)) for v in cells
        )
        for u in cells
    )
    return MetricSpaceModel(
        points=tuple(",".join(str(c) for c in cell) for cell in cells),
        matrix=matrix,
        resolution=Fraction(1, k - 1),
        name=name or f"cube-{k}^{dim}",
    )


def word_point(word: Sequence[int], q: int) -> Point:
    if q <= 10:
        return "".join(str(s) for s in word)
    return ".".join(str(s) for s in word)


def _level_gap(a: int, b: int, q: int, graded: bool) -> Fraction:
    if graded:
        return Fraction(abs(a - b), q - 1)
    return Fraction(int(a != b))


def seq_window(
    q: int, window: int, graded: bool = False, name: Optional[str] = None
) -> MetricSpaceModel:
    """
    Length-``window`` words over q symbols with d(x, y) = max_i 2^{−i}·|x_i − y_i|.

    With ``graded`` the symbols are the levels {0, 1/(q−1), …, 1} of [0, 1]
    and |x_i − y_i| is their difference; otherwise it is 1 for distinct
    symbols. Window positions are indexed from 0.
    """
    if q < 2:
        raise ConfigurationError(f"seq_window needs at least 2 symbols, got {q}")
    validate_positive(window, "window")
    words = list(itertools.product(range(q), repeat=window))
    weights = [Fraction(1, 2**i) for i in range(window)]
    matrix = tuple(
        tuple(
            max(w * _level_gap(a, b, q, graded) for w, a, b in zip(weights, u, v))
            for v in words
        )
        for u in words
    )
    resolution = weights[-1] * (Fraction(1, q - 1) if graded else 1)
    kind = "grid" if graded else "shift"
    return MetricSpaceModel(
        points=tuple(word_point(u, q) for u in words),
        matrix=matrix,
        resolution=resolution,
        name=name or f"{kind}-{q}^{window}",
    )


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------


def rotation(n: int, k: int = 1, map_id: Optional[str] = None) -> MapSpec:
    """i ↦ i + k (mod n) on ``circle(n)``."""
    pairs = [(str(i), str((i + k) % n)) for i in range(n)]
    return (map_id or f"rot{k}", pairs)


def cat_map(n: int, map_id: str = "cat") -> MapSpec:
    """(i, j) ↦ (2i + j, i + j) (mod n) on ``torus_grid(n)``."""
    pairs = [
        (torus_point(i, j), torus_point((2 * i + j) % n, (i + j) % n))
        for i in range(n)
        for j in range(n)
    ]
    return (map_id, pairs)


def shift_maps(q: int, window: int) -> List[MapSpec]:
    """
    Injective branches of the one-step shift on length-``window`` words.

    ``shift:a:b`` drops a leading symbol a and appends b; every word lies in
    the domain of exactly q branches.
    """
    words = list(itertools.product(range(q), repeat=window))
    maps: List[MapSpec] = []
    for a in range(q):
        for b in range(q):
            pairs = [
                (word_point(w, q), word_point(w[1:] + (b,), q))
                for w in words
                if w[0] == a
            ]
            maps.append((f"shift:{a}:{b}", pairs))
    return maps


def cyclic_shift(q: int, window: int, map_id: str = "shift") -> MapSpec:
    """The bijective shift on period-``window`` points: w ↦ w[1:] + w[0]."""
    words = itertools.product(range(q), repeat=window)
    pairs = [(word_point(w, q), word_point(w[1:] + w[:1], q)) for w in words]
    return (map_id, pairs)


def doubling_branches(n: int) -> List[MapSpec]:
    """
    Inverse branches y ↦ y/2 and y ↦ (y+1)/2 of the doubling map on
    ``circle(n)``, restricted to the grid points they send back onto the grid.

    :raises ConfigurationError: For even n, where the second branch is empty
    """
    if n % 2 == 0:
        raise ConfigurationError(f"doubling_branches needs an odd grid, got {n}")
    half = [(str(i), str(i // 2)) for i in range(0, n, 2)]
    half_shift = [(str(i), str((i + n) // 2)) for i in range(1, n, 2)]
    return [("half", half), ("half_shift", half_shift)]


def identity(points: Iterable[Point], map_id: str = "id") -> MapSpec:
    return (map_id, [(x, x) for x in points])


def compose(first: PartialMap, second: PartialMap, map_id: str) -> MapSpec:
    """second ∘ first on the points where both steps are defined."""
    pairs = [(x, second(y)) for x, y in first.pairs if second(y) is not None]
    if not pairs:
        raise ConfigurationError(f"Composition '{map_id}' has an empty domain")
    return (map_id, pairs)


def power(v: PartialMap, k: int, map_id: Optional[str] = None) -> MapSpec:
    """The k-th iterate v^k on the points where it is defined."""
    validate_positive(k, "k")
    result = PartialMap(id=v.id, pairs=v.pairs)
    for _ in range(k - 1):
        result = PartialMap(id=v.id, pairs=tuple(compose(result, v, v.id)[1]))
    return (map_id or f"{v.id}^{k}", list(result.pairs))


def transport(spec: MapSpec, embedding: Dict[Point, Point]) -> MapSpec:
    """Carry a map along a point embedding (used after gluing spaces)."""
    map_id, pairs = spec
    return (map_id, [(embedding[x], embedding[y]) for x, y in pairs])


# ---------------------------------------------------------------------------
# Named systems
# ---------------------------------------------------------------------------


def build_named_space(name: str, **params) -> MetricSpaceModel:
    """
    Space from a generator name and its parameters.

    :raises ConfigurationError: For an unknown generator or bad parameters
    """
    builders = {
        "circle": circle,
        "torus_grid": torus_grid,
        "cube_grid": cube_grid,
        "seq_window": seq_window,
    }
    if name not in builders:
        raise ConfigurationError(
            f"Unknown space generator '{name}'. Must be one of: {', '.join(builders)}"
        )
    try:
        return builders[name](**params)
    except TypeError as exc:
        raise ConfigurationError(f"Bad parameters for '{name}': {exc}") from exc


def build_named_maps(
    name: str, space: MetricSpaceModel, generator: Dict
) -> List[MapSpec]:
    """
    Maps from a generator name, resolved against the generator of ``space``.

    ``generator`` holds the space generator name and parameters, which fix
    the grid sizes the map formulas need.
    """
    kind = generator.get("name")
    params = generator.get("params", {})
    if name == "identity":
        return [identity(space.points)]
    if name.startswith("rotation"):
        if kind != "circle":
            raise ConfigurationError("rotation needs a circle space")
        k = int(name[len("rotation("):-1]) if name.startswith("rotation(") else 1
        return [rotation(params["n"], k)]
    if name == "cat_map":
        if kind != "torus_grid":
            raise ConfigurationError("cat_map needs a torus_grid space")
        return [cat_map(params["n"])]
    if name == "shift":
        if kind != "seq_window":
            raise ConfigurationError("shift needs a seq_window space")
        return shift_maps(params["q"], params["window"])
    if name == "cyclic_shift":
        if kind != "seq_window":
            raise ConfigurationError("cyclic_shift needs a seq_window space")
        return [cyclic_shift(params["q"], params["window"])]
    if name in ("inverse_branches(doubling)", "doubling_branches"):
        if kind != "circle":
            raise ConfigurationError("doubling branches need a circle space")
        return doubling_branches(params["n"])
    raise ConfigurationError(f"Unknown map generator '{name}'")
