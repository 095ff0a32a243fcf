"""
app_ifs.gallery

Curated example systems and the checks of their expected properties.

Every expectation names the estimator it is checked with, the grids it
needs, a provenance tag and a tolerance.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from .capacity_sbp import ocap
from .complexity_estimators import entropy_estimate, mmdim_estimate
from .cover_dimension import ball_cover, power_join_identity
from .generators import (
    cat_map,
    circle,
    cyclic_shift,
    doubling_branches,
    identity,
    power,
    rotation,
    seq_window,
    shift_maps,
    torus_grid,
    transport,
)
from .gluing_orbit import (
    gop_estimate,
    recurrence_scan,
    rigidity_deficit,
    transitive_points,
)
from .ifs_model import check_ifs, make_system
from .loaders import load_orbit_sequence, load_system
from .metric_core import glue_realization, make_model
from .models.gallery import Expectation, ExpectationOutcome, GallerySystem
from .models.orbit import SigmaGenerator
from .models.system import FunctionSystem, PartialMap
from .utils.numeric import comparison_tolerance
from .utils.validation import ConfigurationError

logger = logging.getLogger(__name__)

LN2 = math.log(2)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def full_shift(q: int = 2, window: int = 5) -> FunctionSystem:
    space = seq_window(q, window)
    return make_system(space, shift_maps(q, window), name=f"full-shift-{q}")


def grid_shift(levels: int = 5, window: int = 1) -> FunctionSystem:
    space = seq_window(levels, window, graded=True)
    return make_system(space, shift_maps(levels, window), name="grid-shift")


def periodic_shift(q: int = 2, window: int = 8) -> FunctionSystem:
    space = seq_window(q, window)
    return make_system(space, [cyclic_shift(q, window)], name=f"periodic-shift-{q}")


def rotation_system(n: int, k: int = 1) -> FunctionSystem:
    return make_system(circle(n), [rotation(n, k)], name=f"rotation-{n}")


def cat_torus(n: int = 5) -> FunctionSystem:
    return make_system(torus_grid(n), [cat_map(n)], name="cat-map-torus")


def identity_system(n: int = 6) -> FunctionSystem:
    space = circle(n)
    return make_system(space, [identity(space.points)], name="identity")


def doubling_system(n: int = 9) -> FunctionSystem:
    return make_system(circle(n), doubling_branches(n), name="doubling-inverse-branches")


def power_family(n: int = 4, top: int = 3) -> FunctionSystem:
    space = torus_grid(n)
    base = cat_map(n)
    v = PartialMap(id=base[0], pairs=tuple(base[1]))
    specs = [base] + [power(v, k) for k in range(2, top + 1)]
    return make_system(space, specs, name="power-family")


def anosov_shift_mixture(n: int = 3, window: int = 2) -> FunctionSystem:
    """
    A torus cat map and a periodic shift placed side by side in one glued
    space, with an identity on the torus part.
    """
    torus = torus_grid(n)
    words = seq_window(2, window)
    glued = glue_realization([torus, words])
    left, right = glued.embeddings
    specs = [
        transport(cat_map(n), left),
        transport(cyclic_shift(2, window), right),
        transport(identity(torus.points, "id_torus"), left),
    ]
    return make_system(glued.model, specs, name="anosov-shift-mixture")


def two_cycles() -> FunctionSystem:
    space = make_model(
        ["a", "b", "c", "d"],
        _line_metric([Fraction(0), Fraction(1, 4), Fraction(1), Fraction(5, 4)]),
        name="two-cycles",
    )
    maps = [
        ("swap_ab", [("a", "b"), ("b", "a")]),
        ("swap_cd", [("c", "d"), ("d", "c")]),
    ]
    return make_system(space, maps, name="two-cycles")


def stray_arrow() -> FunctionSystem:
    space = make_model(
        ["a", "b", "c"],
        _line_metric([Fraction(0), Fraction(1, 4), Fraction(1)]),
        name="stray-arrow",
    )
    maps = [("swap", [("a", "b"), ("b", "a")]), ("feed", [("c", "a")])]
    return make_system(space, maps, name="stray-arrow")


def rotation_plus_identity(n: int = 4) -> FunctionSystem:
    space = circle(n)
    return make_system(
        space, [rotation(n, 1), identity(space.points)], name="rotation-plus-identity"
    )


def _line_metric(positions: List[Fraction]) -> List[List[Fraction]]:
    return [[abs(a - b) for b in positions] for a in positions]


# ---------------------------------------------------------------------------
# Catalogue
# ---------------------------------------------------------------------------


def _entropy(value: float, n_grid, eps_grid, note: str, tolerance: float = 0.01) -> Expectation:
    return Expectation(
        quantity="entropy",
        value=value,
        provenance="DERIVED" if value else "TRIVIAL",
        note=note,
        tolerance=tolerance,
        params={"n_grid": list(n_grid), "eps_grid": list(eps_grid)},
    )


def _ifs(value: bool = True) -> Expectation:
    return Expectation(
        quantity="ifs", value=value, provenance="TRIVIAL", note="maximal witness set"
    )


def build_gallery() -> List[GallerySystem]:
    """The curated example systems, in a fixed order."""
    return [
        GallerySystem(
            name="full-shift-2",
            description="Binary full shift on length-5 windows, weights 2^-i",
            parameters={"q": 2, "window": 5},
            builder=lambda: full_shift(2, 5),
            expectations=(
                _entropy(
                    LN2,
                    [1, 2, 3, 4],
                    ["1/2", "1/4", "1/8"],
                    "s(n, 2^-k) = 2^(n+k)",
                ),
                _ifs(),
            ),
        ),
        GallerySystem(
            name="full-shift-2-symbolic",
            description="Binary full shift at symbol resolution (two points)",
            parameters={"q": 2, "window": 1},
            builder=lambda: full_shift(2, 1),
            expectations=(
                _entropy(LN2, [1, 2, 3, 4], ["1/2"], "s(n, ε) = 2^n for ε ≤ 1"),
                Expectation(
                    quantity="gop_m",
                    value=1,
                    provenance="DERIVED",
                    note="every transition is a map, so gap 1 always joins",
                    params={"eps_grid": ["1/2", "1/4"], "max_M": 2, "count": 6},
                ),
            ),
        ),
        GallerySystem(
            name="periodic-shift-2",
            description="Cyclic shift on period-8 binary words",
            parameters={"q": 2, "window": 8},
            builder=lambda: periodic_shift(2, 8),
            expectations=(
                _ifs(),
                Expectation(
                    quantity="transitive",
                    value=True,
                    provenance="DERIVED",
                    note="the de Bruijn word 00010111 shows every 3-prefix",
                    params={
                        "sigma": "const(shift)",
                        "eps": "1/4",
                        "horizon": 8,
                        "point": "00010111",
                    },
                ),
            ),
        ),
        GallerySystem(
            name="grid-shift",
            description="Shift on [0,1]-valued sequences, 5 levels, window 1",
            parameters={"levels": 5, "window": 1},
            builder=lambda: grid_shift(5, 1),
            expectations=(
                Expectation(
                    quantity="umdim",
                    value=1.0,
                    provenance="DERIVED",
                    note="s(n, 2^-k) = (2^k + 1)^n for 2^-k at or above the level spacing",
                    tolerance=0.2,
                    params={"n_grid": [1, 2, 3], "eps_grid": ["1/2", "1/4", "1/8"]},
                ),
            ),
        ),
        GallerySystem(
            name="rotation-12",
            description="Rotation by one step on the 12-point circle",
            parameters={"n": 12, "k": 1},
            builder=lambda: rotation_system(12, 1),
            expectations=(
                _entropy(0.0, [1, 2, 3, 4], ["1/4", "1/8"], "isometry"),
                Expectation(
                    quantity="rigid_at",
                    value=12,
                    provenance="DERIVED",
                    note="v^12 is the identity",
                    params={"sigma": "const(rot1)", "m_max": 12},
                ),
            ),
        ),
        GallerySystem(
            name="cat-map-torus",
            description="Arnold cat map on the 5x5 torus grid",
            parameters={"n": 5},
            builder=lambda: cat_torus(5),
            expectations=(
                _ifs(),
                _entropy(0.0, [1, 2, 3], ["1/5"], "one bijection on a finite grid"),
            ),
        ),
        GallerySystem(
            name="identity",
            description="Identity on the 6-point circle",
            parameters={"n": 6},
            builder=lambda: identity_system(6),
            expectations=(
                _ifs(),
                _entropy(0.0, [1, 2, 3], ["1/6", "1/3"], "every orbit is constant"),
                Expectation(
                    quantity="nonrecurrent",
                    value=[],
                    provenance="TRIVIAL",
                    note="fixed points",
                    params={"eps": "1/6", "horizon": 4},
                ),
            ),
        ),
        GallerySystem(
            name="doubling-inverse-branches",
            description="Inverse branches y/2 and (y+1)/2 of doubling on 9 grid points",
            parameters={"n": 9},
            builder=lambda: doubling_system(9),
            expectations=(
                _ifs(),
                _entropy(0.0, [1, 2, 3, 4], ["1/9"], "disjoint domains, one path per point"),
            ),
        ),
        GallerySystem(
            name="anosov-shift-mixture",
            description="Glued torus cat map and periodic shift, identity on the torus",
            parameters={"n": 3, "window": 2},
            builder=lambda: anosov_shift_mixture(3, 2),
            expectations=(_ifs(),),
        ),
        GallerySystem(
            name="power-family",
            description="cat, cat^2 and cat^3 on the 4x4 torus grid",
            parameters={"n": 4, "powers": 3},
            builder=lambda: power_family(4, 3),
            expectations=(
                _ifs(),
                Expectation(
                    quantity="join_identity",
                    value=True,
                    provenance="DERIVED",
                    note="joins along σ_v regroup into joins along σ_{v^n}",
                    params={"v": "cat", "n": 2, "k": 3, "balls": "1/2"},
                ),
            ),
        ),
        GallerySystem(
            name="two-cycles",
            description="Two swaps far apart on a line",
            parameters={},
            builder=two_cycles,
            expectations=(
                _ifs(),
                Expectation(
                    quantity="gop_fails",
                    value=True,
                    provenance="DERIVED",
                    note="no map joins the two cycles",
                    params={
                        "eps": "1/2",
                        "max_M": 3,
                        "sequence": [
                            {"point": "a", "sigma": "const(swap_ab)", "length": 1},
                            {"point": "c", "sigma": "const(swap_cd)", "length": 1},
                        ],
                    },
                ),
            ),
        ),
        GallerySystem(
            name="stray-arrow",
            description="A swap with one point feeding into it",
            parameters={},
            builder=stray_arrow,
            expectations=(
                _ifs(),
                Expectation(
                    quantity="nonrecurrent",
                    value=["c"],
                    provenance="DERIVED",
                    note="c is never revisited",
                    params={"eps": "1/2", "horizon": 4},
                ),
                Expectation(
                    quantity="ocap",
                    value="0",
                    provenance="DERIVED",
                    note="c lies on no cycle",
                    params={"target": ["c"]},
                ),
            ),
        ),
        GallerySystem(
            name="rotation-plus-identity",
            description="Rotation and identity together on the 4-point circle",
            parameters={"n": 4},
            builder=lambda: rotation_plus_identity(4),
            expectations=(
                _ifs(),
                _entropy(
                    LN2,
                    [1, 2, 3, 4],
                    ["1/8", "1/4"],
                    "each step either moves or stays: 4·2^(n−1) traces",
                ),
                Expectation(
                    quantity="ocap",
                    value="1",
                    provenance="DERIVED",
                    note="the identity loop at 0",
                    params={"target": ["0"]},
                ),
            ),
        ),
    ]


def gallery_names() -> List[str]:
    return [entry.name for entry in build_gallery()]


def get_gallery_system(name: str) -> GallerySystem:
    """
    :raises ConfigurationError: For an unknown gallery name
    """
    for entry in build_gallery():
        if entry.name == name:
            return entry
    raise ConfigurationError(
        f"Unknown gallery system '{name}'. Must be one of: {', '.join(gallery_names())}"
    )


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def _real_match(observed: float, expected: float, tolerance: float) -> bool:
    if expected == 0:
        return abs(observed) <= comparison_tolerance()
    return abs(observed - expected) <= tolerance * abs(expected)


def _check_entropy(fs: FunctionSystem, e: Expectation) -> Tuple[Any, bool]:
    report = entropy_estimate(fs, e.params["n_grid"], e.params["eps_grid"])
    return report.entropy, _real_match(report.entropy, e.value, e.tolerance)


def _check_umdim(fs: FunctionSystem, e: Expectation) -> Tuple[Any, bool]:
    report = mmdim_estimate(fs, e.params["n_grid"], e.params["eps_grid"])
    return report.umdim, _real_match(report.umdim, e.value, e.tolerance)


def _check_ifs(fs: FunctionSystem, e: Expectation) -> Tuple[Any, bool]:
    observed = check_ifs(fs).is_ifs
    return observed, observed == e.value


def _check_gop_m(fs: FunctionSystem, e: Expectation) -> Tuple[Any, bool]:
    entries = gop_estimate(
        fs,
        e.params["eps_grid"],
        max_M=e.params.get("max_M", 4),
        count=e.params.get("count", 8),
    )
    observed = [entry.M for entry in entries]
    return observed, all(m == e.value for m in observed)


def _check_gop_fails(fs: FunctionSystem, e: Expectation) -> Tuple[Any, bool]:
    sequence = load_orbit_sequence(e.params["sequence"])
    (entry,) = gop_estimate(
        fs, [e.params["eps"]], sequences=[sequence], max_M=e.params.get("max_M", 4)
    )
    observed = not entry.holds
    return observed, observed == e.value


def _check_rigid_at(fs: FunctionSystem, e: Expectation) -> Tuple[Any, bool]:
    report = rigidity_deficit(
        fs, SigmaGenerator.parse(e.params["sigma"]), range(1, e.params["m_max"] + 1)
    )
    return report.rigid_at, report.rigid_at == e.value


def _check_ocap(fs: FunctionSystem, e: Expectation) -> Tuple[Any, bool]:
    result = ocap(fs, e.params["target"], curve_horizons=())
    return result.value, result.defined and result.value == Fraction(e.value)


def _check_transitive(fs: FunctionSystem, e: Expectation) -> Tuple[Any, bool]:
    scan = transitive_points(
        fs,
        SigmaGenerator.parse(e.params["sigma"]),
        e.params["eps"],
        e.params["horizon"],
    )
    observed = e.params["point"] in scan.points
    return observed, observed == e.value


def _check_nonrecurrent(fs: FunctionSystem, e: Expectation) -> Tuple[Any, bool]:
    entries = recurrence_scan(fs, e.params["eps"], e.params["horizon"])
    observed = sorted(entry.point for entry in entries if not entry.recurrent)
    return observed, observed == sorted(e.value)


def _check_join_identity(fs: FunctionSystem, e: Expectation) -> Tuple[Any, bool]:
    n, v = e.params["n"], e.params["v"]
    v_power = v if n == 1 else f"{v}^{n}"
    alpha = ball_cover(fs.space, e.params["balls"])
    equal, _, _ = power_join_identity(fs, v, v_power, n, e.params["k"], alpha)
    return equal, equal == e.value


CHECKS: Dict[str, Callable[[FunctionSystem, Expectation], Tuple[Any, bool]]] = {
    "entropy": _check_entropy,
    "umdim": _check_umdim,
    "ifs": _check_ifs,
    "gop_m": _check_gop_m,
    "gop_fails": _check_gop_fails,
    "rigid_at": _check_rigid_at,
    "ocap": _check_ocap,
    "transitive": _check_transitive,
    "nonrecurrent": _check_nonrecurrent,
    "join_identity": _check_join_identity,
}


def check_expectations(entry: GallerySystem) -> List[ExpectationOutcome]:
    """
    Evaluate every expectation of one gallery system with its estimator.

    :raises ConfigurationError: For an expectation with no matching check
    """
    fs = entry.build()
    outcomes: List[ExpectationOutcome] = []
    for expectation in entry.expectations:
        check = CHECKS.get(expectation.quantity)
        if check is None:
            raise ConfigurationError(
                f"No check for quantity '{expectation.quantity}' in '{entry.name}'"
            )
        observed, ok = check(fs, expectation)
        if not ok:
            logger.warning(
                "%s: %s expected %r, observed %r",
                entry.name,
                expectation.quantity,
                expectation.value,
                observed,
            )
        outcomes.append(
            ExpectationOutcome(
                system=entry.name, expectation=expectation, observed=observed, ok=ok
            )
        )
    return outcomes


def check_gallery(names: Optional[List[str]] = None) -> List[ExpectationOutcome]:
    """Check every expectation of the named systems (default: all of them)."""
    entries = build_gallery() if not names else [get_gallery_system(n) for n in names]
    outcomes: List[ExpectationOutcome] = []
    for entry in entries:
        outcomes.extend(check_expectations(entry))
    return outcomes


def resolve_system(system: Optional[str] = None, gallery: Optional[str] = None) -> FunctionSystem:
    """
    The system named by a description file or a gallery name.

    :raises ConfigurationError: Unless exactly one of the two is given
    """
    if (system is None) == (gallery is None):
        raise ConfigurationError("Give exactly one of --system or --gallery")
    if gallery is not None:
        return get_gallery_system(gallery).build()
    return load_system(system)
