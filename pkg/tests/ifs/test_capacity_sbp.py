"""
tests.ifs.test_capacity_sbp

Tests for capacities, orbit capacity, the small-boundary property and the
partition-of-unity construction.
"""

from __future__ import annotations

from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from app_ifs.capacity_sbp import (
    capacity,
    capacity_table,
    frontier,
    is_small,
    lsbp_partition,
    ocap,
    sbp_check,
    shell,
    t2_map,
)
from app_ifs.gallery import identity_system
from app_ifs.generators import circle
from app_ifs.ifs_model import make_system
from app_ifs.models.orbit import SigmaGenerator
from app_ifs.utils import DomainError

from .conftest import line_model

ROT = SigmaGenerator.const("rot1")

# Two-pair cover of the 12-point circle with shrunk halves.
U0 = [str(i) for i in (11, 0, 1, 2, 3, 4, 5, 6)]
V0 = [str(i) for i in range(0, 6)]
U1 = [str(i) for i in (5, 6, 7, 8, 9, 10, 11, 0)]
V1 = [str(i) for i in range(6, 12)]
LSBP_PAIRS = [(U0, V0), (U1, V1)]


def random_system(rng: np.random.Generator):
    """Up to six points on a circle with up to three random injective partial maps."""
    size = int(rng.integers(2, 7))
    maps = []
    for k in range(int(rng.integers(1, 4))):
        domain = rng.choice(size, size=int(rng.integers(1, size + 1)), replace=False)
        image = rng.choice(size, size=len(domain), replace=False)
        maps.append((f"v{k}", [(str(x), str(y)) for x, y in zip(domain, image)]))
    fs = make_system(circle(size), maps)
    target = [str(i) for i in range(size) if rng.random() < 0.5]
    return fs, target


def brute_force_capacity(fs, target, n, x):
    """Best visit fraction over every extendable path, by enumeration."""
    core = fs.graph.infinite_core
    if x not in core:
        return None
    best = -1
    paths = [[x]]
    for _ in range(n - 1):
        paths = [
            path + [v(path[-1])]
            for path in paths
            for v in fs.maps
            if v(path[-1]) is not None and v(path[-1]) in core
        ]
    for path in paths:
        best = max(best, sum(1 for y in path if y in target))
    return Fraction(best, n)


def brute_force_ocap(fs, target):
    """Largest mean of the indicator over every simple cycle."""
    graph = nx.DiGraph(fs.graph.graph)
    means = [
        Fraction(sum(1 for y in cycle if y in target), len(cycle))
        for cycle in nx.simple_cycles(graph)
    ]
    return max(means) if means else None


class TestCapacity:
    """cap(n, x, A) by dynamic programming."""

    def test_rotation(self, rotation4):
        """Visits to one point of a 4-cycle."""
        assert capacity(rotation4, ["0"], 4, "1").value == Fraction(1, 4)
        assert capacity(rotation4, ["0"], 3, "1").value == 0
        assert capacity(rotation4, ["0"], 3, "0").value == Fraction(1, 3)

    def test_feeder(self, stray_arrow):
        """The feeder counts before entering the swap."""
        assert capacity(stray_arrow, ["c"], 2, "c").value == Fraction(1, 2)

    def test_undefined_without_infinite_orbit(self):
        """Points with no infinite orbit have no capacity."""
        fs = make_system(line_model([0, 1], ["a", "b"]), [("v", [("a", "b")])])
        result = capacity(fs, ["a"], 2, "a")
        assert not result.defined
        assert result.value is None

    def test_unknown_points(self, rotation4):
        """A must be a subset of the space."""
        with pytest.raises(DomainError, match="unknown points: 9"):
            capacity(rotation4, ["9"], 2, "0")

    def test_table_matches_single_values(self, rotation_plus_identity):
        """The table sweep agrees with one-off capacities."""
        table = capacity_table(rotation_plus_identity, ["0", "1"], [1, 3, 5])
        for n in (1, 3, 5):
            for x in rotation_plus_identity.space.points:
                single = capacity(rotation_plus_identity, ["0", "1"], n, x).value
                assert table.values[(n, x)] == single
        assert table.sup(5) == 1

    def test_matches_enumeration(self):
        """DP capacity and cycle-mean ocap equal brute force on random systems."""
        rng = np.random.default_rng(11)
        for _ in range(200):
            fs, target = random_system(rng)
            n = int(rng.integers(1, 9))
            for x in fs.space.points:
                expected = brute_force_capacity(fs, target, n, x)
                assert capacity(fs, target, n, x).value == expected
            assert ocap(fs, target, curve_horizons=()).value == brute_force_ocap(fs, target)


class TestOcap:
    """Orbit capacity as a maximum cycle mean."""

    def test_rotation(self, rotation4):
        """One point in four."""
        result = ocap(rotation4, ["0"], with_cycle=True)
        assert result.value == Fraction(1, 4)
        assert len(result.cycle) == 4
        assert result.excludes_empty_sigma_x

    def test_best_cycle(self):
        """The larger of two cycle means wins."""
        space = line_model([0, 1, 2, 3], ["a", "b", "c", "d"])
        fs = make_system(
            space, [("ab", [("a", "b"), ("b", "a")]), ("cd", [("c", "d"), ("d", "c")])]
        )
        result = ocap(fs, ["a", "c", "d"], with_cycle=True)
        assert result.value == 1
        assert set(result.cycle) == {"c", "d"}

    def test_feeder_is_small(self, stray_arrow):
        """A point off every cycle has zero orbit capacity."""
        assert ocap(stray_arrow, ["c"]).value == 0
        assert is_small(stray_arrow, ["c"])
        assert not is_small(stray_arrow, ["a"])

    def test_undefined_core(self):
        """An empty infinite core leaves ocap undefined and not small."""
        fs = make_system(line_model([0, 1], ["a", "b"]), [("v", [("a", "b")])])
        assert not ocap(fs, ["a"]).defined
        assert not is_small(fs, ["a"])

    def test_curve_brackets_limit(self, rotation12):
        """sup cap(n) sits between ocap and ocap + |X|/n."""
        result = ocap(rotation12, ["0", "5"], curve_horizons=(8, 16, 32))
        for n, value in result.curve.items():
            assert result.value <= value <= result.value + Fraction(12, n)

    def test_set_properties(self):
        """Monotone and subadditive on random instances."""
        rng = np.random.default_rng(5)
        for _ in range(50):
            fs, first = random_system(rng)
            second = [x for x in fs.space.points if rng.random() < 0.5]
            a = ocap(fs, first, curve_horizons=())
            if not a.defined:
                continue
            b = ocap(fs, second, curve_horizons=()).value
            union = ocap(fs, sorted(set(first) | set(second)), curve_horizons=()).value
            assert union <= a.value + b
            assert a.value <= union


class TestShells:
    """δ-shells and frontiers."""

    def test_shell(self):
        """A width of one cell catches the cells on both sides of each edge."""
        model = circle(12)
        V = [str(i) for i in range(0, 4)]
        assert shell(model, V, Fraction(1, 12)) == frozenset({"11", "0", "3", "4"})

    def test_shell_of_whole_space(self):
        """The whole space has no boundary."""
        model = circle(4)
        assert shell(model, model.points, 1) == frozenset()
        assert shell(model, [], 1) == frozenset()

    def test_frontier(self):
        """Frontier points lie inside V."""
        model = circle(12)
        assert frontier(model, V0, Fraction(1, 12)) == frozenset({"0", "5"})


class TestSbp:
    """The small-boundary search."""

    def test_rotation_fails_on_small_balls(self, rotation12):
        """Every nonempty shell of a rotation is visited with positive frequency."""
        report = sbp_check(rotation12, "1/12", balls=[("0", "1/4")])
        assert not report.holds
        assert len(report.failures) == 1
        assert report.failures[0].shell_ocap > 0

    def test_whole_space_witness(self, rotation12):
        """A ball covering the circle has an empty shell."""
        report = sbp_check(rotation12, "1/12", balls=[("0", 1)])
        assert report.holds
        assert report.entries[0].witness == frozenset(rotation12.space.points)

    def test_identity_shells_are_not_small(self):
        """Fixed points make every nonempty shell have ocap 1."""
        report = sbp_check(identity_system(6), "1/6", balls=[("0", "1/3")])
        assert not report.holds
        assert report.failures[0].shell_ocap == 1

    def test_positive_delta(self, rotation4):
        """δ must be positive."""
        with pytest.raises(ValueError, match="must be positive"):
            sbp_check(rotation4, 0)


class TestLsbp:
    """Partition of unity on the 12-point circle rotation."""

    @pytest.fixture
    def construction(self, rotation12):
        return lsbp_partition(rotation12, ROT, LSBP_PAIRS, "1/2", 12, "1/6")

    def test_certificate(self, construction):
        """Sum to one, subordinate, small boundary region."""
        partition, certificate = construction
        assert certificate.sum_to_one
        assert certificate.subordinate
        assert certificate.boundary_capacity == Fraction(1, 6)
        assert certificate.boundary_small
        assert certificate.ok

    def test_functions(self, construction):
        """φ values on the edge cells split evenly."""
        partition, _ = construction
        assert partition.boundary_region == frozenset({"6", "11"})
        assert partition.vector("6") == (Fraction(1, 2), Fraction(1, 2))
        assert partition.vector("2") == (1, 0)
        assert partition.vector("8") == (0, 1)
        for x in partition.carrier:
            assert sum(partition.vector(x)) == 1

    def test_support_inside_u(self, construction):
        """φ_j vanishes off U_j."""
        partition, _ = construction
        for label, (u, _) in zip(partition.labels, LSBP_PAIRS):
            support = {x for x, value in partition.functions[label].items() if value > 0}
            assert support <= set(u)

    def test_v_must_sit_in_u(self, rotation12):
        """Shrunk sets outside their pair are rejected."""
        with pytest.raises(DomainError, match="Pair 0: V is not contained in U"):
            lsbp_partition(rotation12, ROT, [(V0, U0)], "1/2", 4, "1/6")

    def test_t2_map(self, rotation12, construction):
        """f_N is compatible with the orbit join and within the open budget."""
        partition, _ = construction
        result = t2_map(rotation12, ROT, partition, 12, "1/2")
        assert result.compatibility.compatible
        assert result.budget == 12
        assert set(result.open_coordinates.values()) == {4}
        assert result.within_budget

    def test_t2_tight_budget(self, rotation12, construction):
        """A small ε leaves too few open coordinates."""
        partition, _ = construction
        result = t2_map(rotation12, ROT, partition, 12, "1/12")
        assert result.budget == pytest.approx(2)
        assert not result.within_budget


def test_identity_loops_are_full_cycles(rotation_plus_identity):
    """Self-loops from the identity make single points full cycles."""
    for x in rotation_plus_identity.space.points:
        assert ocap(rotation_plus_identity, [x], curve_horizons=()).value == 1
