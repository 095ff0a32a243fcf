"""
tests.ifs.test_ifs_model

Tests for partial maps, systems, the admissibility graph and the IFS test.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from app_ifs.generators import circle, rotation
from app_ifs.ifs_model import (
    build_graph,
    check_ifs,
    ifs_witness,
    make_system,
    satisfies_ifs_condition,
)
from app_ifs.models.system import PartialMap
from app_ifs.utils import ConfigurationError

from .conftest import line_model


@pytest.fixture
def three_points():
    return line_model([0, Fraction(1, 4), 1], ["a", "b", "c"])


class TestPartialMap:
    """Injectivity and domain checks."""

    def test_call_outside_domain(self):
        """Points outside the domain map to None."""
        v = PartialMap(id="v", pairs=(("a", "b"),))
        assert v("a") == "b"
        assert v("b") is None
        assert v.domain == frozenset({"a"})
        assert v.image == frozenset({"b"})

    def test_not_injective(self):
        """Two points with one image are rejected."""
        with pytest.raises(ConfigurationError, match="not injective"):
            PartialMap(id="v", pairs=(("a", "c"), ("b", "c")))

    def test_empty_domain(self):
        """A map needs at least one pair."""
        with pytest.raises(ConfigurationError, match="empty domain"):
            PartialMap(id="v", pairs=())

    def test_repeated_domain_point(self):
        """A domain point may appear once."""
        with pytest.raises(ConfigurationError, match="twice"):
            PartialMap(id="v", pairs=(("a", "b"), ("a", "c")))


class TestFunctionSystem:
    """System construction and lookups."""

    def test_points_outside_space(self, three_points):
        """Maps may only use points of the space."""
        with pytest.raises(ConfigurationError, match="outside the space: z"):
            make_system(three_points, [("v", [("a", "z")])])

    def test_duplicate_ids(self, three_points):
        """Map ids are unique."""
        with pytest.raises(ConfigurationError, match="Duplicate map ids"):
            make_system(three_points, [("v", [("a", "b")]), ("v", [("b", "a")])])

    def test_unknown_map(self, rotation4):
        """Looking up an unknown id is a configuration error."""
        with pytest.raises(ConfigurationError, match="Unknown map id 'w'"):
            rotation4.get_map("w")

    def test_step_table(self, stray_arrow):
        """Undefined steps are -1."""
        table = stray_arrow.step_table
        assert table.shape == (2, 3)
        assert list(table[0]) == [1, 0, -1]
        assert list(table[1]) == [-1, -1, 0]


class TestAdmissibilityGraph:
    """Edges and the infinite core."""

    def test_edges_are_labeled(self, stray_arrow):
        """Each pair becomes an edge keyed by its map id."""
        edges = set(build_graph(stray_arrow).edges)
        assert edges == {("a", "swap", "b"), ("b", "swap", "a"), ("c", "feed", "a")}

    def test_core_includes_feeders(self, stray_arrow):
        """Points that reach a cycle have infinite orbits."""
        assert stray_arrow.graph.infinite_core == frozenset({"a", "b", "c"})

    def test_dead_end_not_in_core(self, three_points):
        """A path that stops leaves the core empty."""
        fs = make_system(three_points, [("v", [("a", "b"), ("b", "c")])])
        assert fs.graph.infinite_core == frozenset()
        assert not fs.graph.core_mask.any()

    def test_self_loop(self, three_points):
        """A fixed point is a cycle of length one."""
        fs = make_system(three_points, [("fix", [("a", "a")]), ("in", [("b", "a")])])
        assert fs.graph.infinite_core == frozenset({"a", "b"})


class TestIfsCondition:
    """The witness-set condition."""

    def test_rotation_is_ifs(self, rotation4):
        """A bijection has the whole space as witness."""
        result = check_ifs(rotation4)
        assert result.is_ifs
        assert result.witness == frozenset(rotation4.space.points)
        assert result.finite_family

    def test_single_arrow_is_not_ifs(self, three_points):
        """a -> b with b outside every domain has no witness."""
        fs = make_system(three_points, [("v", [("a", "b")])])
        assert ifs_witness(fs) is None
        assert not check_ifs(fs).is_ifs

    def test_stray_arrow_keeps_feeder(self, stray_arrow):
        """c feeds into the swap and stays in the maximal witness."""
        assert ifs_witness(stray_arrow) == frozenset({"a", "b", "c"})

    def test_partial_deletion(self):
        """Only points whose image leaves the domains are removed."""
        space = line_model([0, 1, 2, 3], ["a", "b", "c", "d"])
        fs = make_system(space, [("swap", [("a", "b"), ("b", "a")]), ("out", [("c", "d")])])
        # d is in no domain, so c goes; d itself never violates anything.
        assert ifs_witness(fs) == frozenset({"a", "b", "d"})

    def test_satisfies_condition(self, rotation4):
        """The condition needs a nonempty image inside the set and the domains."""
        assert satisfies_ifs_condition(rotation4, rotation4.space.points)
        assert not satisfies_ifs_condition(rotation4, ["0"])
        assert not satisfies_ifs_condition(rotation4, [])

    def test_maximal_witness_satisfies_condition(self):
        """The returned witness passes the condition."""
        fs = make_system(circle(6), [rotation(6, 2), ("step", [("0", "1")])])
        witness = ifs_witness(fs)
        assert witness is not None
        assert satisfies_ifs_condition(fs, witness)
