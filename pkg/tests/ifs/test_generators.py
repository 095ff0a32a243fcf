"""
tests.ifs.test_generators

Tests for the space and map generators.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from app_ifs.generators import (
    build_named_maps,
    build_named_space,
    cat_map,
    circle,
    compose,
    cube_grid,
    cyclic_shift,
    doubling_branches,
    power,
    rotation,
    seq_window,
    shift_maps,
    torus_grid,
    transport,
)
from app_ifs.models.system import PartialMap
from app_ifs.utils import ConfigurationError


class TestSpaces:
    """Grid models of the circle, torus, cube and shift windows."""

    def test_circle_is_arc_length(self):
        """Distances wrap around."""
        model = circle(4)
        assert model.dist("0", "1") == Fraction(1, 4)
        assert model.dist("0", "3") == Fraction(1, 4)
        assert model.dist("0", "2") == Fraction(1, 2)
        assert model.resolution == Fraction(1, 4)

    def test_torus_uses_max_distance(self):
        """The larger of the two circle distances."""
        model = torus_grid(4)
        assert model.size == 16
        assert model.dist("0,0", "1,2") == Fraction(1, 2)

    def test_cube_grid(self):
        """Levels are evenly spaced in [0, 1]."""
        model = cube_grid(3, 2)
        assert model.size == 9
        assert model.dist("0,0", "2,1") == 1
        assert model.resolution == Fraction(1, 2)
        with pytest.raises(ConfigurationError, match="at least 2 levels"):
            cube_grid(1)

    def test_seq_window_weights(self):
        """Position i weighs 2^-i."""
        model = seq_window(2, 3)
        assert model.size == 8
        assert model.dist("000", "100") == 1
        assert model.dist("000", "010") == Fraction(1, 2)
        assert model.dist("000", "001") == Fraction(1, 4)
        assert model.resolution == Fraction(1, 4)

    def test_graded_window(self):
        """Graded symbols differ by their level gap."""
        model = seq_window(3, 1, graded=True)
        assert model.dist("0", "1") == Fraction(1, 2)
        assert model.dist("0", "2") == 1


class TestMaps:
    """Map builders."""

    def test_rotation(self):
        """i goes to i + k."""
        map_id, pairs = rotation(5, 2)
        assert map_id == "rot2"
        assert ("4", "1") in pairs

    def test_cat_map(self):
        """(i, j) goes to (2i + j, i + j)."""
        _, pairs = cat_map(4)
        assert dict(pairs)["1,0"] == "2,1"
        assert len(set(dict(pairs).values())) == 16

    def test_shift_branches(self):
        """Each word lies in q branch domains."""
        maps = dict(shift_maps(2, 2))
        assert set(maps) == {"shift:0:0", "shift:0:1", "shift:1:0", "shift:1:1"}
        assert dict(maps["shift:0:1"]) == {"00": "01", "01": "11"}

    def test_cyclic_shift(self):
        """The period rotates."""
        _, pairs = cyclic_shift(2, 3)
        assert dict(pairs)["011"] == "110"

    def test_doubling_branches(self):
        """Halving on even points, shifted halving on odd points."""
        branches = dict(doubling_branches(9))
        assert dict(branches["half"]) == {"0": "0", "2": "1", "4": "2", "6": "3", "8": "4"}
        assert dict(branches["half_shift"]) == {"1": "5", "3": "6", "5": "7", "7": "8"}
        with pytest.raises(ConfigurationError, match="odd grid"):
            doubling_branches(8)

    def test_power_and_compose(self):
        """v^2 equals v composed with itself."""
        map_id, pairs = rotation(6, 1)
        v = PartialMap(id=map_id, pairs=tuple(pairs))
        map_id, pairs = power(v, 2)
        assert map_id == "rot1^2"
        assert dict(pairs) == dict(compose(v, v, "twice")[1])
        assert dict(pairs)["5"] == "1"

    def test_compose_empty(self):
        """Compositions that are nowhere defined are rejected."""
        first = PartialMap(id="f", pairs=(("a", "b"),))
        second = PartialMap(id="g", pairs=(("c", "d"),))
        with pytest.raises(ConfigurationError, match="empty domain"):
            compose(first, second, "gf")

    def test_transport(self):
        """Pairs follow the embedding."""
        spec = transport(("v", [("0", "1")]), {"0": "x:0", "1": "x:1"})
        assert spec == ("v", [("x:0", "x:1")])


class TestNamedBuilders:
    """Generator names as used in description files."""

    def test_named_space(self):
        """Parameters pass through."""
        assert build_named_space("circle", n=6).size == 6
        assert build_named_space("seq_window", q=2, window=2).size == 4

    def test_unknown_space(self):
        """Unknown names list the choices."""
        with pytest.raises(ConfigurationError, match="Must be one of"):
            build_named_space("sphere", n=3)

    def test_bad_parameters(self):
        """Missing or unknown parameters are configuration errors."""
        with pytest.raises(ConfigurationError, match="Bad parameters for 'circle'"):
            build_named_space("circle", size=3)

    @pytest.mark.parametrize(
        "name,count,first_id",
        [("rotation", 1, "rot1"), ("rotation(3)", 1, "rot3"), ("identity", 1, "id")],
    )
    def test_circle_maps(self, name, count, first_id):
        """Rotations and the identity on a circle."""
        space = circle(6)
        specs = build_named_maps(name, space, {"name": "circle", "params": {"n": 6}})
        assert len(specs) == count
        assert specs[0][0] == first_id

    def test_maps_need_matching_space(self):
        """A shift needs a sequence window."""
        with pytest.raises(ConfigurationError, match="shift needs a seq_window space"):
            build_named_maps("shift", circle(4), {"name": "circle", "params": {"n": 4}})

    def test_unknown_map(self):
        """Unknown map generators are rejected."""
        with pytest.raises(ConfigurationError, match="Unknown map generator 'twist'"):
            build_named_maps("twist", circle(4), {"name": "circle", "params": {"n": 4}})
