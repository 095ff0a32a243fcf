"""
tests.ifs.test_loaders

Tests for reading space, system, cover and sequence descriptions.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import pytest

from app_ifs.generators import circle
from app_ifs.loaders import (
    load_cover,
    load_orbit_sequence,
    load_pairs,
    load_sigma,
    load_space,
    load_subset,
    load_system,
    read_document,
)
from app_ifs.utils import ConfigurationError


class TestSpaces:
    """Space descriptions."""

    def test_generator(self):
        """A generator mapping builds the named grid."""
        model = load_space({"name": "ring", "metric": {"generator": "circle", "n": 6}})
        assert model.size == 6
        assert model.name == "ring"

    def test_explicit_matrix(self):
        """Strings in the table become exact fractions."""
        model = load_space(
            {"points": ["a", "b"], "metric": [[0, "1/3"], ["1/3", 0]], "resolution": "1/6"}
        )
        assert model.dist("a", "b") == Fraction(1, 3)
        assert model.resolution == Fraction(1, 6)

    def test_missing_metric(self):
        """Points without a table are rejected."""
        with pytest.raises(ConfigurationError, match="explicit 'metric' matrix"):
            load_space({"points": ["a"]})

    def test_generator_needs_name(self):
        """A metric mapping names its generator."""
        with pytest.raises(ConfigurationError, match="needs a 'generator'"):
            load_space({"metric": {"n": 4}})

    def test_json_file(self, tmp_dir: Path):
        """JSON files go through the same parser."""
        path = tmp_dir / "space.json"
        path.write_text(json.dumps({"metric": {"generator": "circle", "n": 3}}))
        assert load_space(path).size == 3

    def test_missing_file(self, tmp_dir: Path):
        """Missing files raise FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            read_document(tmp_dir / "nope.yaml")

    def test_unparseable_file(self, tmp_dir: Path):
        """Broken YAML is a configuration error."""
        path = tmp_dir / "broken.yaml"
        path.write_text("a: [1, 2\n")
        with pytest.raises(ConfigurationError, match="Cannot parse"):
            read_document(path)


class TestSystems:
    """System descriptions."""

    def test_relative_space_and_mixed_maps(self, write_yaml):
        """Named generators and explicit pairs combine."""
        write_yaml("circle.yaml", {"metric": {"generator": "circle", "n": 4}})
        path = write_yaml(
            "system.yaml",
            {
                "name": "mixed",
                "space": "circle.yaml",
                "maps": [
                    "rotation(2)",
                    {"id": "swap", "pairs": [[0, 1], [1, 0]], "domain": [0, 1]},
                ],
            },
        )
        fs = load_system(path)
        assert fs.name == "mixed"
        assert [v.id for v in fs.maps] == ["rot2", "swap"]
        assert fs.get_map("swap")("0") == "1"

    def test_inline_space(self):
        """The space may be given inline."""
        fs = load_system(
            {"space": {"metric": {"generator": "circle", "n": 3}}, "maps": ["identity"]}
        )
        assert fs.get_map("id")("2") == "2"

    @pytest.mark.parametrize(
        "maps,message",
        [
            ([], "nonempty 'maps'"),
            ([{"id": "v"}], "needs 'id' and 'pairs'"),
            ([{"id": "v", "pairs": [[0, 1, 2]]}], "must be \\[x, y\\] lists"),
            ([{"id": "v", "pairs": [[0, 1]], "domain": [2]}], "does not match"),
            ([7], "Cannot read map entry"),
        ],
    )
    def test_bad_maps(self, maps, message):
        """Malformed map entries are configuration errors."""
        space = {"metric": {"generator": "circle", "n": 3}}
        with pytest.raises(ConfigurationError, match=message):
            load_system({"space": space, "maps": maps})

    def test_needs_space(self):
        """A system names its space."""
        with pytest.raises(ConfigurationError, match="needs a 'space'"):
            load_system({"maps": ["identity"]})


class TestAnalysisInputs:
    """Subsets, covers, pairs, σ and orbit sequences."""

    def test_subset(self):
        """Members are point ids of the model."""
        assert load_subset(circle(4), [0, "1"]) == frozenset({"0", "1"})
        with pytest.raises(ConfigurationError, match="unknown points: 7"):
            load_subset(circle(4), ["7"])
        with pytest.raises(ConfigurationError, match="list of points"):
            load_subset(circle(4), "0")

    def test_cover_forms(self):
        """Balls, labelled elements and plain lists."""
        model = circle(4)
        assert len(load_cover(model, {"balls": "1/2"})) == 4
        labelled = load_cover(model, {"elements": {"L": [0, 1], "R": [2, 3]}})
        assert labelled.labels == ["L", "R"]
        assert len(load_cover(model, [[0, 1, 2], [2, 3]])) == 2

    def test_cover_must_cover(self):
        """Every point of the space is covered."""
        with pytest.raises(ConfigurationError, match="uncovered: 3"):
            load_cover(circle(4), [[0, 1, 2]])

    def test_pairs(self):
        """U and V per entry."""
        pairs = load_pairs(circle(4), [{"U": [0, 1, 2], "V": [1]}])
        assert pairs == [(frozenset({"0", "1", "2"}), frozenset({"1"}))]
        with pytest.raises(ConfigurationError, match="needs 'U' and 'V'"):
            load_pairs(circle(4), [{"U": [0]}])

    def test_sigma(self):
        """σ strings and mappings parse."""
        assert load_sigma("const(rot1)").period == ("rot1",)
        assert load_sigma({"pre": ["a"], "period": ["b"]}).pre == ("a",)

    def test_orbit_sequence(self):
        """Segments in order, the last one possibly unbounded."""
        sequence = load_orbit_sequence(
            [
                {"point": 0, "sigma": "const(rot1)", "length": 2},
                {"point": "1", "sigma": "rot1", "length": 3, "unbounded": True},
            ]
        )
        assert sequence.lengths == (2, 3)
        assert sequence.segments[0].point == "0"
        assert sequence.truncated

    def test_orbit_sequence_fields(self):
        """Segments need point, sigma and length."""
        with pytest.raises(ConfigurationError, match="needs 'point', 'sigma' and 'length'"):
            load_orbit_sequence([{"point": "0", "length": 1}])
