"""
tests.ifs.test_gallery

Tests for the curated example systems and their expectations.
"""

from __future__ import annotations

import pytest

from app_ifs.gallery import (
    CHECKS,
    build_gallery,
    check_expectations,
    check_gallery,
    gallery_names,
    get_gallery_system,
    resolve_system,
)
from app_ifs.ifs_model import check_ifs
from app_ifs.models.gallery import Expectation, GallerySystem
from app_ifs.utils import ConfigurationError

# Systems whose checks need the larger shift windows run separately.
QUICK = [
    "full-shift-2-symbolic",
    "rotation-12",
    "identity",
    "two-cycles",
    "stray-arrow",
    "rotation-plus-identity",
    "power-family",
]


class TestCatalogue:
    """Names, lookups and expectation metadata."""

    def test_names_are_unique(self):
        """Every gallery system has its own name."""
        names = gallery_names()
        assert len(names) == len(set(names))
        assert "full-shift-2" in names

    def test_every_quantity_has_a_check(self):
        """No expectation is left without an estimator."""
        for entry in build_gallery():
            for expectation in entry.expectations:
                assert expectation.quantity in CHECKS

    def test_provenance_tags(self):
        """Only the two provenance tags are allowed."""
        with pytest.raises(ConfigurationError, match="Invalid provenance"):
            Expectation(quantity="ifs", value=True, provenance="GUESSED")
        with pytest.raises(ConfigurationError, match="non-negative"):
            Expectation(quantity="ifs", value=True, provenance="TRIVIAL", tolerance=-1)

    def test_unknown_name(self):
        """Unknown names list the choices."""
        with pytest.raises(ConfigurationError, match="Unknown gallery system 'moebius'"):
            get_gallery_system("moebius")

    def test_build_is_cached(self):
        """A system is built once per entry."""
        entry = get_gallery_system("identity")
        assert entry.build() is entry.build()

    @pytest.mark.parametrize("name", gallery_names())
    def test_systems_are_ifs(self, name):
        """Every curated system has a witness set."""
        assert check_ifs(get_gallery_system(name).build()).is_ifs


class TestExpectations:
    """Expected properties recomputed with their estimators."""

    @pytest.mark.parametrize("name", QUICK)
    def test_quick_systems(self, name):
        """Each expectation is met."""
        outcomes = check_expectations(get_gallery_system(name))
        assert outcomes
        failed = [(o.expectation.quantity, o.observed) for o in outcomes if not o.ok]
        assert failed == []

    @pytest.mark.slow
    def test_whole_gallery(self):
        """Every expectation of every system is met."""
        outcomes = check_gallery()
        assert {o.system for o in outcomes} == set(gallery_names())
        assert all(o.ok for o in outcomes)

    def test_missing_check(self, rotation4):
        """Expectations without an estimator are configuration errors."""
        entry = GallerySystem(
            name="odd",
            description="",
            parameters={},
            builder=lambda: rotation4,
            expectations=(Expectation(quantity="volume", value=1, provenance="TRIVIAL"),),
        )
        with pytest.raises(ConfigurationError, match="No check for quantity 'volume'"):
            check_expectations(entry)

    def test_failures_are_reported(self, rotation4):
        """A wrong expected value gives ok=False with the observed value."""
        entry = GallerySystem(
            name="wrong",
            description="",
            parameters={},
            builder=lambda: rotation4,
            expectations=(
                Expectation(
                    quantity="rigid_at",
                    value=3,
                    provenance="DERIVED",
                    params={"sigma": "const(rot1)", "m_max": 4},
                ),
            ),
        )
        [outcome] = check_expectations(entry)
        assert not outcome.ok
        assert outcome.observed == 4


class TestResolveSystem:
    """Choosing a system from a file or the gallery."""

    def test_gallery(self):
        """A gallery name builds that system."""
        assert resolve_system(gallery="two-cycles").name == "two-cycles"

    def test_file(self, write_yaml):
        """A description file is loaded."""
        path = write_yaml(
            "system.yaml",
            {"space": {"metric": {"generator": "circle", "n": 4}}, "maps": ["rotation"]},
        )
        assert resolve_system(system=str(path)).space.size == 4

    @pytest.mark.parametrize("kwargs", [{}, {"system": "a.yaml", "gallery": "identity"}])
    def test_exactly_one(self, kwargs):
        """Neither or both is an error."""
        with pytest.raises(ConfigurationError, match="exactly one"):
            resolve_system(**kwargs)
