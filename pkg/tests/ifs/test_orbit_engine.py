"""
tests.ifs.test_orbit_engine

Tests for symbol sequences, orbit evaluation and prefix enumeration.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from app_ifs.generators import circle, rotation
from app_ifs.ifs_model import make_system
from app_ifs.models.orbit import SigmaGenerator
from app_ifs.orbit_engine import (
    bowen_ball,
    certified_horizon,
    complete_sigma,
    enumerate_prefixes,
    evaluate,
    evaluate_window,
    extend_prefix,
    joint_distance,
    orbit_trace,
    shift_sigma,
    sigma_sigma,
    sigma_x_prefixes,
)
from app_ifs.utils import ConfigurationError, DomainError

from .conftest import line_model

ROT = SigmaGenerator.const("rot1")


class TestSigmaGenerator:
    """Parsing and indexing of eventually periodic sequences."""

    @pytest.mark.parametrize(
        "text,pre,period",
        [
            ("const(v)", (), ("v",)),
            ("a,b|c", ("a", "b"), ("c",)),
            ("c, d", (), ("c", "d")),
            ({"pre": ["a"], "period": ["b", "c"]}, ("a",), ("b", "c")),
            ({"const": "w"}, (), ("w",)),
        ],
    )
    def test_parse(self, text, pre, period):
        """Every accepted form gives the same structure."""
        sigma = SigmaGenerator.parse(text)
        assert sigma.pre == pre
        assert sigma.period == period

    @pytest.mark.parametrize("bad", ["a|b|c", "a,,b", "a|", "", {"pre": ["a"]}, 3])
    def test_parse_rejects(self, bad):
        """Malformed descriptions are configuration errors."""
        with pytest.raises(ConfigurationError):
            SigmaGenerator.parse(bad)

    def test_symbols_are_numbered_from_one(self):
        """symbol(1) is the first map applied, then the period repeats."""
        sigma = SigmaGenerator.parse("a|b,c")
        assert sigma.symbols(0, 5) == ["a", "b", "c", "b", "c"]
        with pytest.raises(ConfigurationError, match=">= 1"):
            sigma.symbol(0)

    def test_shifted(self):
        """Shifting past the preperiod rotates the period."""
        sigma = SigmaGenerator.parse("a|b,c")
        assert sigma.shifted(1) == SigmaGenerator(pre=(), period=("b", "c"))
        assert sigma.shifted(2) == SigmaGenerator(pre=(), period=("c", "b"))
        assert sigma.shifted(2).symbols(0, 3) == sigma.symbols(2, 5)

    def test_shift_sigma(self):
        """The engine-level shift drops the first n symbols."""
        sigma = SigmaGenerator.parse("a|b,c")
        assert shift_sigma(sigma, 0) == sigma
        assert shift_sigma(sigma, 3).symbols(0, 4) == sigma.symbols(3, 7)
        with pytest.raises(ConfigurationError, match="non-negative"):
            shift_sigma(sigma, -1)

    def test_describe(self):
        """Descriptions parse back to the same generator."""
        for text in ["const(v)", "a,b|c", "c,d"]:
            sigma = SigmaGenerator.parse(text)
            assert SigmaGenerator.parse(sigma.describe()) == sigma


class TestEvaluate:
    """Composition of maps along σ."""

    def test_rotation(self, rotation4):
        """Three steps of the rotation."""
        assert evaluate(rotation4, "0", ROT, 3) == "3"
        assert evaluate(rotation4, "2", ROT, 0) == "2"

    def test_window(self, rotation4):
        """Steps a+1..b only."""
        sigma = SigmaGenerator.parse("rot1")
        assert evaluate_window(rotation4, "0", sigma, 2, 4) == "2"
        with pytest.raises(ValueError):
            evaluate_window(rotation4, "0", sigma, 3, 2)

    def test_undefined(self, stray_arrow):
        """Leaving a domain gives None."""
        assert evaluate(stray_arrow, "c", SigmaGenerator.parse("feed|swap"), 2) == "b"
        assert evaluate(stray_arrow, "a", SigmaGenerator.const("feed"), 1) is None

    def test_unknown_map(self, rotation4):
        """σ may only name the system's maps."""
        with pytest.raises(ConfigurationError, match="Unknown map id"):
            evaluate(rotation4, "0", SigmaGenerator.const("nope"), 1)

    def test_orbit_trace(self, rotation4, stray_arrow):
        """A horizon of n visits n points."""
        assert orbit_trace(rotation4, "0", ROT, 3) == ("0", "1", "2")
        assert orbit_trace(stray_arrow, "c", ["feed", "swap"], 3) == ("c", "a", "b")
        assert orbit_trace(stray_arrow, "c", ["feed"], 3) is None


class TestSigmaSigma:
    """Points on which σ is defined forever."""

    def test_certified_horizon(self, stray_arrow):
        """Preperiod plus points times period."""
        assert certified_horizon(stray_arrow, SigmaGenerator.parse("feed|swap")) == 4

    def test_swap_carrier(self, stray_arrow):
        """Only the swap pair survives const(swap)."""
        assert sigma_sigma(stray_arrow, SigmaGenerator.const("swap")) == frozenset({"a", "b"})

    def test_empty_carrier(self, stray_arrow):
        """const(feed) dies after one step everywhere."""
        assert sigma_sigma(stray_arrow, SigmaGenerator.const("feed")) == frozenset()

    def test_preperiod(self, stray_arrow):
        """A feed step then swaps keeps only c."""
        sigma = SigmaGenerator.parse("feed|swap")
        assert sigma_sigma(stray_arrow, sigma) == frozenset({"c"})


class TestEnumeratePrefixes:
    """Vectorised prefix tables."""

    def test_all_words(self, rotation_plus_identity):
        """Two maps, four starts, horizon 3: sixteen distinct traces."""
        table = enumerate_prefixes(rotation_plus_identity, 3)
        assert len(table) == 16
        assert table.horizon == 3
        assert table.extendable.all()

    def test_dedupe_keeps_least_word(self):
        """Maps with equal action collapse to the least symbol word."""
        fs = make_system(circle(4), [rotation(4, 1, "a"), rotation(4, 1, "b")])
        table = enumerate_prefixes(fs, 3)
        assert len(table) == 4
        assert {p.symbols for p in table.prefixes()} == {("a", "a")}
        assert len(enumerate_prefixes(fs, 3, dedupe=False)) == 16

    def test_with_sigma(self, stray_arrow):
        """A fixed σ gives one prefix per start that survives."""
        sigma = SigmaGenerator.const("swap")
        table = enumerate_prefixes(stray_arrow, 3, sigma=sigma)
        assert [p.trace for p in table.prefixes()] == [("a", "b", "a"), ("b", "a", "b")]

    def test_extendable_without_sigma(self):
        """Prefixes into a dead end are not extendable."""
        space = line_model([0, Fraction(1, 4), 1], ["a", "b", "c"])
        fs = make_system(space, [("v", [("a", "b"), ("b", "c")])])
        assert len(enumerate_prefixes(fs, 2)) == 2
        assert not enumerate_prefixes(fs, 2).extendable.any()
        assert len(enumerate_prefixes(fs, 2, require_extendable=True)) == 0

    def test_row_budget(self, rotation_plus_identity):
        """Tables past the row budget abort."""
        with pytest.raises(DomainError, match="exceeds the budget"):
            enumerate_prefixes(rotation_plus_identity, 4, max_rows=10)

    def test_sigma_x_prefixes(self, rotation_plus_identity):
        """One prefix per word from a single start."""
        prefixes = sigma_x_prefixes(rotation_plus_identity, "0", 3)
        assert len(prefixes) == 4
        assert all(p.start == "0" for p in prefixes)


class TestDistancesAndBalls:
    """Joint orbit distances and dynamical balls."""

    def test_joint_distance(self, rotation4):
        """Parallel rotations stay a quarter apart."""
        assert joint_distance(rotation4, ("0", ROT), ("1", ROT), 3) == Fraction(1, 4)

    def test_joint_distance_mixed(self, rotation_plus_identity):
        """Rotation against identity drifts apart."""
        rot, idle = SigmaGenerator.const("rot1"), SigmaGenerator.const("id")
        assert joint_distance(rotation_plus_identity, ("0", rot), ("0", idle), 3) == Fraction(1, 2)

    def test_joint_distance_undefined(self, stray_arrow):
        """Undefined orbits are outside the domain."""
        with pytest.raises(DomainError, match="undefined"):
            joint_distance(
                stray_arrow, ("c", ["feed"]), ("a", SigmaGenerator.const("swap")), 3
            )

    def test_bowen_ball(self, rotation4):
        """The open ball of radius 1/2 keeps both neighbours."""
        assert bowen_ball(rotation4, ROT, "0", 3, Fraction(1, 2)) == frozenset({"0", "1", "3"})
        assert bowen_ball(rotation4, ROT, "0", 3, Fraction(1, 4)) == frozenset({"0"})

    def test_bowen_ball_outside_carrier(self, stray_arrow):
        """The centre must lie in Σ_σ."""
        with pytest.raises(DomainError, match="not in Σ_σ"):
            bowen_ball(stray_arrow, SigmaGenerator.const("swap"), "c", 2, 1)


class TestContinuations:
    """Least continuations inside the infinite core."""

    def test_extend_prefix(self, stray_arrow):
        """The first map staying in the core is used at each step."""
        symbols, trace = extend_prefix(stray_arrow, "c", 3)
        assert symbols == ("feed", "swap", "swap")
        assert trace == ("c", "a", "b", "a")

    def test_extend_outside_core(self):
        """Points without infinite orbits cannot be extended."""
        space = line_model([0, 1], ["a", "b"])
        fs = make_system(space, [("v", [("a", "b")])])
        with pytest.raises(DomainError, match="no infinite admissible orbit"):
            extend_prefix(fs, "a", 1)

    def test_complete_sigma(self, stray_arrow):
        """The continuation closes into a period."""
        sigma = complete_sigma(stray_arrow, "c", ["feed"])
        assert sigma.pre == ("feed",)
        assert sigma.period == ("swap", "swap")
        assert "c" in sigma_sigma(stray_arrow, sigma)
