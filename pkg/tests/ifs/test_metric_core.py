"""
tests.ifs.test_metric_core

Tests for metric models, balls, Hausdorff and Gromov–Hausdorff distances.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from app_ifs.config import get_config
from app_ifs.generators import circle, seq_window
from app_ifs.metric_core import (
    ball,
    diameter,
    gh_distance,
    glue_realization,
    hausdorff_distance,
    make_model,
    relabel,
    set_distance,
    verify_metric,
)
from app_ifs.models.metric import MetricSpaceModel
from app_ifs.utils import ConfigurationError, DomainError

from .conftest import line_model


def point_model() -> MetricSpaceModel:
    return make_model(["*"], [[0]], name="point")


MICRO_SPACES = [
    point_model(),
    line_model([0, Fraction(1, 2)], ["p", "q"], "pair"),
    circle(3),
    line_model([0, Fraction(1, 4), 1], ["a", "b", "c"], "line-3"),
    circle(4),
]


def brute_force_gh(first: MetricSpaceModel, second: MetricSpaceModel) -> Fraction:
    """Half the least distortion over every correspondence (as a relation)."""
    cells = list(itertools.product(range(first.size), range(second.size)))
    best = None
    for mask in range(1, 1 << len(cells)):
        relation = [cells[i] for i in range(len(cells)) if mask >> i & 1]
        if {x for x, _ in relation} != set(range(first.size)):
            continue
        if {y for _, y in relation} != set(range(second.size)):
            continue
        worst = Fraction(0)
        for (x, y), (x2, y2) in itertools.combinations(relation, 2):
            worst = max(worst, abs(first.matrix[x][x2] - second.matrix[y][y2]))
        if best is None or worst < best:
            best = worst
    return best / 2


class TestMakeModel:
    """Building models from raw tables."""

    def test_strings_become_fractions(self):
        """Rational strings give an exact model."""
        model = make_model(["a", "b"], [[0, "1/3"], ["1/3", 0]])
        assert model.exact
        assert model.dist("a", "b") == Fraction(1, 3)

    def test_default_resolution(self):
        """Resolution defaults to the least positive distance."""
        model = line_model([0, Fraction(1, 4), 1], ["a", "b", "c"])
        assert model.resolution == Fraction(1, 4)

    def test_point_ids_are_strings(self):
        """Numeric ids are converted to strings."""
        model = make_model([0, 1], [[0, 1], [1, 0]])
        assert model.points == ("0", "1")

    def test_bad_shape(self):
        """A ragged table is rejected."""
        with pytest.raises(ConfigurationError, match="must be 2x2"):
            make_model(["a", "b"], [[0, 1], [1]])

    def test_duplicate_points(self):
        """Duplicate ids are rejected."""
        with pytest.raises(ConfigurationError, match="Duplicate"):
            make_model(["a", "a"], [[0, 1], [1, 0]])

    def test_unknown_point(self):
        """Looking up an unknown point is a domain error."""
        with pytest.raises(DomainError, match="Unknown point"):
            circle(3).position("7")

    def test_relabel(self):
        """Relabelling prefixes every id and keeps distances."""
        model = relabel(circle(3), "L")
        assert model.points == ("L:0", "L:1", "L:2")
        assert model.dist("L:0", "L:1") == Fraction(1, 3)


class TestVerifyMetric:
    """Metric axiom checks."""

    @pytest.mark.parametrize("model", MICRO_SPACES + [seq_window(2, 3)])
    def test_generated_spaces_are_metrics(self, model):
        """Generated spaces satisfy every axiom."""
        assert verify_metric(model) == []

    def test_triangle_violation(self):
        """A shortcut through a third point is reported."""
        model = make_model(
            ["a", "b", "c"], [[0, 1, 3], [1, 0, 1], [3, 1, 0]]
        )
        axioms = {v.axiom for v in verify_metric(model)}
        assert axioms == {"triangle"}

    def test_symmetry_and_positivity(self):
        """Asymmetric and zero off-diagonal entries are both reported."""
        model = make_model(["a", "b", "c"], [[0, 1, 0], [2, 0, 1], [0, 1, 0]])
        axioms = {v.axiom for v in verify_metric(model)}
        assert "symmetry" in axioms
        assert "positivity" in axioms

    def test_identity(self):
        """A nonzero diagonal entry is reported."""
        model = make_model(["a", "b"], [[1, 1], [1, 0]])
        assert any(v.axiom == "identity" for v in verify_metric(model))


class TestBallsAndSets:
    """Balls, diameters and set distances."""

    def test_ball_is_open(self):
        """Points at exactly the radius are excluded."""
        model = circle(4)
        assert ball(model, "0", Fraction(1, 4)) == frozenset({"0"})
        assert ball(model, "0", Fraction(1, 2)) == frozenset({"0", "1", "3"})

    def test_diameter(self):
        """Diameter of the whole circle and of a single point."""
        model = circle(6)
        assert diameter(model, model.points) == Fraction(1, 2)
        assert diameter(model, ["3"]) == 0

    def test_set_distance(self):
        """Distance to a set is the least distance; None for the empty set."""
        model = circle(6)
        assert set_distance(model, "0", ["2", "5"]) == Fraction(1, 6)
        assert set_distance(model, "0", []) is None

    def test_hausdorff(self):
        """Hausdorff distance is the larger of the two one-sided values."""
        model = line_model([0, Fraction(1, 4), 1], ["a", "b", "c"])
        assert hausdorff_distance(model, ["a"], ["a", "c"]) == 1
        assert hausdorff_distance(model, ["a", "b"], ["b"]) == Fraction(1, 4)

    def test_hausdorff_empty(self):
        """Empty subsets are outside the domain."""
        with pytest.raises(DomainError, match="nonempty"):
            hausdorff_distance(circle(3), [], ["0"])


class TestGromovHausdorff:
    """Exact GH distances and their realizations."""

    def test_against_point(self):
        """d_GH(X, point) is half the diameter of X."""
        result = gh_distance(circle(4), point_model())
        assert result.exact
        assert result.distance == Fraction(1, 4)

    def test_isometric_copies(self):
        """Isometric spaces are at distance zero."""
        result = gh_distance(circle(4), relabel(circle(4), "copy"))
        assert result.distance == 0

    @pytest.mark.parametrize(
        "first,second",
        [(a, b) for a, b in itertools.combinations(MICRO_SPACES, 2) if a.size * b.size <= 12],
    )
    def test_matches_brute_force(self, first, second):
        """The exhaustive map search equals the search over all relations."""
        assert gh_distance(first, second).distance == brute_force_gh(first, second)

    @pytest.mark.parametrize("first,second", list(itertools.combinations(MICRO_SPACES, 2)))
    def test_symmetric(self, first, second):
        """d_GH(X, Y) = d_GH(Y, X)."""
        assert gh_distance(first, second).distance == gh_distance(second, first).distance

    @pytest.mark.parametrize("triple", list(itertools.combinations(MICRO_SPACES, 3)))
    def test_triangle(self, triple):
        """d_GH satisfies the triangle inequality on every triple."""
        x, y, z = triple
        d = {
            (a.name, b.name): gh_distance(a, b).distance
            for a, b in itertools.permutations(triple, 2)
        }
        assert d[(x.name, z.name)] <= d[(x.name, y.name)] + d[(y.name, z.name)]
        assert d[(x.name, y.name)] <= d[(x.name, z.name)] + d[(z.name, y.name)]
        assert d[(y.name, z.name)] <= d[(y.name, x.name)] + d[(x.name, z.name)]

    def test_realization_attains_distance(self):
        """The glued space is a metric in which the copies sit at Hausdorff distance d_GH."""
        first, second = circle(3), line_model([0, Fraction(1, 4), 1], ["a", "b", "c"])
        result = gh_distance(first, second)
        glued = result.realization.glued
        assert verify_metric(glued) == []
        left = [result.realization.embed_left[x] for x in first.points]
        right = [result.realization.embed_right[y] for y in second.points]
        assert hausdorff_distance(glued, left, right) == result.distance

    def test_over_cap_gives_bounds(self):
        """Past the exact cap the result is flagged and bracketed."""
        result = gh_distance(circle(5), circle(6), max_points=8)
        assert not result.exact
        assert result.lower <= result.distance

    def test_cap_follows_settings(self, write_yaml):
        """Without an explicit cap the gh_exact_points budget applies."""
        get_config(write_yaml("small.yaml", {"budgets": {"gh_exact_points": 4}}))
        assert not gh_distance(circle(3), circle(3)).exact
        assert gh_distance(circle(3), circle(3), max_points=6).exact
        assert not glue_realization([circle(3), circle(4)]).optimal


class TestGlueRealization:
    """Gluing several models in a row."""

    def test_consecutive_copies(self):
        """Each embedding keeps distances of its own model."""
        models = [circle(3), circle(4)]
        glued = glue_realization(models)
        assert glued.optimal
        assert verify_metric(glued.model) == []
        for model, embedding in zip(models, glued.embeddings):
            for x, y in itertools.combinations(model.points, 2):
                assert glued.model.dist(embedding[x], embedding[y]) == model.dist(x, y)

    def test_identical_models_merge(self):
        """Gluing a space to an isometric copy identifies the points."""
        glued = glue_realization([circle(3), circle(3)])
        assert glued.model.size == 3

    def test_empty(self):
        """At least one model is needed."""
        with pytest.raises(DomainError, match="at least one model"):
            glue_realization([])
