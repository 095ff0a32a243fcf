"""
tests.ifs.test_reports

Tests for the report runner and its output files.
"""

from __future__ import annotations

import json
from pathlib import Path

import pandas as pd
import pytest

from app_ifs.config import RunConfig
from app_ifs.reports import EXIT_INVARIANT, EXIT_OK, SCHEMA_VERSION, run_report
from app_ifs.utils import ConfigurationError


@pytest.fixture
def corrupted_system(write_yaml) -> Path:
    """Three points whose table breaks the triangle inequality."""
    return write_yaml(
        "corrupted.yaml",
        {
            "space": {"points": ["a", "b", "c"], "metric": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]},
            "maps": [{"id": "swap", "pairs": [["a", "b"], ["b", "a"]]}],
        },
    )


def read_summary(out: Path) -> dict:
    return json.loads((out / "summary.json").read_text())


class TestRunReport:
    """Bundles written by run_report."""

    def test_files(self, tmp_dir: Path):
        """Counts, plot data and a summary with the schema version."""
        config = RunConfig(gallery="identity", n_grid=[1, 2, 3], eps_grid=["1/2", "1/4"])
        bundle = run_report(config, tmp_dir)
        assert bundle.exit_code == EXIT_OK
        names = {p.relative_to(tmp_dir).as_posix() for p in bundle.files}
        assert names == {
            "counts.csv",
            "plot_data/eps_1_2.csv",
            "plot_data/eps_1_4.csv",
            "summary.json",
        }
        summary = read_summary(tmp_dir)
        assert summary["schema_version"] == SCHEMA_VERSION
        assert summary["system"]["name"] == "identity"
        assert summary["offset_convention"] == "definition"

    def test_identity_has_zero_entropy(self, tmp_dir: Path):
        """Constant orbits give a zero rate."""
        config = RunConfig(gallery="identity", n_grid=[1, 2, 3], eps_grid=["1/4"])
        run_report(config, tmp_dir)
        results = read_summary(tmp_dir)["results"]
        assert results["entropy"]["estimate"] == 0.0
        assert results["check"]["is_ifs"]

    def test_counts_table(self, tmp_dir: Path):
        """One row per (n, ε) with exactness flags."""
        config = RunConfig(gallery="identity", n_grid=[1, 2], eps_grid=["1/6"])
        run_report(config, tmp_dir)
        frame = pd.read_csv(tmp_dir / "counts.csv")
        assert list(frame.columns) == [
            "n",
            "eps",
            "separated",
            "separated_exact",
            "spanning",
            "spanning_exact",
        ]
        assert list(frame["separated"]) == [6, 6]

    def test_deterministic(self, tmp_dir: Path):
        """The same run twice writes identical bytes."""
        config = RunConfig(
            gallery="rotation-plus-identity",
            analyses=["check", "entropy", "gop"],
            n_grid=[1, 2, 3],
            eps_grid=["1/4"],
            gop_max_gap=2,
            gop_sequences=3,
        )
        first, second = tmp_dir / "first", tmp_dir / "second"
        run_report(config, first)
        run_report(config, second)
        for name in ["counts.csv", "summary.json", "plot_data/eps_1_4.csv"]:
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_corrupted_metric_exits_with_invariant_code(self, tmp_dir: Path, corrupted_system):
        """A broken metric stops the run with exit code 2."""
        bundle = run_report(RunConfig(system=str(corrupted_system)), tmp_dir / "out")
        assert bundle.exit_code == EXIT_INVARIANT
        summary = read_summary(tmp_dir / "out")
        assert summary["exit_code"] == EXIT_INVARIANT
        assert summary["metric_violations"][0]["axiom"] == "triangle"
        assert summary["results"] == {}
        assert not (tmp_dir / "out" / "counts.csv").exists()

    def test_ocap_sets(self, tmp_dir: Path):
        """Named sets get their orbit capacity."""
        config = RunConfig(gallery="stray-arrow", analyses=["ocap"], sets={"feeder": ["c"]})
        run_report(config, tmp_dir)
        result = read_summary(tmp_dir)["results"]["ocap"]["feeder"]
        assert result["value"] == "0"
        assert result["defined"]

    def test_theorem1_chain(self, tmp_dir: Path):
        """The dimension chain holds for rotation plus identity."""
        config = RunConfig(
            gallery="rotation-plus-identity",
            analyses=["theorem1"],
            n_grid=[1, 2, 3],
            eps_grid=["1/2", "1/4", "1/8"],
            sigma_sample=["const(rot1)"],
        )
        bundle = run_report(config, tmp_dir)
        assert bundle.exit_code == EXIT_OK
        assert read_summary(tmp_dir)["results"]["theorem1"]["holds"]

    @pytest.mark.parametrize(
        "analysis,message", [("mdim", "needs 'cover_radius'"), ("sbp", "needs 'delta'")]
    )
    def test_missing_parameters(self, tmp_dir: Path, analysis, message):
        """Analyses that need extra inputs say so."""
        with pytest.raises(ConfigurationError, match=message):
            run_report(RunConfig(gallery="identity", analyses=[analysis]), tmp_dir)
