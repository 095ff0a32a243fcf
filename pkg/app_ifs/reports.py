"""
app_ifs.reports

Run the analyses named in a RunConfig and write the report bundle: a CSV
count table, a JSON summary and two-column plot-data files.

Reports carry no timestamps. The same RunConfig gives byte-identical files.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from .capacity_sbp import ocap, sbp_check
from .complexity_estimators import count_grid, entropy_estimate, mmdim_estimate, theorem1_chain
from .config import RunConfig, get_config
from .cover_dimension import ball_cover, mdim_estimate
from .gallery import resolve_system
from .gluing_orbit import gop_estimate
from .ifs_model import check_ifs
from .loaders import load_sigma, load_subset
from .metric_core import verify_metric
from .models.counts import CountGrid
from .models.orbit import SigmaGenerator
from .models.system import FunctionSystem
from .utils.numeric import as_number, to_json_number
from .utils.validation import ConfigurationError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2


@dataclass
class ReportBundle:
    """Files written by one run, the summary payload and the exit code."""

    summary: Dict[str, Any]
    files: List[Path] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)
    grid: Optional[CountGrid] = None

    @property
    def exit_code(self) -> int:
        return EXIT_INVARIANT if self.violations else EXIT_OK


def _label(eps) -> str:
    return str(to_json_number(eps)).replace("/", "_")


def _float(value: Optional[float]):
    if value is None:
        return None
    if math.isinf(value):
        return "inf"
    return round(float(value), 12)


def counts_frame(grid: CountGrid) -> pd.DataFrame:
    rows = []
    for (n, eps), entry in sorted(grid.entries.items()):
        span = entry.spanning
        rows.append(
            {
                "n": n,
                "eps": to_json_number(eps),
                "separated": entry.separated.count,
                "separated_exact": entry.separated.exact,
                "spanning": span.count if span is not None else None,
                "spanning_exact": span.exact if span is not None else None,
            }
        )
    return pd.DataFrame(
        rows,
        columns=["n", "eps", "separated", "separated_exact", "spanning", "spanning_exact"],
    )


def plot_frames(grid: CountGrid) -> Dict[str, pd.DataFrame]:
    """One (n, log_count) series per radius, keyed by a file-safe ε label."""
    frames: Dict[str, pd.DataFrame] = {}
    for eps in grid.radii:
        rows = [
            {"n": n, "log_count": round(math.log(grid.separated(n, eps).count), 12)}
            for n in grid.horizons
            if grid.separated(n, eps).count > 0
        ]
        frames[_label(eps)] = pd.DataFrame(rows, columns=["n", "log_count"])
    return frames


def _sigmas(config: RunConfig) -> List[SigmaGenerator]:
    return [load_sigma(s) for s in config.sigma_sample]


def _run_analyses(
    fs: FunctionSystem, config: RunConfig, results: Dict[str, Any]
) -> Tuple[Optional[CountGrid], List[str]]:
    """Fill ``results``; return (count grid or None, invariant violations)."""
    violations: List[str] = []
    grid: Optional[CountGrid] = None
    needs_counts = {"entropy", "mmdim"} & set(config.analyses)
    if needs_counts:
        grid = count_grid(fs, config.n_grid, config.eps_grid, config.mode)
        violations.extend(grid.violations())

    if "check" in config.analyses:
        ifs = check_ifs(fs)
        results["check"] = {
            "is_ifs": ifs.is_ifs,
            "witness": sorted(ifs.witness) if ifs.witness else [],
            "infinite_core": sorted(fs.graph.infinite_core),
        }

    if "entropy" in config.analyses:
        report = entropy_estimate(fs, config.n_grid, config.eps_grid, config.mode, grid=grid)
        results["entropy"] = {
            "estimate": _float(report.entropy),
            "method": report.method,
            "exact": report.exact,
            "per_eps": {
                str(to_json_number(r.eps)): _float(r.slope.slope) for r in report.rates
            },
        }

    if "mmdim" in config.analyses:
        report = mmdim_estimate(
            fs, config.n_grid, config.eps_grid, config.mode, sigmas=_sigmas(config), grid=grid
        )
        results["mmdim"] = {
            "umdim": _float(report.umdim),
            "lmdim": _float(report.lmdim),
            "omdim": _float(report.omdim),
            "omdim_by_sigma": {k: _float(v) for k, v in report.omdim_by_sigma.items()},
            "limit_radii": [to_json_number(e) for e in report.limit_radii],
            "exact": report.exact,
        }

    mdim_value = 0.0
    if "mdim" in config.analyses:
        if config.cover_radius is None:
            raise ConfigurationError("The mdim analysis needs 'cover_radius'")
        sigmas = _sigmas(config) or [SigmaGenerator.const(fs.maps[0].id)]
        alpha = ball_cover(fs.space, config.cover_radius)
        per_sigma = {}
        for sigma in sigmas:
            report = mdim_estimate(
                fs, sigma, [alpha], config.n_grid, floors=(config.pool_floor,), mode=config.mode
            )
            per_sigma[sigma.describe()] = {
                "estimate": _float(report.estimate),
                "values": {
                    str(n): report.values[(0, n)] for n in sorted({n for _, n in report.values})
                },
                "exact": report.exact,
                "pool_restricted": report.pool_restricted,
            }
            mdim_value = max(mdim_value, report.estimate)
        results["mdim"] = {"estimate": _float(mdim_value), "by_sigma": per_sigma}

    if "ocap" in config.analyses:
        results["ocap"] = {}
        for name, members in sorted(config.sets.items()):
            result = ocap(fs, load_subset(fs.space, members))
            results["ocap"][name] = {
                "value": to_json_number(result.value),
                "defined": result.defined,
                "curve": {str(n): to_json_number(v) for n, v in sorted(result.curve.items())},
            }

    if "sbp" in config.analyses:
        if config.delta is None:
            raise ConfigurationError("The sbp analysis needs 'delta'")
        report = sbp_check(fs, config.delta)
        results["sbp"] = {
            "delta": to_json_number(as_number(config.delta)),
            "holds": report.holds,
            "failures": [
                {"center": e.center, "radius": to_json_number(e.radius)}
                for e in report.failures
            ],
        }

    if "gop" in config.analyses:
        entries = gop_estimate(
            fs,
            config.gop_eps or config.eps_grid,
            max_M=config.gop_max_gap,
            count=config.gop_sequences,
            seed=config.seed,
        )
        results["gop"] = [
            {
                "eps": to_json_number(e.eps),
                "M": e.M,
                "holds": e.holds,
                "incomplete": e.incomplete,
                "certificate": e.certificate.to_dict() if e.certificate else None,
            }
            for e in entries
        ]

    if "theorem1" in config.analyses:
        report = theorem1_chain(
            fs, config.n_grid, config.eps_grid, _sigmas(config), config.mode, mdim=mdim_value
        )
        results["theorem1"] = {
            "holds": report.holds,
            "mdim": _float(report.mdim),
            "lmdim": _float(report.lmdim),
            "umdim": _float(report.umdim),
            "omdim": _float(report.omdim),
            "violations": report.violations,
        }
        violations.extend(report.violations)
    return grid, violations


def run_report(config: RunConfig, output_dir: Optional[Path] = None) -> ReportBundle:
    """
    Execute every requested analysis and write the bundle.

    A metric that fails verify_metric stops the run before any analysis and
    is reported as an invariant violation.

    :param config: Validated RunConfig
    :param output_dir: Overrides ``config.output``
    :return: ReportBundle (exit code 2 when any invariant was violated)
    :raises ConfigurationError: On unknown systems, sets or bad grids
    """
    settings = get_config()
    fs = resolve_system(config.system, config.gallery)
    out = Path(output_dir or config.output)
    out.mkdir(parents=True, exist_ok=True)

    summary: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": settings.app.version,
        "system": {
            "name": fs.name,
            "points": fs.space.size,
            "maps": [v.id for v in fs.maps],
        },
        "finite_family": True,
        "index_convention": "0..n-1",
        "ocap_excludes_empty_sigma_x": True,
        "offset_convention": settings.estimators.offset_convention,
        "seed": config.seed,
        "config": config.to_dict(),
        "results": {},
    }
    bundle = ReportBundle(summary=summary)

    metric_violations = verify_metric(fs.space)
    if metric_violations:
        logger.warning("Metric of '%s' violates %d axioms", fs.name, len(metric_violations))
        summary["metric_violations"] = [
            {"axiom": v.axiom, "points": list(v.points), "detail": v.detail}
            for v in metric_violations
        ]
        bundle.violations = [f"metric {v.axiom}: {v.detail}" for v in metric_violations]
    else:
        grid, violations = _run_analyses(fs, config, summary["results"])
        bundle.violations = violations
        bundle.grid = grid
        if grid is not None:
            csv_path = out / settings.output.csv_name
            counts_frame(grid).to_csv(csv_path, index=False)
            bundle.files.append(csv_path)
            plot_dir = out / settings.output.plot_data_dir
            plot_dir.mkdir(parents=True, exist_ok=True)
            for label, frame in plot_frames(grid).items():
                path = plot_dir / f"eps_{label}.csv"
                frame.to_csv(path, index=False)
                bundle.files.append(path)

    summary["violations"] = bundle.violations
    summary["exit_code"] = bundle.exit_code
    summary_path = out / settings.output.summary_name
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    bundle.files.append(summary_path)
    logger.info("Report for '%s' written to %s (exit %d)", fs.name, out, bundle.exit_code)
    return bundle
