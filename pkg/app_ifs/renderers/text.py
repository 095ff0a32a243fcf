"""
app_ifs.renderers.text

Plain-text lines for rate reports, gallery outcomes, construction
certificates and report summaries.
"""

from __future__ import annotations

from typing import Any, Dict, Iterable, List

from rich.markup import escape

from ..models.counts import RateReport
from ..models.gallery import ExpectationOutcome, GallerySystem
from ..models.gluing import Theorem3Certificate
from ..utils.numeric import to_json_number


def render_rate_report(report: RateReport, label: str = "entropy") -> List[str]:
    """Format per-radius rates and the combined estimates as text."""
    lines: List[str] = []
    headline = report.entropy if label == "entropy" else report.umdim
    lines.append(
        f"{label}: {headline:.6f} ({report.method}"
        f"{'' if report.exact else ', from bounds'})"
    )
    for rate in report.rates:
        flag = "" if rate.exact else " *"
        lines.append(
            f"  eps={to_json_number(rate.eps)}: slope {rate.slope.slope:.6f}, "
            f"growth {rate.growth:.6f}{flag}"
        )
    if label != "entropy":
        lines.append(f"  umdim {report.umdim:.6f}  lmdim {report.lmdim:.6f}")
        if report.omdim is not None:
            lines.append(f"  omdim {report.omdim:.6f}")
    if not report.exact:
        lines.append("  * some counts are bounds (greedy fallback)")
    return lines


def render_expectations(entry: GallerySystem) -> str:
    """``quantity=value [PROVENANCE]`` pairs, escaped for rich markup."""
    return escape(
        ", ".join(f"{e.quantity}={e.value} [{e.provenance}]" for e in entry.expectations)
    )


def render_outcomes(outcomes: Iterable[ExpectationOutcome]) -> List[str]:
    outcomes = list(outcomes)
    missed = [o for o in outcomes if not o.ok]
    lines = [f"{len(outcomes) - len(missed)}/{len(outcomes)} expectations met."]
    for o in missed:
        lines.append(
            escape(
                f"  MISS {o.system} {o.expectation.quantity}: "
                f"expected {o.expectation.value!r}, observed {o.observed!r}"
            )
        )
    return lines


def render_theorem3(cert: Theorem3Certificate) -> List[str]:
    """Summarise a separated-set construction or the reason it stopped."""
    if cert.aborted:
        line = f"Construction aborted ({cert.aborted})"
        if cert.failing_k is not None:
            line += f" at k={cert.failing_k}"
        return [line + "."]
    lines = [
        f"{len(cert.tracers)} tracers, separated: {cert.separated}",
        f"  gamma={to_json_number(cert.gamma)}  horizon={cert.horizon}  "
        f"convention={cert.convention}",
    ]
    if cert.bound is not None:
        lines.append(f"  entropy lower bound {cert.bound:.6f}")
    if cert.entropy_estimate is not None:
        lines.append(f"  entropy estimate    {cert.entropy_estimate:.6f}")
    return lines


def render_summary(summary: Dict[str, Any]) -> List[str]:
    """One line per analysis in a report summary."""
    system = summary["system"]
    lines = [
        f"Report for {system['name']} ({system['points']} points, "
        f"{len(system['maps'])} maps), exit {summary['exit_code']}"
    ]
    for name, result in sorted(summary.get("results", {}).items()):
        if isinstance(result, dict) and "estimate" in result:
            lines.append(f"  {name}: {result['estimate']}")
        elif isinstance(result, dict) and "holds" in result:
            lines.append(f"  {name}: {'holds' if result['holds'] else 'fails'}")
        else:
            lines.append(f"  {name}: done")
    for violation in summary.get("violations", []):
        lines.append(f"  VIOLATION {violation}")
    return lines
