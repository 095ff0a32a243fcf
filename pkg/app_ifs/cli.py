"""
app_ifs.cli

Command-line interface for the function-system toolkit.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional

import typer
from rich import print as rprint
from rich.logging import RichHandler
from rich.table import Table

from . import cli_capacity, cli_complexity, cli_gluing
from .cli_common import (
    EXIT_INVARIANT,
    GalleryOption,
    SystemOption,
    console,
    fail,
    load_target,
    violated,
)
from .config import RunConfig, get_config, reset_config
from .gallery import build_gallery, check_gallery
from .ifs_model import check_ifs
from .loaders import load_space
from .metric_core import gh_distance, verify_metric
from .plotting import plot_rate_curves
from .renderers.text import render_expectations, render_outcomes, render_summary
from .reports import run_report
from .utils.numeric import to_json_number

app = typer.Typer(help="Dynamics of finite partial function systems on metric spaces")

app.command("entropy")(cli_complexity.entropy)
app.command("mmdim")(cli_complexity.mmdim)
app.command("mdim")(cli_complexity.mdim)
app.command("theorem1")(cli_complexity.theorem1)
app.command("ocap")(cli_capacity.ocap)
app.command("sbp")(cli_capacity.sbp)
app.command("lsbp")(cli_capacity.lsbp)
app.command("gop")(cli_gluing.gop)
app.command("trace")(cli_gluing.trace)
app.command("theorem3")(cli_gluing.theorem3)
app.command("recurrence")(cli_gluing.recurrence)


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level"),
    config: Optional[Path] = typer.Option(None, "--config", help="Settings YAML file"),
):
    """Set up configuration and logging for every command."""
    if config is not None:
        reset_config()
    try:
        settings = get_config(config)
    except (ValueError, FileNotFoundError) as e:
        fail(e)
    level = "DEBUG" if verbose else settings.logging.level
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(rich_tracebacks=settings.logging.rich_tracebacks)],
        force=True,
    )


@app.command("check")
def check(
    system: Optional[str] = SystemOption,
    gallery: Optional[str] = GalleryOption,
):
    """Verify the metric axioms and test the IFS condition."""
    try:
        fs = load_target(system, gallery)
        violations = verify_metric(fs.space)
        result = check_ifs(fs) if not violations else None
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    if violations:
        violated([f"{v.axiom} at {', '.join(v.points)}: {v.detail}" for v in violations])
    rprint("[green]✓ metric axioms hold[/green]")
    if result.is_ifs:
        rprint(f"[green]✓ IFS: maximal witness has {len(result.witness)} points[/green]")
    else:
        rprint("[yellow]Not an IFS: no nonempty set satisfies K ⊆ ∪ v(K)[/yellow]")
    core = fs.graph.infinite_core
    rprint(f"  infinite core: {len(core)} of {fs.space.size} points")


@app.command("gh")
def gh(
    first: Path = typer.Argument(..., help="First space description"),
    second: Path = typer.Argument(..., help="Second space description"),
    max_points: Optional[int] = typer.Option(
        None, "--max-points", help="Exhaustive search cap (combined size)"
    ),
):
    """Gromov–Hausdorff distance between two finite spaces."""
    try:
        left, right = load_space(first), load_space(second)
        result = gh_distance(left, right, max_points=max_points)
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    if result.exact:
        rprint(f"[green]d_GH = {to_json_number(result.distance)}[/green]")
    else:
        rprint(
            f"[yellow]{to_json_number(result.lower)} ≤ d_GH ≤ "
            f"{to_json_number(result.distance)} (greedy bound)[/yellow]"
        )
    table = Table(title="\nCorrespondence", show_header=True, header_style="bold cyan")
    table.add_column(left.name or "first", style="cyan")
    table.add_column(right.name or "second", style="green")
    for x, y in result.correspondence:
        table.add_row(x, y)
    console.print(table)


@app.command("gallery")
def gallery(
    check: bool = typer.Option(False, "--check", help="Evaluate every expectation"),
    name: List[str] = typer.Option([], "--name", help="Restrict to these systems"),
):
    """List the curated example systems, or check their expected properties."""
    if not check:
        table = Table(
            title="\nGallery systems", show_header=True, header_style="bold cyan"
        )
        table.add_column("Name", style="cyan")
        table.add_column("Description")
        table.add_column("Expectations", style="green")
        for entry in build_gallery():
            if name and entry.name not in name:
                continue
            table.add_row(entry.name, entry.description, render_expectations(entry))
        console.print(table)
        return

    try:
        outcomes = check_gallery(name or None)
    except (ValueError, FileNotFoundError) as e:
        fail(e)
    for line in render_outcomes(outcomes):
        rprint(line)
    if any(not o.ok for o in outcomes):
        raise typer.Exit(code=EXIT_INVARIANT)
    rprint("[green]✓ all expectations met[/green]")


@app.command("report")
def report(
    run_file: Path = typer.Argument(..., help="Run description (YAML/JSON)"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Output directory"),
    plot: bool = typer.Option(False, "--plot", help="Also write a PNG of the rate curves"),
):
    """Run the analyses of a run file and write CSV, JSON and plot data."""
    try:
        run = RunConfig.from_file(run_file)
        bundle = run_report(run, output)
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    for line in render_summary(bundle.summary):
        rprint(line)
    if plot and bundle.grid is not None:
        target = Path(output or run.output) / "rate_curves.png"
        plot_rate_curves(bundle.grid, target, title=bundle.summary["system"]["name"])
        rprint(f"[cyan]Plot written to {target}[/cyan]")
    for path in bundle.files:
        rprint(f"  • {path}")
    if bundle.exit_code:
        raise typer.Exit(code=bundle.exit_code)


if __name__ == "__main__":
    app()
