"""
app_ifs.cli_complexity

Commands for separated/spanning counts, entropy and mean dimensions.
"""

from __future__ import annotations

from typing import List, Optional

import typer
from rich import print as rprint
from rich.table import Table

from .complexity_estimators import count_grid, entropy_estimate, mmdim_estimate, theorem1_chain
from .cover_dimension import ball_cover, mdim_estimate
from .cli_common import (
    GalleryOption,
    ModeOption,
    SystemOption,
    console,
    fail,
    int_list,
    load_target,
    split_list,
    violated,
)
from .loaders import load_sigma
from .models.counts import CountGrid
from .renderers.text import render_rate_report
from .utils.numeric import to_json_number


def _counts_table(grid: CountGrid, title: str) -> Table:
    table = Table(title=title, show_header=True, header_style="bold cyan")
    table.add_column("n", style="cyan", justify="right")
    for eps in grid.radii:
        table.add_column(f"ε={to_json_number(eps)}", justify="right")
    for n in grid.horizons:
        cells = []
        for eps in grid.radii:
            result = grid.separated(n, eps)
            cells.append(str(result.count) + ("" if result.exact else "*"))
        table.add_row(str(n), *cells)
    return table


def entropy(
    system: Optional[str] = SystemOption,
    gallery: Optional[str] = GalleryOption,
    n: str = typer.Option("1,2,3,4", "--n", help="Horizons, comma-separated"),
    eps: str = typer.Option("1/2,1/4,1/8", "--eps", help="Radii, comma-separated"),
    mode: str = ModeOption,
):
    """Separated counts s(n, ε) and the entropy estimate."""
    try:
        fs = load_target(system, gallery)
        grid = count_grid(fs, int_list(n, "--n"), split_list(eps), mode)
        report = entropy_estimate(fs, grid.horizons, grid.radii, mode, grid=grid)
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    console.print(_counts_table(grid, "\nSeparated counts s(n, ε)"))
    for line in render_rate_report(report, "entropy"):
        rprint(line)
    problems = grid.violations()
    if problems:
        violated(problems)
    rprint(f"[green]✓ entropy ≈ {report.entropy:.6f}[/green]")


def mmdim(
    system: Optional[str] = SystemOption,
    gallery: Optional[str] = GalleryOption,
    n: str = typer.Option("1,2,3", "--n", help="Horizons, comma-separated"),
    eps: str = typer.Option("1/2,1/4,1/8", "--eps", help="At least 3 radii below 1"),
    sigma: List[str] = typer.Option([], "--sigma", help="σ for the orbit version (repeatable)"),
    mode: str = ModeOption,
):
    """Upper, lower and orbit metric mean dimension estimates."""
    try:
        fs = load_target(system, gallery)
        sigmas = [load_sigma(s) for s in sigma]
        grid = count_grid(fs, int_list(n, "--n"), split_list(eps), mode)
        report = mmdim_estimate(fs, grid.horizons, grid.radii, mode, sigmas=sigmas, grid=grid)
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    console.print(_counts_table(grid, "\nSeparated counts s(n, ε)"))
    for line in render_rate_report(report, "mmdim"):
        rprint(line)
    problems = grid.violations()
    if problems:
        violated(problems)


def mdim(
    system: Optional[str] = SystemOption,
    gallery: Optional[str] = GalleryOption,
    sigma: str = typer.Option(..., "--sigma", help="σ, e.g. 'const(v)' or 'a,b|c'"),
    radius: List[str] = typer.Option(["1/2"], "--radius", help="Ball-cover radii (ladder)"),
    n: str = typer.Option("1,2,3", "--n", help="Horizons, comma-separated"),
    floor: str = typer.Option("0", "--floor", help="Refinement pool diameter floor"),
    mode: str = ModeOption,
):
    """Cover-based mean dimension: growth of 𝒟(α_0^{n−1}(σ)) along a cover ladder."""
    try:
        fs = load_target(system, gallery)
        ladder = [ball_cover(fs.space, r) for r in radius]
        horizons = int_list(n, "--n")
        report = mdim_estimate(fs, load_sigma(sigma), ladder, horizons, floors=(floor,), mode=mode)
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    table = Table(title="\n𝒟 of orbit joins", show_header=True, header_style="bold cyan")
    table.add_column("radius", style="cyan")
    for h in sorted(set(horizons)):
        table.add_column(f"n={h}", justify="right")
    table.add_column("slope", justify="right", style="green")
    for k, r in enumerate(radius):
        cells = [
            "—" if report.values[(k, h)] is None else str(report.values[(k, h)])
            for h in sorted(set(horizons))
        ]
        table.add_row(r, *cells, f"{report.slopes[k]:.4f}")
    console.print(table)
    qualifier = "" if report.exact else " (from bounds)"
    rprint(f"[green]mdim estimate {report.estimate:.6f}{qualifier}, pool-restricted[/green]")


def theorem1(
    system: Optional[str] = SystemOption,
    gallery: Optional[str] = GalleryOption,
    n: str = typer.Option("1,2,3", "--n", help="Horizons, comma-separated"),
    eps: str = typer.Option("1/2,1/4,1/8", "--eps", help="At least 3 radii below 1"),
    sigma: List[str] = typer.Option([], "--sigma", help="Sampled σ (repeatable)"),
    radius: Optional[str] = typer.Option(None, "--radius", help="Ball cover for the mdim link"),
    mode: str = ModeOption,
):
    """Check mdim ≤ omdim ≤ lmdim ≤ umdim and s(σ, n, ε) ≤ s(n, ε)."""
    try:
        fs = load_target(system, gallery)
        sigmas = [load_sigma(s) for s in sigma]
        horizons = int_list(n, "--n")
        mdim_value = 0.0
        if radius is not None:
            alpha = ball_cover(fs.space, radius)
            for s in sigmas or [load_sigma(f"const({fs.maps[0].id})")]:
                mdim_value = max(
                    mdim_value, mdim_estimate(fs, s, [alpha], horizons, mode=mode).estimate
                )
        report = theorem1_chain(fs, horizons, split_list(eps), sigmas, mode, mdim=mdim_value)
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    omdim = "n/a" if report.omdim is None else f"{report.omdim:.6f}"
    rprint(
        f"mdim {report.mdim:.6f}  omdim {omdim}  "
        f"lmdim {report.lmdim:.6f}  umdim {report.umdim:.6f}"
    )
    if not report.holds:
        violated(report.violations)
    rprint("[green]✓ chain holds[/green]")
