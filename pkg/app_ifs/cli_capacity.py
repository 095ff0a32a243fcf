"""
app_ifs.cli_capacity

Commands for orbit capacity, the small boundary property and the
partition-of-unity construction.
"""

from __future__ import annotations

from typing import Optional

import typer
from rich import print as rprint
from rich.table import Table

from .capacity_sbp import lsbp_partition, ocap as orbit_capacity, sbp_check, t2_map
from .cli_common import (
    GalleryOption,
    SystemOption,
    console,
    fail,
    load_target,
    split_list,
    violated,
)
from .loaders import load_pairs, load_sigma, load_subset, read_document
from .utils.numeric import to_json_number


def ocap(
    system: Optional[str] = SystemOption,
    gallery: Optional[str] = GalleryOption,
    target: str = typer.Option(..., "--set", help="Points of A, comma-separated"),
    curve: bool = typer.Option(False, "--curve", help="Also print the DP capacity curve"),
):
    """Orbit capacity of a point set (max cycle mean over the infinite core)."""
    try:
        fs = load_target(system, gallery)
        A = load_subset(fs.space, split_list(target))
        result = orbit_capacity(fs, A, with_cycle=True)
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    if not result.defined:
        rprint("[yellow]ocap undefined: no point has an infinite orbit[/yellow]")
        return
    rprint(f"[green]ocap = {to_json_number(result.value)}[/green]")
    if result.cycle:
        rprint(f"  attained on cycle {' → '.join(result.cycle)}")
    if curve:
        table = Table(title="\nsup_x cap(n, x, A)", show_header=True, header_style="bold cyan")
        table.add_column("n", style="cyan", justify="right")
        table.add_column("capacity", justify="right")
        for h, value in sorted(result.curve.items()):
            table.add_row(str(h), str(to_json_number(value)))
        console.print(table)


def sbp(
    system: Optional[str] = SystemOption,
    gallery: Optional[str] = GalleryOption,
    delta: str = typer.Option(..., "--delta", help="Shell width δ"),
):
    """Look for small-boundary sub-balls inside every ball of the space."""
    try:
        fs = load_target(system, gallery)
        report = sbp_check(fs, delta)
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    rprint(f"Checked {len(report.entries)} balls at δ = {to_json_number(report.delta)}")
    if report.holds:
        rprint("[green]✓ every ball contains a sub-ball with a small shell[/green]")
        return
    table = Table(title="\nBalls without a witness", show_header=True, header_style="bold cyan")
    table.add_column("center", style="cyan")
    table.add_column("radius", justify="right")
    for entry in report.failures:
        table.add_row(entry.center, str(to_json_number(entry.radius)))
    console.print(table)


def lsbp(
    system: Optional[str] = SystemOption,
    gallery: Optional[str] = GalleryOption,
    pairs_file: str = typer.Option(..., "--pairs", help="YAML list of {U: [...], V: [...]}"),
    sigma: str = typer.Option(..., "--sigma", help="σ the partition is built along"),
    eps: str = typer.Option(..., "--eps", help="Capacity threshold ε"),
    N: int = typer.Option(..., "--N", help="Horizon N"),
    delta: str = typer.Option(..., "--delta", help="Neighbourhood width δ"),
    t2: bool = typer.Option(False, "--t2", help="Also build f_N and check compatibility"),
):
    """Build a partition of unity from cover pairs and certify its boundary."""
    try:
        fs = load_target(system, gallery)
        pairs = load_pairs(fs.space, read_document(pairs_file))
        s = load_sigma(sigma)
        partition, cert = lsbp_partition(fs, s, pairs, eps, N, delta)
        embedding = t2_map(fs, s, partition, N, eps) if t2 else None
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    rprint(f"sum to one: {cert.sum_to_one}   subordinate: {cert.subordinate}")
    rprint(
        f"boundary capacity {to_json_number(cert.boundary_capacity)} "
        f"vs ε = {to_json_number(cert.eps)}: "
        f"{'small' if cert.boundary_small else 'not small'}"
    )
    if cert.premise_violations:
        rprint(f"[yellow]{len(cert.premise_violations)} δ-premise failures[/yellow]")
    if embedding is not None:
        rprint(
            f"f_N compatible: {embedding.compatibility.compatible}   "
            f"open coordinates within budget {embedding.budget:.3f}: {embedding.within_budget}"
        )
    if not (cert.sum_to_one and cert.subordinate):
        violated(["partition of unity is not valid on Σ_σ"])
