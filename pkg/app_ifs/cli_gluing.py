"""
app_ifs.cli_gluing

Commands for orbit gluing: the gap function M(ε), single tracer searches,
the separated-set construction and recurrence scans.
"""

from __future__ import annotations

from typing import Optional

import typer
from rich import print as rprint
from rich.table import Table

from .cli_common import (
    GalleryOption,
    SystemOption,
    console,
    fail,
    load_target,
    split_list,
    violated,
)
from .complexity_estimators import entropy_estimate
from .gluing_orbit import (
    almost_periodic_scan,
    find_trace,
    gop_estimate,
    recurrence_scan,
    theorem3_construct,
)
from .loaders import load_orbit_sequence, load_sigma, read_document
from .renderers.text import render_theorem3
from .utils.numeric import to_json_number
from .utils.validation import ConfigurationError


def _sequences(path: Optional[str]):
    if path is None:
        return None
    document = read_document(path)
    if isinstance(document, dict) and "sequences" in document:
        document = document["sequences"]
    if not isinstance(document, list):
        raise ConfigurationError(f"{path}: expected a list of orbit sequences")
    if document and isinstance(document[0], dict):
        return [load_orbit_sequence(document)]
    return [load_orbit_sequence(item) for item in document]


def gop(
    system: Optional[str] = SystemOption,
    gallery: Optional[str] = GalleryOption,
    eps: str = typer.Option("1/2,1/4", "--eps", help="Radii, comma-separated"),
    max_gap: int = typer.Option(4, "--max-gap", help="Largest gap M tried"),
    count: int = typer.Option(8, "--count", help="Sampled orbit sequences"),
    seed: int = typer.Option(0, "--seed", help="Sampling seed"),
    sequences: Optional[str] = typer.Option(
        None, "--sequences", help="YAML file of orbit sequences instead of sampling"
    ),
):
    """Least gap M(ε) that glues every tested orbit sequence."""
    try:
        fs = load_target(system, gallery)
        entries = gop_estimate(
            fs, split_list(eps), sequences=_sequences(sequences),
            max_M=max_gap, count=count, seed=seed,
        )
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    table = Table(title="\nGluing gaps", show_header=True, header_style="bold cyan")
    table.add_column("ε", style="cyan")
    table.add_column("M(ε)", justify="right", style="green")
    table.add_column("note")
    for entry in entries:
        note = ""
        if entry.certificate is not None:
            note = "fails: " + "; ".join(
                f"({s.point}, {s.sigma.describe()}, {s.length})"
                for s in entry.certificate.segments
            )
        if entry.incomplete:
            note += " (search budget hit)"
        table.add_row(
            str(to_json_number(entry.eps)),
            "—" if entry.M is None else str(entry.M),
            note.strip(),
        )
    console.print(table)


def trace(
    system: Optional[str] = SystemOption,
    gallery: Optional[str] = GalleryOption,
    sequence: str = typer.Option(..., "--sequence", help="YAML orbit sequence file"),
    eps: str = typer.Option(..., "--eps", help="Tracing radius ε"),
    M: int = typer.Option(1, "--M", help="Largest gap"),
    convention: Optional[str] = typer.Option(
        None, "--convention", help="Offsets: definition or proof"
    ),
):
    """Find the least tracing orbit for one orbit sequence."""
    try:
        fs = load_target(system, gallery)
        (seq,) = _sequences(sequence)[:1]
        search = find_trace(fs, seq, eps, M, convention=convention)
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    if not search.found:
        qualifier = " (search budget hit)" if search.incomplete else ""
        rprint(f"[yellow]No tracer with gaps ≤ {M}{qualifier}[/yellow]")
        return
    result = search.result
    rprint(f"[green]✓ tracer from {result.tracer.point}[/green]")
    rprint(f"  symbols: {', '.join(result.tracer.symbols)}")
    rprint(f"  gaps {list(result.gap.times)}  offsets {list(result.offsets)}")
    rprint(
        f"  max deviation {to_json_number(result.max_deviation)}  "
        f"({result.convention} offsets)"
    )


def theorem3(
    system: Optional[str] = SystemOption,
    gallery: Optional[str] = GalleryOption,
    point: str = typer.Option(..., "--point", help="Base point p"),
    sigma: str = typer.Option(..., "--sigma", help="σ driving p's orbit"),
    eps: str = typer.Option(..., "--eps", help="Gluing radius ε"),
    M: int = typer.Option(..., "--M", help="Gap bound M"),
    N: int = typer.Option(..., "--N", help="Number of binary choices"),
    horizon: int = typer.Option(16, "--horizon", help="Scan length for the separations g_k"),
    compare: bool = typer.Option(
        False, "--compare", help="Compare the bound with an entropy estimate"
    ),
):
    """Glue copies of p's orbit into 2^N separated orbits."""
    try:
        fs = load_target(system, gallery)
        estimate = (
            entropy_estimate(fs, [1, 2, 3, 4], ["1/2", "1/4", "1/8"]).entropy
            if compare
            else None
        )
        cert = theorem3_construct(
            fs, load_sigma(sigma), point, eps, M, N, horizon, entropy_estimate=estimate
        )
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    for line in render_theorem3(cert):
        rprint(line)
    if cert.aborted is None and not cert.separated:
        violated([f"tracers {cert.violating_pair} are not separated"])
    if cert.bound_consistent is False:
        violated(["lower bound exceeds the entropy estimate"])


def recurrence(
    system: Optional[str] = SystemOption,
    gallery: Optional[str] = GalleryOption,
    eps: str = typer.Option(..., "--eps", help="Return radius ε"),
    horizon: int = typer.Option(8, "--horizon", help="Orbit length scanned"),
):
    """Recurrent and almost periodic points up to a horizon."""
    try:
        fs = load_target(system, gallery)
        returns = recurrence_scan(fs, eps, horizon)
        periodic = {e.point: e for e in almost_periodic_scan(fs, eps, horizon)}
    except (ValueError, FileNotFoundError) as e:
        fail(e)

    table = Table(title="\nRecurrence", show_header=True, header_style="bold cyan")
    table.add_column("point", style="cyan")
    table.add_column("recurrent", justify="center")
    table.add_column("almost periodic", justify="center")
    for entry in returns:
        ap = periodic.get(entry.point)
        table.add_row(
            entry.point,
            "vacuous" if entry.vacuous else ("yes" if entry.recurrent else "no"),
            "—" if ap is None else ("yes" if ap.almost_periodic else "no"),
        )
    console.print(table)
