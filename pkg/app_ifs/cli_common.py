"""
app_ifs.cli_common

Options and helpers shared by the command modules.
"""

from __future__ import annotations

from typing import List, NoReturn, Optional

import typer
from rich import print as rprint
from rich.console import Console
from rich.markup import escape

from .gallery import resolve_system
from .models.system import FunctionSystem
from .utils.validation import ConfigurationError

console = Console()

EXIT_USAGE = 1
EXIT_INVARIANT = 2

SystemOption = typer.Option(None, "--system", "-s", help="System description file (YAML/JSON)")
GalleryOption = typer.Option(None, "--gallery", "-g", help="Gallery system name")
ModeOption = typer.Option("auto", "--mode", help="Count mode: exact, greedy or auto")


def split_list(text: str) -> List[str]:
    """'1/2, 1/4' -> ['1/2', '1/4']"""
    return [part.strip() for part in text.split(",") if part.strip()]


def int_list(text: str, name: str) -> List[int]:
    try:
        return [int(part) for part in split_list(text)]
    except ValueError as exc:
        raise ConfigurationError(f"{name} must be comma-separated integers") from exc


def load_target(system: Optional[str], gallery: Optional[str]) -> FunctionSystem:
    fs = resolve_system(system, gallery)
    rprint(
        f"[cyan]System '{fs.name}': {fs.space.size} points, "
        f"{len(fs.maps)} maps[/cyan]"
    )
    return fs


def fail(e: Exception) -> NoReturn:
    """Report a usage or configuration error and exit with code 1."""
    rprint(f"[red]✗ Error: {escape(str(e))}[/red]")
    raise typer.Exit(code=EXIT_USAGE)


def violated(messages: List[str]) -> NoReturn:
    """Report violated invariants and exit with code 2."""
    for message in messages:
        rprint(f"[red]✗ {escape(message)}[/red]")
    raise typer.Exit(code=EXIT_INVARIANT)
