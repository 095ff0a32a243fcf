from __future__ import annotations

import math
from pathlib import Path

from .models.counts import CountGrid
from .utils.numeric import to_json_number


def plot_rate_curves(grid: CountGrid, outfile: Path, title: str = "") -> None:
    """Render log s(n, ε) against n, one line per radius."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # pragma: no cover
        raise ImportError("matplotlib is required for plotting") from exc

    outfile.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 5))

    for eps in grid.radii:
        horizons = [n for n in grid.horizons if grid.separated(n, eps).count > 0]
        values = [math.log(grid.separated(n, eps).count) for n in horizons]
        exact = all(grid.separated(n, eps).exact for n in horizons)
        ax.plot(
            horizons,
            values,
            marker="o",
            linestyle="-" if exact else "--",
            linewidth=1.2,
            label=f"ε = {to_json_number(eps)}" + ("" if exact else " (bound)"),
        )

    ax.set_xlabel("n")
    ax.set_ylabel("log s(n, ε)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(outfile, dpi=150)
    plt.close(fig)
