"""Figure rendering for the report path (PNG files next to the CSV output)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def line_figure(
    path,
    x,
    series: dict,
    xlabel: str,
    ylabel: str,
    title: str = "",
    xlog: bool = False,
    ylog: bool = False,
    hlines=(),
):
    """Render one or more curves sharing an x axis and save to ``path``."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, y in series.items():
        ax.plot(np.asarray(x), np.asarray(y), label=label, linewidth=1.4)
    for level in hlines:
        ax.axhline(level, color="0.6", linestyle=":", linewidth=1.0)
    if xlog:
        ax.set_xscale("log")
    if ylog:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
