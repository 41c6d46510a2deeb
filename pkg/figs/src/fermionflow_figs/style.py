"""Shared matplotlib style: fixed parameters so re-renders look identical."""

import matplotlib

matplotlib.use("Agg")

golden = 0.6180339887498949
FIG_WIDTH = 4.2

PARAMS = {
    "figure.figsize": [FIG_WIDTH, FIG_WIDTH * golden],
    "figure.dpi": 200,
    "font.family": "serif",
    "font.size": 9,
    "mathtext.fontset": "stix",
    "axes.labelsize": 10,
    "axes.prop_cycle": matplotlib.cycler(
        color=["#08589e", "#2b8cbe", "#4eb3d3", "#7bccc4", "#a8ddb5"]
    ),
    "legend.fontsize": 8,
    "legend.frameon": False,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "lines.markersize": 3,
    "savefig.bbox": "tight",
    "svg.hashsalt": "fermionflow-figs",
}


def apply() -> None:
    matplotlib.rcParams.update(PARAMS)
