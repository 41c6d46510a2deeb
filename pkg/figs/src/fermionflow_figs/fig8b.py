"""The transition map: correlation measure as a function of the transport value."""

import sys

import numpy as np

from .csvio import FigureSpec
from .render import run

SPEC = FigureSpec(
    figure_id="fig8b",
    expected_command="transition-map",
    xlabel=r"$\mu_T$",
    ylabel=r"$\mu_C$",
    required_columns=("x", "mu_C_map"),
)


def draw(ax, arts):
    art = arts[0]
    x = art.columns["x"]
    y = art.columns["mu_C_map"]
    keep = np.isfinite(y)
    ax.plot(x[keep], y[keep], label=rf"$n_0={art.config['n0']}$")


def main() -> None:
    sys.exit(run(SPEC, draw, multi=False))


if __name__ == "__main__":
    main()
