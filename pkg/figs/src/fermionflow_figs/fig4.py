"""Transferred particle number versus time, one rescaled curve per coherence length."""

import sys

from .csvio import FigureSpec
from .render import run

SPEC = FigureSpec(
    figure_id="fig4",
    expected_command="lattice-flow",
    xlabel=r"$t$",
    ylabel=r"$\ell_c \, N_R(t)$",
    rescaled=True,
    required_columns=("t", "n_right_rescaled"),
)


def draw(ax, arts):
    for art in sorted(arts, key=lambda a: a.config["ellc"]):
        ax.plot(
            art.columns["t"],
            art.columns["n_right_rescaled"],
            marker="o",
            markersize=2,
            label=rf"$\ell_c={art.config['ellc']}$",
        )


def main() -> None:
    sys.exit(run(SPEC, draw))


if __name__ == "__main__":
    main()
