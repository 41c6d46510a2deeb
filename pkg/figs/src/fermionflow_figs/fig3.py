"""Rescaled density profiles against the hydrodynamic prediction.

One curve per input CSV (one coherence length each), all multiplied by
ell_c so the curves coincide at the junction; the hydrodynamic profile is
overlaid dashed where the artifact provides it.
"""

import sys

import numpy as np

from .csvio import FigureSpec
from .render import run

SPEC = FigureSpec(
    figure_id="fig3",
    expected_command="lattice-density",
    xlabel=r"$u = m/t$",
    ylabel=r"$\ell_c \, \rho_m(t)$",
    rescaled=True,
    required_columns=("u", "density_rescaled", "hydro_rescaled"),
)


def draw(ax, arts):
    for art in sorted(arts, key=lambda a: a.config["ellc"]):
        ell = art.config["ellc"]
        ax.plot(art.columns["u"], art.columns["density_rescaled"], label=rf"$\ell_c={ell}$")
        hydro = art.columns["hydro_rescaled"]
        if np.all(np.isfinite(hydro)):
            ax.plot(art.columns["u"], hydro, linestyle="--", color="0.25", linewidth=0.8)


def main() -> None:
    sys.exit(run(SPEC, draw))


if __name__ == "__main__":
    main()
