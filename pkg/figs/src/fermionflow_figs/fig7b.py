"""Measures along the Gaussian family, as a function of its decay parameter."""

import sys

from ._sweep_panels import make_draw, sweep_spec
from .render import run

SPEC = sweep_spec("fig7b", "alpha", r"$\alpha$")


def main() -> None:
    sys.exit(run(SPEC, make_draw("gaussian", "alpha"), multi=False))


if __name__ == "__main__":
    main()
