"""Measures along the thermal family, as a function of inverse temperature."""

import sys

from ._sweep_panels import make_draw, sweep_spec
from .render import run

SPEC = sweep_spec("fig7a", "beta", r"$\beta$")


def main() -> None:
    sys.exit(run(SPEC, make_draw("thermal", "beta"), multi=False))


if __name__ == "__main__":
    main()
