"""Measures along the deformed-sine-kernel family, as a function of its cutoff."""

import sys

from ._sweep_panels import make_draw, sweep_spec
from .render import run

SPEC = sweep_spec("fig7c", "gamma", r"$\gamma$")


def main() -> None:
    sys.exit(run(SPEC, make_draw("dsk", "gamma"), multi=False))


if __name__ == "__main__":
    main()
