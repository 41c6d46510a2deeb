"""Common argument handling and rendering loop for the figure scripts.

Every script validates all of its inputs (command match, config hash,
required columns) before a figure is created, so a failed run never leaves
an output file behind.  The scripts only draw what the CSV artifacts
contain; no quantity is recomputed here.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import style
from .csvio import Artifact, ArtifactError, FigureSpec, read_artifact, require_columns

VECTOR_SUFFIXES = (".pdf", ".svg", ".eps")


def build_parser(spec: FigureSpec, multi: bool) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog=f"fermionflow-{spec.figure_id}",
        description=f"Render {spec.figure_id} from '{spec.expected_command}' CSV artifacts.",
    )
    ap.add_argument(
        "--in", dest="inputs", nargs="+" if multi else 1, required=True, metavar="CSV",
        help=f"artifact(s) written by 'fermionflow --command {spec.expected_command}'",
    )
    ap.add_argument("--out", required=True, help="output image path (.pdf, .svg, or .eps)")
    return ap


def run(
    spec: FigureSpec,
    draw: Callable[[object, Sequence[Artifact]], None],
    argv: Sequence[str] | None = None,
    multi: bool = True,
) -> int:
    args = build_parser(spec, multi).parse_args(argv)
    out = Path(args.out)
    if out.suffix not in VECTOR_SUFFIXES:
        print(f"output must be a vector format {VECTOR_SUFFIXES}, got {out.suffix!r}", file=sys.stderr)
        return 2
    try:
        arts = [read_artifact(p, spec.expected_command) for p in args.inputs]
        for art in arts:
            require_columns(art, spec.required_columns)
    except ArtifactError as exc:
        print(f"{spec.figure_id}: {exc}", file=sys.stderr)
        return 2

    style.apply()
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots()
    try:
        draw(ax, arts)
    except ArtifactError as exc:
        plt.close(fig)
        print(f"{spec.figure_id}: {exc}", file=sys.stderr)
        return 2
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    if spec.logx:
        ax.set_xscale("log")
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    out.parent.mkdir(parents=True, exist_ok=True)
    # drop volatile timestamps so re-renders are byte-identical
    metadata = {"Date": None} if out.suffix == ".svg" else {"CreationDate": None}
    fig.savefig(out, metadata=metadata)
    plt.close(fig)
    return 0
