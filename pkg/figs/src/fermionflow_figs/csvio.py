"""Reader for fermionflow CSV artifacts with provenance checks.

Artifacts carry their generating command, the canonical configuration JSON,
and a SHA-256 of that JSON in '#'-prefixed header comments.  A figure spec
names the command it expects; anything else (wrong command, tampered or
missing header, hash mismatch, no data rows) is rejected so the scripts can
never silently plot stale or foreign data.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ArtifactError(RuntimeError):
    """The input file is not a matching, intact fermionflow artifact."""


@dataclass(frozen=True)
class Artifact:
    path: Path
    command: str
    config: dict
    header: dict
    columns: dict


@dataclass(frozen=True)
class FigureSpec:
    """What one figure expects from its inputs and how to label the axes."""

    figure_id: str
    expected_command: str
    xlabel: str
    ylabel: str
    logx: bool = False
    rescaled: bool = False  # use the ell_c-rescaled columns (profile/flow figures)
    required_columns: tuple = field(default_factory=tuple)


def read_artifact(path: str | Path, expected_command: str) -> Artifact:
    path = Path(path)
    if not path.exists():
        raise ArtifactError(
            f"{path} does not exist; regenerate it with "
            f"'fermionflow --command {expected_command} ... --out {path}'"
        )
    header: dict = {}
    names = None
    rows = []
    for line in path.read_text().splitlines():
        if line.startswith("# "):
            key, sep, val = line[2:].partition(": ")
            if sep:
                header[key] = val
        elif names is None:
            names = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    for key in ("command", "config", "config-sha256"):
        if key not in header:
            raise ArtifactError(f"{path} is missing the '{key}' header; not a fermionflow artifact")
    if header["command"] != expected_command:
        raise ArtifactError(
            f"{path} was produced by '{header['command']}' but this figure needs "
            f"'{expected_command}'; regenerate it with "
            f"'fermionflow --command {expected_command} ... --out {path}'"
        )
    digest = hashlib.sha256(header["config"].encode()).hexdigest()
    if digest != header["config-sha256"]:
        raise ArtifactError(f"{path} failed its configuration hash check; the header was altered")
    config = json.loads(header["config"])
    if names is None or not rows:
        raise ArtifactError(f"{path} contains no data rows")
    columns = {n: np.array(col) for n, col in zip(names, zip(*rows))}
    missing = [c for c in names if len(columns.get(c, ())) == 0]
    if missing:
        raise ArtifactError(f"{path} has empty columns {missing}")
    return Artifact(path=path, command=header["command"], config=config, header=header, columns=columns)


def require_columns(art: Artifact, names: tuple) -> None:
    missing = [n for n in names if n not in art.columns]
    if missing:
        raise ArtifactError(f"{art.path} lacks required columns {missing}")
