"""End-to-end tests for the figure scripts.

Fixtures are generated through the fermionflow CLI (the only interface the
scripts consume); each script is then driven exactly as a user would, via
its module entry point in a subprocess.
"""

import subprocess
import sys
from pathlib import Path

import pytest

pytest.importorskip("fermionflow_figs")
pytest.importorskip("matplotlib")


def cli(*args: str) -> None:
    proc = subprocess.run(
        [sys.executable, "-m", "fermionflow.cli", *args], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr


def fig(module: str, *args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", f"fermionflow_figs.{module}", *args],
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("artifacts")
    for ell in (1, 2):
        cli("--command", "lattice-density", "--ellc", str(ell), "--t", "40",
            "--out", str(root / f"density-lc{ell}.csv"))
        cli("--command", "lattice-flow", "--ellc", str(ell), "--t", "60",
            "--out", str(root / f"flow-lc{ell}.csv"))
    cli("--command", "measures-sweep", "--protocol", "thermal", "--n0", "0.5",
        "--x-grid", "0.1:10:6", "--out", str(root / "sweep-thermal.csv"))
    cli("--command", "measures-sweep", "--protocol", "gaussian", "--n0", "0.3",
        "--x-grid", "1:30:6", "--out", str(root / "sweep-gaussian.csv"))
    cli("--command", "measures-sweep", "--protocol", "dsk", "--n0", "0.5",
        "--x-grid", "4:40:6", "--out", str(root / "sweep-dsk.csv"))
    cli("--command", "transition-map", "--x-grid", "0.02:0.4:10",
        "--out", str(root / "tmap.csv"))
    return root


CASES = [
    ("fig3", ["density-lc1.csv", "density-lc2.csv"]),
    ("fig4", ["flow-lc1.csv", "flow-lc2.csv"]),
    ("fig7a", ["sweep-thermal.csv"]),
    ("fig7b", ["sweep-gaussian.csv"]),
    ("fig7c", ["sweep-dsk.csv"]),
    ("fig8b", ["tmap.csv"]),
]


@pytest.mark.parametrize("module,inputs", CASES)
def test_renders_vector_image(module, inputs, artifacts, tmp_path):
    out = tmp_path / f"{module}.pdf"
    proc = fig(module, "--in", *[str(artifacts / f) for f in inputs], "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    assert out.exists() and out.stat().st_size > 1000
    assert out.read_bytes()[:5] == b"%PDF-"


def test_svg_output(artifacts, tmp_path):
    out = tmp_path / "fig8b.svg"
    proc = fig("fig8b", "--in", str(artifacts / "tmap.csv"), "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().lstrip().startswith("<?xml")


def test_rerender_is_identical(artifacts, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for out in (a, b):
        proc = fig("fig4", "--in", str(artifacts / "flow-lc1.csv"), "--out", str(out))
        assert proc.returncode == 0, proc.stderr
    assert a.read_bytes() == b.read_bytes()


def test_wrong_command_rejected(artifacts, tmp_path):
    out = tmp_path / "x.pdf"
    proc = fig("fig3", "--in", str(artifacts / "flow-lc1.csv"), "--out", str(out))
    assert proc.returncode != 0
    assert "lattice-density" in proc.stderr
    assert not out.exists()


def test_tampered_header_rejected(artifacts, tmp_path):
    good = (artifacts / "tmap.csv").read_text()
    bad = tmp_path / "tampered.csv"
    bad.write_text(good.replace('"n0":0.1', '"n0":0.2', 1))
    out = tmp_path / "x.pdf"
    proc = fig("fig8b", "--in", str(bad), "--out", str(out))
    assert proc.returncode != 0
    assert "hash" in proc.stderr
    assert not out.exists()


def test_empty_artifact_rejected(artifacts, tmp_path):
    src = (artifacts / "tmap.csv").read_text().splitlines()
    header_only = [line for line in src if line.startswith("#") or line.startswith("x,")]
    empty = tmp_path / "empty.csv"
    empty.write_text("\n".join(header_only) + "\n")
    out = tmp_path / "x.pdf"
    proc = fig("fig8b", "--in", str(empty), "--out", str(out))
    assert proc.returncode != 0
    assert not out.exists()


def test_missing_input_mentions_regeneration_command(tmp_path):
    out = tmp_path / "x.pdf"
    proc = fig("fig4", "--in", str(tmp_path / "nope.csv"), "--out", str(out))
    assert proc.returncode != 0
    assert "--command lattice-flow" in proc.stderr
    assert not out.exists()


def test_wrong_protocol_family_rejected(artifacts, tmp_path):
    out = tmp_path / "x.pdf"
    proc = fig("fig7a", "--in", str(artifacts / "sweep-gaussian.csv"), "--out", str(out))
    assert proc.returncode != 0
    assert not out.exists()


def test_raster_output_rejected(artifacts, tmp_path):
    out = tmp_path / "x.png"
    proc = fig("fig8b", "--in", str(artifacts / "tmap.csv"), "--out", str(out))
    assert proc.returncode != 0
    assert not out.exists()
