"""Batch front end: dispatch run configurations and emit CSV/JSON artifacts.

One command per process; outputs are deterministic (fixed 17-significant-
digit float formatting, sorted JSON config echo, atomic replace on write)
so repeated runs of the same configuration are byte-identical.  Every CSV
carries its resolved configuration and a SHA-256 of the canonical config
string in '#'-prefixed header comments; a JSON sidecar additionally records
the library version, tolerances, and wall-clock time.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, continuum, fcs, lattice, tmap
from .errors import (
    DivergenceError,
    NonConvergenceError,
    ValidationError,
    WindowTooSmallError,
)

COMMANDS = (
    "lattice-density",
    "lattice-flow",
    "dicke",
    "continuum-profile",
    "measures-sweep",
    "transition-map",
    "dispersion",
    "fcs",
)

_SWEEP_DEFAULTS = {  # parameter name, log-spaced default grid
    "thermal": ("beta", 1e-2, 30.0, 50),
    "gaussian": ("alpha", 1.0, 100.0, 50),
    "dsk": ("gamma", 4.0, 40.0, 50),
}

_RECOGNIZED_TOLS = {"fcs-nodes"}


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _canonical_config(cfg: dict) -> str:
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def _config_hash(cfg: dict) -> str:
    return hashlib.sha256(_canonical_config(cfg).encode()).hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(
        "w", dir=path.parent, prefix=path.name + ".", suffix=".tmp", delete=False
    ) as fh:
        fh.write(text)
        tmp = fh.name
    os.replace(tmp, path)


def write_csv(path: Path, command: str, cfg: dict, columns: dict, extra: dict | None = None) -> None:
    lines = [
        f"# command: {command}",
        f"# config: {_canonical_config(cfg)}",
        f"# config-sha256: {_config_hash(cfg)}",
        f"# version: {__version__}",
    ]
    for key, val in (extra or {}).items():
        lines.append(f"# {key}: {val if isinstance(val, str) else _fmt(val)}")
    names = list(columns)
    arrays = [np.atleast_1d(np.asarray(columns[n])) for n in names]
    lines.append(",".join(names))
    for row in zip(*arrays):
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_sidecar(path: Path, command: str, cfg: dict, started: float, extra: dict | None = None) -> None:
    payload = {
        "command": command,
        "config": cfg,
        "config_sha256": _config_hash(cfg),
        "version": __version__,
        "wall_clock_s": time.monotonic() - started,
    }
    if extra:
        payload.update(extra)
    side = path.with_name(path.name + ".meta.json")
    _atomic_write(side, json.dumps(payload, sort_keys=True, indent=1) + "\n")


def _parse_grid(spec: str, name: str) -> tuple[float, float, int]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValidationError(f"{name} must look like lo:hi:count, got {spec!r}")
    lo, hi = float(parts[0]), float(parts[1])
    count = int(parts[2])
    if count < 1 or hi < lo:
        raise ValidationError(f"{name} needs lo <= hi and count >= 1")
    return lo, hi, count


def _threads() -> int:
    raw = os.environ.get("FERMIONFLOW_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValidationError(f"FERMIONFLOW_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


def _grid_map(fn, items):
    workers = _threads()
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _protocol_from_args(args) -> continuum.WignerProtocol:
    kind = args.protocol
    if kind == "thermal":
        return continuum.thermal(args.beta, args.n0)
    if kind == "gaussian":
        return continuum.gaussian(args.alpha, args.n0)
    if kind == "dsk":
        return continuum.deformed_sine_kernel(args.gamma, args.n0, args.sigma)
    if kind == "fermi-sea":
        return continuum.fermi_sea(args.n0)
    if kind == "flat":
        return continuum.flat_limit(args.eps, args.n0)
    raise ValidationError(f"unknown protocol {kind!r}")


def _default_n0(args) -> float:
    return args.n0 if args.n0 is not None else 1.0 / args.ellc


# ---------------------------------------------------------------------------
# command implementations


def _run_lattice_density(args, cfg, out: Path, started: float) -> None:
    n0 = _default_n0(args)
    cfg["n0"] = n0
    t = args.t
    margin = int(math.ceil(t)) + args.ellc + 45
    q = lattice.LatticeQuench(n0=n0, ell_c=args.ellc, window=(margin, margin))
    band, _ = lattice.correlated_domain_wall(q)
    dens = lattice.evolve_density(q, band, t)
    sites = lattice.window_sites(q)
    m = np.arange(0, int(math.floor(t)) + 1)
    rho = dens[np.searchsorted(sites, m)]
    u = m / t
    hydro_ok = abs(n0 * args.ellc - 1.0) < 1e-9
    hydro = lattice.hydro_density(u, n0, args.ellc) if hydro_ok else np.full_like(u, np.nan)
    cfg["window"] = [margin, margin]
    columns = {
        "m": m,
        "u": u,
        "density": rho,
        "density_rescaled": args.ellc * rho,
        "hydro_prediction": hydro,
        "hydro_rescaled": args.ellc * hydro,
    }
    write_csv(out, args.command, cfg, columns, {"band": json.dumps([_fmt(v) for v in band.values])})
    write_sidecar(out, args.command, cfg, started)


def _run_lattice_flow(args, cfg, out: Path, started: float) -> None:
    n0 = _default_n0(args)
    cfg["n0"] = n0
    t_max = args.t
    margin = int(math.ceil(t_max)) + args.ellc + 45
    q = lattice.LatticeQuench(n0=n0, ell_c=args.ellc, window=(margin, margin))
    band, _ = lattice.correlated_domain_wall(q)
    sites = lattice.window_sites(q)
    ts = np.arange(0.0, t_max + 0.5, 10.0)
    flows = np.array(
        [lattice.particle_number_right(lattice.evolve_density(q, band, float(t)), sites) for t in ts]
    )
    cfg["window"] = [margin, margin]
    cfg["t_step"] = 10.0
    columns = {
        "ell_c": np.full_like(ts, args.ellc),
        "t": ts,
        "n_right": flows,
        "n_right_rescaled": args.ellc * flows,
    }
    extra = {"slope_closed_form": lattice.hydro_slope(args.ellc)} if abs(n0 * args.ellc - 1.0) < 1e-9 else {}
    write_csv(out, args.command, cfg, columns, extra)
    write_sidecar(out, args.command, cfg, started)


def _run_dicke(args, cfg, out: Path, started: float) -> None:
    n0 = _default_n0(args)
    cfg["n0"] = n0
    d = int(round(n0 * args.ellc))
    cell = lattice.dicke_correlations(lattice.DickeCell(args.ellc, d))
    sep = np.arange(args.ellc)
    cfg["particles_per_cell"] = d
    write_csv(out, args.command, cfg, {"separation": sep, "correlation": cell[0]})
    write_sidecar(out, args.command, cfg, started)


def _run_continuum_profile(args, cfg, out: Path, started: float) -> None:
    if args.n0 is None:
        raise ValidationError("continuum-profile requires --n0")
    p = continuum.resolve_protocol(_protocol_from_args(args))
    cfg["resolved"] = {k: v for k, v in (p.resolved or ())}
    ks = np.linspace(0.0, p.k_cut, 401)
    occ = continuum.n_eq(p, ks)
    write_csv(out, args.command, cfg, {"k": ks, "n_eq": occ}, {"table": "wigner"})
    rs = np.linspace(0.0, 25.0, 251)
    corr = np.array([continuum.correlation_from_wigner(p, float(r)) for r in rs])
    corr_path = out.with_name(out.stem + "-correlation" + out.suffix)
    write_csv(corr_path, args.command, cfg, {"r": rs, "c_eq": corr}, {"table": "correlation"})
    write_sidecar(out, args.command, cfg, started, {"correlation_table": corr_path.name})


def _run_measures_sweep(args, cfg, out: Path, started: float) -> None:
    if args.protocol not in _SWEEP_DEFAULTS:
        raise ValidationError("measures-sweep supports the thermal, gaussian, and dsk families")
    n0 = args.n0 if args.n0 is not None else 0.5
    name, lo, hi, count = _SWEEP_DEFAULTS[args.protocol]
    if args.x_grid is not None:
        lo, hi, count = _parse_grid(args.x_grid, "--x-grid")
    params = np.geomspace(lo, hi, count)

    def one(v: float):
        if args.protocol == "thermal":
            p = continuum.thermal(v, n0)
        elif args.protocol == "gaussian":
            p = continuum.gaussian(v, n0)
        else:
            p = continuum.deformed_sine_kernel(v, n0, args.sigma)
        r = continuum.resolve_protocol(p)
        return continuum.mu_T(r), continuum.mu_C(r), continuum.mu_P(r)

    rows = _grid_map(one, [float(v) for v in params])
    mt, mc, mp = (np.array(col) for col in zip(*rows))
    cfg["param"] = name
    cfg["n0"] = n0
    write_csv(out, args.command, cfg, {name: params, "mu_T": mt, "mu_C": mc, "mu_P": mp})
    write_sidecar(out, args.command, cfg, started)


def _run_transition_map(args, cfg, out: Path, started: float) -> None:
    n0 = args.n0 if args.n0 is not None else 0.1
    if args.x_grid is not None:
        lo, hi, count = _parse_grid(args.x_grid, "--x-grid")
        xs = np.linspace(lo, hi, count)
    else:
        xs = tmap.default_grid()
    floor = n0 * n0 / math.sqrt(2.0)
    mu_c = np.array([tmap.gaussian_transition_map(float(x), n0) if x >= floor else np.nan for x in xs])
    mu_p = np.array([tmap.purity_transition_map(float(x), n0) for x in xs])
    cfg["n0"] = n0
    write_csv(out, args.command, cfg, {"x": xs, "mu_C_map": mu_c, "mu_P_map": mu_p})
    write_sidecar(out, args.command, cfg, started)


def _run_dispersion(args, cfg, out: Path, started: float) -> None:
    n0 = args.n0 if args.n0 is not None else 0.1
    if args.x_grid is not None:
        lo, hi, count = _parse_grid(args.x_grid, "--x-grid")
        xs = np.linspace(lo, hi, count)
    else:
        xs = tmap.default_grid()

    def one(x: float):
        return (
            tmap.transition_sample(x, n0, "mu_C"),
            tmap.transition_sample(x, n0, "mu_P"),
        )

    pairs = _grid_map(one, [float(x) for x in xs])
    samples_c = [p[0] for p in pairs]
    samples_p = [p[1] for p in pairs]
    delta_c = abs(math.fsum(s.mean_abs_deviation / s.centroid for s in samples_c) / len(samples_c))
    delta_p = abs(math.fsum(s.mean_abs_deviation / s.centroid for s in samples_p) / len(samples_p))
    cfg["n0"] = n0
    columns = {
        "x": xs,
        "beta": np.array([s.beta for s in samples_c]),
        "alpha": np.array([s.alpha for s in samples_c]),
        "gamma": np.array([s.gamma for s in samples_c]),
        "muC_thermal": np.array([s.images[0] for s in samples_c]),
        "muC_gaussian": np.array([s.images[1] for s in samples_c]),
        "muC_dsk": np.array([s.images[2] for s in samples_c]),
        "muC_centroid": np.array([s.centroid for s in samples_c]),
        "muC_spread": np.array([s.relative_spread for s in samples_c]),
        "muP_thermal": np.array([s.images[0] for s in samples_p]),
        "muP_gaussian": np.array([s.images[1] for s in samples_p]),
        "muP_dsk": np.array([s.images[2] for s in samples_p]),
        "muP_centroid": np.array([s.centroid for s in samples_p]),
        "muP_spread": np.array([s.relative_spread for s in samples_p]),
    }
    extra = {"delta_mu_C": delta_c, "delta_mu_P": delta_p}
    write_csv(out, args.command, cfg, columns, extra)
    write_sidecar(out, args.command, cfg, started, extra)


def _run_fcs(args, cfg, out: Path, started: float) -> None:
    n0 = _default_n0(args)
    cfg["n0"] = n0
    t = args.t
    margin = int(math.ceil(t)) + args.ellc + 45
    q = lattice.LatticeQuench(n0=n0, ell_c=args.ellc, window=(margin, margin))
    band, c0 = lattice.correlated_domain_wall(q)
    lo, hi, count = _parse_grid(args.lambda_grid, "--lambda-grid")
    lams = np.linspace(lo, hi, count)
    b = args.b if args.b is not None else None
    vals = fcs.fcs_discrete_grid(c0, t, args.a, lams, b=b)
    logs = fcs.unwrap_log(lams, vals)
    cfg["window"] = [margin, margin]
    columns = {
        "lam": lams,
        "fcs_re": vals.real,
        "fcs_im": vals.imag,
        "logfcs_re": logs.real,
        "logfcs_im": logs.imag,
    }
    extra = {"route": "discrete", "det_sites": int(margin)}
    if b is None:
        n_nodes = 128
        if "fcs-nodes" in args.tol:
            n_nodes = int(args.tol["fcs-nodes"])
        cont = fcs.fcs_continuous_grid(band, t, args.a, lams, n_nodes=n_nodes)
        columns["fcs_cont_re"] = cont.real
        columns["fcs_cont_im"] = cont.imag
        extra["nystrom_nodes"] = n_nodes
    write_csv(out, args.command, cfg, columns, extra)
    write_sidecar(out, args.command, cfg, started, {k: v for k, v in extra.items()})


_RUNNERS = {
    "lattice-density": _run_lattice_density,
    "lattice-flow": _run_lattice_flow,
    "dicke": _run_dicke,
    "continuum-profile": _run_continuum_profile,
    "measures-sweep": _run_measures_sweep,
    "transition-map": _run_transition_map,
    "dispersion": _run_dispersion,
    "fcs": _run_fcs,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fermionflow",
        description="Exact transport and counting statistics for correlated domain-wall quenches.",
    )
    ap.add_argument("--command", required=True, choices=COMMANDS)
    ap.add_argument("--t", type=float, default=None, help="evolution time (or maximal time for flows)")
    ap.add_argument("--ellc", type=int, default=1, help="coherence length / Dicke cell size")
    ap.add_argument("--n0", type=float, default=None, help="mean density (defaults per command)")
    ap.add_argument(
        "--protocol", choices=("thermal", "gaussian", "dsk", "fermi-sea", "flat"), default="thermal"
    )
    ap.add_argument("--beta", type=float, default=1.0, help="thermal inverse temperature")
    ap.add_argument("--alpha", type=float, default=1.0, help="gaussian decay parameter")
    ap.add_argument("--gamma", type=float, default=8.0, help="dsk momentum cutoff")
    ap.add_argument("--sigma", type=float, default=2.0, help="dsk shape parameter")
    ap.add_argument("--eps", type=float, default=0.1, help="flat-limit occupation")
    ap.add_argument("--a", type=int, default=1, help="left edge of the counting interval")
    ap.add_argument("--b", type=int, default=None, help="right edge of the counting interval")
    ap.add_argument("--lambda-grid", default="0.0:6.283185307179586:64", help="counting-field grid lo:hi:count")
    ap.add_argument("--x-grid", default=None, help="target/parameter grid lo:hi:count")
    ap.add_argument("--out", required=True, help="primary CSV output path")
    ap.add_argument(
        "--tol-override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="numerical tolerance overrides (recognized: fcs-nodes)",
    )
    return ap


def _collect_config(args) -> dict:
    keys = (
        "command", "t", "ellc", "n0", "protocol", "beta", "alpha", "gamma", "sigma",
        "eps", "a", "b", "lambda_grid", "x_grid",
    )
    cfg = {k: getattr(args, k) for k in keys}
    cfg["tol_override"] = dict(sorted(args.tol.items()))
    return cfg


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    args.tol = {}
    for item in args.tol_override:
        if "=" not in item:
            print(f"invalid --tol-override {item!r}; expected KEY=VALUE", file=sys.stderr)
            return 2
        key, val = item.split("=", 1)
        if key not in _RECOGNIZED_TOLS:
            print(f"unrecognized tolerance key {key!r}", file=sys.stderr)
            return 2
        args.tol[key] = float(val)
    if args.t is None:
        args.t = 300.0 if args.command in ("lattice-density", "lattice-flow") else 10.0
    out = Path(args.out)
    started = time.monotonic()
    cfg = _collect_config(args)
    try:
        _RUNNERS[args.command](args, cfg, out, started)
    except (ValidationError, WindowTooSmallError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (NonConvergenceError, DivergenceError) as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return 3
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
