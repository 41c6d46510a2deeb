"""Continuum phase-space engine for the bipartite quench.

Equilibrium momentum occupations n^eq(k) for the supported protocol families
(thermal, Gaussian, deformed sine kernel, Fermi sea, flat high-temperature
limit), the free transport solution n(x,k,t) = n^eq(k) * theta(kt - x), the
Fourier bridge back to two-point correlations, and the transport/correlation
measures built from moments of n^eq.  Units: hbar = m = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erf, expit

from . import specfun
from .errors import DivergenceError, NonConvergenceError, ValidationError

__all__ = [
    "WignerProtocol",
    "WignerField",
    "thermal",
    "gaussian",
    "deformed_sine_kernel",
    "fermi_sea",
    "flat_limit",
    "resolve_protocol",
    "n_eq",
    "correlation_from_wigner",
    "density_profile",
    "particle_flow",
    "mu_T",
    "mu_C",
    "mu_P",
]

KINDS = ("thermal", "gaussian", "dsk", "fermi_sea", "flat")

# n^eq below this threshold is treated as zero when choosing momentum cutoffs
_N_FLOOR = 1e-14

# flat-limit epsilon below which the transport moment is reported as divergent
EPS_MIN = 1e-6


@dataclass(frozen=True)
class WignerProtocol:
    """Tagged equilibrium occupation n^eq(k) with its parameters.

    ``resolved`` holds derived constants (thermal chemical potential, DSK
    normalization, momentum cutoff); it is filled by :func:`resolve_protocol`
    and instances are immutable throughout.
    """

    kind: str
    n0: float
    params: tuple[tuple[str, float], ...]
    resolved: tuple[tuple[str, float], ...] | None = None

    def param(self, name: str) -> float:
        for key, val in self.params:
            if key == name:
                return val
        raise KeyError(name)

    def derived(self, name: str) -> float:
        if self.resolved is None:
            raise ValidationError("protocol has not been resolved")
        for key, val in self.resolved:
            if key == name:
                return val
        raise KeyError(name)

    @property
    def is_resolved(self) -> bool:
        return self.resolved is not None

    @property
    def k_cut(self) -> float:
        return self.derived("k_cut")


def thermal(beta: float, n0: float) -> WignerProtocol:
    return WignerProtocol("thermal", float(n0), (("beta", float(beta)),))


def gaussian(alpha: float, n0: float) -> WignerProtocol:
    return WignerProtocol("gaussian", float(n0), (("alpha", float(alpha)),))


def deformed_sine_kernel(gamma: float, n0: float, sigma: float = 2.0) -> WignerProtocol:
    return WignerProtocol("dsk", float(n0), (("gamma", float(gamma)), ("sigma", float(sigma))))


def fermi_sea(n0: float) -> WignerProtocol:
    return WignerProtocol("fermi_sea", float(n0), ())


def flat_limit(eps: float, n0: float) -> WignerProtocol:
    return WignerProtocol("flat", float(n0), (("eps", float(eps)),))


def _raw_n_eq(p: WignerProtocol, k: np.ndarray, mu: float | None = None) -> np.ndarray:
    """Occupation at |k| before/after resolution; thermal needs mu passed explicitly."""
    ak = np.abs(np.asarray(k, dtype=float))
    if p.kind == "thermal":
        beta = p.param("beta")
        if mu is None:
            mu = p.derived("mu")
        return expit(-beta * (0.5 * ak * ak - mu))
    if p.kind == "gaussian":
        alpha = p.param("alpha")
        return math.sqrt(math.pi / alpha) * p.n0 * np.exp(-ak * ak / (4.0 * alpha))
    if p.kind == "dsk":
        gamma, sigma = p.param("gamma"), p.param("sigma")
        norm = p.derived("norm") if p.is_resolved else _dsk_norm(sigma, p.n0)
        out = math.pi / (norm * gamma) * np.exp(-((sigma * ak / gamma) ** 2))
        return np.where(ak < gamma, out, 0.0)
    if p.kind == "fermi_sea":
        return np.where(ak < math.pi * p.n0, 1.0, 0.0)
    if p.kind == "flat":
        eps = p.param("eps")
        return np.where(ak < math.pi * p.n0 / eps, eps, 0.0)
    raise ValidationError(f"unknown protocol kind {p.kind!r}")


def _dsk_norm(sigma: float, n0: float) -> float:
    return math.sqrt(math.pi) / (2.0 * sigma * n0) * float(erf(sigma))


def _doubling_cutoff(p: WignerProtocol, mu: float | None = None) -> float:
    """Smallest power-of-two multiple of the base scale with n^eq below threshold."""
    if p.kind == "dsk":
        return p.param("gamma")
    if p.kind == "fermi_sea":
        return math.pi * p.n0
    if p.kind == "flat":
        return math.pi * p.n0 / p.param("eps")
    k = 1.0
    for _ in range(80):
        if _raw_n_eq(p, np.array([k]), mu=mu)[0] < _N_FLOOR:
            return k
        k *= 2.0
    raise NonConvergenceError("momentum cutoff search did not terminate")


def _breakpoints(p: WignerProtocol) -> tuple[float, ...]:
    # seed panels at the Fermi layer, where low-temperature integrands are sharp
    if p.kind == "thermal":
        mu = p.derived("mu")
        if mu > 0.0:
            return (math.sqrt(2.0 * mu),)
    return ()


def _density_integral(p: WignerProtocol, mu: float | None = None) -> float:
    cut = _doubling_cutoff(p, mu=mu)
    breaks = ()
    if p.kind == "thermal" and mu is not None and mu > 0.0:
        breaks = (math.sqrt(2.0 * mu),)
    val = specfun.adaptive_quad(
        lambda k: _raw_n_eq(p, k, mu=mu), 0.0, cut, tol=1e-12, rtol=1e-12, breakpoints=breaks
    )
    return val / math.pi


def _solve_thermal_mu(p: WignerProtocol) -> float:
    """Chemical potential from the density constraint, by bracketed bisection."""
    f = lambda mu: _density_integral(p, mu=mu) - p.n0
    lo, hi = -1.0, 1.0
    flo, fhi = f(lo), f(hi)
    for _ in range(200):
        if flo < 0.0:
            break
        lo *= 2.0
        flo = f(lo)
    else:
        raise NonConvergenceError("no lower bracket for the chemical potential")
    for _ in range(200):
        if fhi > 0.0:
            break
        hi *= 2.0
        fhi = f(hi)
    else:
        raise NonConvergenceError("no upper bracket for the chemical potential")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) < 1e-12 or hi - lo < 1e-15 * max(1.0, abs(mid)):
            return mid
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
    raise NonConvergenceError("chemical-potential bisection did not converge in 200 steps")


def _validate_bell_shape(p: WignerProtocol) -> None:
    cut = p.k_cut
    grid = np.linspace(0.0, cut * (1.0 - 1e-12), 400)
    vals = _raw_n_eq(p, grid)
    if vals.max() > 1.0 + 1e-12:
        raise ValidationError(f"occupation exceeds one (max {vals.max():.6g}); state is unphysical")
    if np.any(np.diff(vals) > 1e-12):
        raise ValidationError("occupation is not monotone decreasing in |k|")
    total = _density_integral(p, mu=p.derived("mu") if p.kind == "thermal" else None)
    if abs(total - p.n0) > 1e-9:
        raise ValidationError(f"normalization off by {total - p.n0:.3e}")


def resolve_protocol(p: WignerProtocol, validate: bool = True) -> WignerProtocol:
    """Fill derived constants and validate the state.

    Thermal solves the chemical potential against the density constraint;
    DSK computes its normalization in closed form; the remaining kinds have
    nothing to solve.  The resolved state is checked for normalization,
    occupation bounds, and the bell shape.  ``validate=False`` skips the
    physicality checks and admits formal members of a parameter family whose
    occupation exceeds one (needed only to probe the regime where the
    transition map degrades); their moments remain well defined.
    """
    if p.kind not in KINDS:
        raise ValidationError(f"unknown protocol kind {p.kind!r}")
    if p.n0 <= 0.0:
        raise ValidationError("density n0 must be positive")
    derived: dict[str, float] = {}
    if p.kind == "thermal":
        if p.param("beta") <= 0.0:
            raise ValidationError("inverse temperature must be positive")
        mu = _solve_thermal_mu(p)
        derived["mu"] = mu
        derived["k_cut"] = _doubling_cutoff(p, mu=mu)
    elif p.kind == "gaussian":
        if p.param("alpha") <= 0.0:
            raise ValidationError("gaussian width parameter must be positive")
        derived["k_cut"] = _doubling_cutoff(p)
    elif p.kind == "dsk":
        gamma, sigma = p.param("gamma"), p.param("sigma")
        if gamma <= 0.0 or sigma <= 0.0:
            raise ValidationError("dsk parameters must be positive")
        derived["norm"] = _dsk_norm(sigma, p.n0)
        derived["k_cut"] = gamma
    elif p.kind == "fermi_sea":
        derived["k_cut"] = math.pi * p.n0
    elif p.kind == "flat":
        eps = p.param("eps")
        if not 0.0 < eps <= 1.0:
            raise ValidationError("flat-limit epsilon must lie in (0, 1]")
        derived["k_cut"] = math.pi * p.n0 / eps
    resolved = replace(p, resolved=tuple(sorted(derived.items())))
    if validate:
        _validate_bell_shape(resolved)
    return resolved


def n_eq(p: WignerProtocol, k) -> np.ndarray | float:
    """Equilibrium occupation n^eq(k); even in k by construction."""
    if not p.is_resolved:
        raise ValidationError("resolve the protocol before evaluating it")
    out = _raw_n_eq(p, k)
    return float(out) if np.ndim(k) == 0 else out


@dataclass(frozen=True)
class WignerField:
    """Exact transport solution n(x, k, t) = n^eq(k) * theta(kt - x)."""

    protocol: WignerProtocol

    def evaluate(self, x, k, t: float):
        occ = n_eq(self.protocol, k)
        filled = np.asarray(x) <= np.asarray(k) * t
        out = np.where(filled, occ, 0.0)
        return float(out) if np.ndim(out) == 0 else out


def correlation_from_wigner(p: WignerProtocol, r: float) -> float:
    """Two-point function C^eq(r) = (1/pi) * int_0^kcut n^eq(k) cos(kr) dk."""
    if not p.is_resolved:
        raise ValidationError("resolve the protocol before evaluating it")
    cut = p.k_cut
    r = float(r)
    breaks = list(_breakpoints(p))
    if abs(r) * cut > math.pi:
        # one panel seed per half-oscillation keeps the adaptive pass cheap
        n_seed = int(abs(r) * cut / math.pi) + 1
        breaks += list(np.linspace(0.0, cut, min(n_seed, 4000) + 1)[1:-1])
    val = specfun.adaptive_quad(
        lambda k: _raw_n_eq(p, k) * np.cos(k * r), 0.0, cut, breakpoints=breaks
    )
    return val / math.pi


def density_profile(p: WignerProtocol, x: float, t: float) -> float:
    """Particle density rho(x, t) = int_{x/t}^{inf} n^eq(k) dk / 2pi for t > 0."""
    if not p.is_resolved:
        raise ValidationError("resolve the protocol before evaluating it")
    if t <= 0.0:
        raise ValidationError("density profile is defined for t > 0")
    cut = p.k_cut
    lo = max(x / t, -cut)
    if lo >= cut:
        return 0.0
    breaks = tuple(b for b in _breakpoints(p) if lo < b < cut)
    val = specfun.adaptive_quad(lambda k: _raw_n_eq(p, k), lo, cut, breakpoints=breaks)
    return val / (2.0 * math.pi)


def particle_flow(p: WignerProtocol, t: float) -> float:
    """Transferred number N_R(t) = int_0^inf rho(x, t) dx, by nested quadrature.

    Kept as an independent dynamical route; the static moment mu_T(p) * t is
    the closed-form prediction it is compared against.
    """
    x_max = p.k_cut * t

    def rho(xs: np.ndarray) -> np.ndarray:
        return np.array([density_profile(p, float(x), t) for x in np.atleast_1d(xs)])

    return specfun.adaptive_quad(rho, 0.0, x_max, tol=1e-9, rtol=1e-9)


def mu_T(p: WignerProtocol) -> float:
    """Transport measure: first positive momentum moment of n^eq."""
    if not p.is_resolved:
        raise ValidationError("resolve the protocol before evaluating it")
    if p.kind == "flat" and p.param("eps") < EPS_MIN:
        raise DivergenceError(
            f"transport moment diverges as 1/eps; eps={p.param('eps')} is below {EPS_MIN}"
        )
    val = specfun.adaptive_quad(
        lambda k: k * _raw_n_eq(p, k), 0.0, p.k_cut, tol=1e-12, rtol=1e-12,
        breakpoints=_breakpoints(p),
    )
    return val / (2.0 * math.pi)


def mu_C(p: WignerProtocol) -> float:
    """Correlation measure: int n^eq (1 - n^eq) dk / 2pi (higher = less correlated)."""
    if not p.is_resolved:
        raise ValidationError("resolve the protocol before evaluating it")

    def integrand(k: np.ndarray) -> np.ndarray:
        n = _raw_n_eq(p, k)
        return n * (1.0 - n)

    val = specfun.adaptive_quad(
        integrand, 0.0, p.k_cut, tol=1e-12, rtol=1e-12, breakpoints=_breakpoints(p)
    )
    return val / math.pi


def mu_P(p: WignerProtocol) -> float:
    """Purity measure: -int log(n^2 + (1-n)^2) dk / 2pi, zero for sharp seas.

    Uses log1p on 1 - 2n(1-n), which vanishes identically where n is 0 or 1,
    so indicator-type protocols contribute nothing.
    """
    if not p.is_resolved:
        raise ValidationError("resolve the protocol before evaluating it")

    def integrand(k: np.ndarray) -> np.ndarray:
        n = _raw_n_eq(p, k)
        return -np.log1p(-2.0 * n * (1.0 - n))

    val = specfun.adaptive_quad(
        integrand, 0.0, p.k_cut, tol=1e-12, rtol=1e-12, breakpoints=_breakpoints(p)
    )
    return val / math.pi
