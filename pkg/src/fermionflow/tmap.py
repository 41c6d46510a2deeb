"""Transition-map machinery between transport and correlation measures.

The three one-parameter protocol families (thermal in beta, Gaussian in
alpha, deformed sine kernel in gamma at fixed sigma = 2) are inverted
against a target transport value x = mu_T; their correlation images then
define the transition map and its dispersion, the smallness of which makes
the map protocol-quasi-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import continuum, specfun
from .errors import NonConvergenceError, ValidationError

__all__ = [
    "SIGMA_DSK",
    "TransitionSample",
    "DispersionResult",
    "invert_mu_T",
    "transition_sample",
    "dispersion",
    "gaussian_transition_map",
    "purity_transition_map",
]

SIGMA_DSK = 2.0

_KINDS = ("thermal", "gaussian", "dsk")

# |mu_T(param) - x| accepted by the inversion
_INVERT_TOL = 1e-10


@dataclass(frozen=True)
class TransitionSample:
    """Inverted parameters and measure images for one target transport value."""

    x: float
    n0: float
    measure: str
    beta: float
    alpha: float
    gamma: float
    images: tuple[float, float, float]  # thermal, gaussian, dsk order

    @property
    def centroid(self) -> float:
        return sum(self.images) / 3.0

    @property
    def mean_abs_deviation(self) -> float:
        yb = self.centroid
        return sum(abs(y - yb) for y in self.images) / 3.0

    @property
    def relative_spread(self) -> float:
        yb = self.centroid
        return max(abs(y - yb) for y in self.images) / yb


@dataclass(frozen=True)
class DispersionResult:
    measure: str
    n0: float
    grid: np.ndarray
    samples: tuple[TransitionSample, ...]
    delta: float


def _resolve(kind: str, param: float, n0: float, validate: bool) -> continuum.WignerProtocol:
    if kind == "thermal":
        p = continuum.thermal(param, n0)
    elif kind == "gaussian":
        p = continuum.gaussian(param, n0)
    elif kind == "dsk":
        p = continuum.deformed_sine_kernel(param, n0, SIGMA_DSK)
    else:
        raise ValidationError(f"unknown protocol family {kind!r}")
    return continuum.resolve_protocol(p, validate=validate)


def _mu_T_at(kind: str, param: float, n0: float, validate: bool) -> float:
    return continuum.mu_T(_resolve(kind, param, n0, validate))


def dsk_physical_floor(n0: float, sigma: float = SIGMA_DSK) -> float:
    """Smallest gamma with peak occupation at most one."""
    return 2.0 * math.sqrt(math.pi) * sigma * n0 / float(math.erf(sigma))


def invert_mu_T(kind: str, x: float, n0: float, *, validate: bool = False) -> float:
    """Unique protocol parameter with mu_T(parameter) = x, by bracketed bisection.

    mu_T is strictly decreasing in beta and strictly increasing in alpha and
    gamma, so a sign-changing bracket pins the root.  By default the whole
    formal parameter family is admitted (any alpha, gamma > 0, beta > 0);
    with ``validate=True`` the bracket is confined to the physical range
    (occupation <= 1), which floors the attainable x at n0^2 for Gaussian
    and ~0.99 n0^2 for DSK.
    """
    if kind not in _KINDS:
        raise ValidationError(f"unknown protocol family {kind!r}")
    if x <= 0.0:
        raise ValidationError("target transport value must be positive")
    if kind == "thermal":
        bound = math.pi * n0 * n0 / 4.0
        if x <= bound:
            raise ValidationError(
                f"x={x} is at or below the zero-temperature bound pi*n0^2/4 = {bound:.6g}"
            )
        return _bisect_decreasing(kind, x, n0, validate)
    if kind == "gaussian":
        lo = math.pi * n0 * n0 if validate else 1e-12
    else:
        lo = dsk_physical_floor(n0) if validate else 1e-12
    return _bisect_increasing(kind, x, n0, lo, validate)


def _bisect_increasing(kind: str, x: float, n0: float, lo: float, validate: bool) -> float:
    flo = _mu_T_at(kind, lo, n0, validate) - x
    if flo > _INVERT_TOL:
        raise ValidationError(
            f"x={x} is below the attainable range of the {kind} family (floor mu_T = {flo + x:.6g})"
        )
    if abs(flo) <= _INVERT_TOL:
        return lo
    hi = max(2.0 * lo, 1.0)
    for _ in range(100):
        if _mu_T_at(kind, hi, n0, validate) > x:
            break
        hi *= 2.0
    else:
        raise NonConvergenceError(f"no upper bracket for the {kind} family after 100 doublings")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = _mu_T_at(kind, mid, n0, validate) - x
        if abs(fm) <= _INVERT_TOL:
            return mid
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
    raise NonConvergenceError(f"{kind} inversion did not reach tolerance at x={x}")


def _bisect_decreasing(kind: str, x: float, n0: float, validate: bool) -> float:
    lo, hi = 1e-3, 30.0
    for _ in range(100):
        if _mu_T_at(kind, lo, n0, validate) > x:
            break
        lo /= 2.0
    else:
        raise NonConvergenceError("no hot-side bracket for the thermal family after 100 halvings")
    for _ in range(100):
        if _mu_T_at(kind, hi, n0, validate) < x:
            break
        hi *= 2.0
    else:
        raise NonConvergenceError("no cold-side bracket for the thermal family after 100 doublings")
    for _ in range(200):
        mid = math.sqrt(lo * hi)  # beta spans decades; bisect its logarithm
        fm = _mu_T_at(kind, mid, n0, validate) - x
        if abs(fm) <= _INVERT_TOL:
            return mid
        if fm > 0.0:
            lo = mid
        else:
            hi = mid
    raise NonConvergenceError(f"thermal inversion did not reach tolerance at x={x}")


def transition_sample(
    x: float, n0: float, measure: str = "mu_C", *, validate: bool = False
) -> TransitionSample:
    """Invert all three families at x and evaluate the requested measure."""
    if measure not in ("mu_C", "mu_P"):
        raise ValidationError("measure must be 'mu_C' or 'mu_P'")
    fn = continuum.mu_C if measure == "mu_C" else continuum.mu_P
    params = {}
    images = []
    for kind in _KINDS:
        try:
            param = invert_mu_T(kind, x, n0, validate=validate)
        except (ValidationError, NonConvergenceError) as exc:
            raise type(exc)(f"inversion failed at x={x} for the {kind} family: {exc}") from exc
        params[kind] = param
        images.append(fn(_resolve(kind, param, n0, validate)))
    return TransitionSample(
        x=x,
        n0=n0,
        measure=measure,
        beta=params["thermal"],
        alpha=params["gaussian"],
        gamma=params["dsk"],
        images=tuple(images),
    )


def default_grid() -> np.ndarray:
    return np.round(np.arange(0.01, 0.4001, 0.01), 10)


def dispersion(
    measure: str,
    grid: np.ndarray | None = None,
    n0: float = 0.1,
    *,
    validate: bool = False,
) -> DispersionResult:
    """Averaged centroid-normalized spread of the measure images over the grid.

    delta = | (1/N) sum_j (1/(3 ybar_j)) sum_i |y_i(x_j) - ybar_j| |, with a
    deterministic summation order so repeated runs are bit-identical.
    """
    xs = default_grid() if grid is None else np.asarray(grid, dtype=float)
    samples = tuple(transition_sample(float(x), n0, measure, validate=validate) for x in xs)
    contributions = [s.mean_abs_deviation / s.centroid for s in samples]
    delta = abs(math.fsum(contributions) / len(contributions))
    return DispersionResult(measure=measure, n0=n0, grid=xs, samples=samples, delta=delta)


def gaussian_transition_map(x: float, n0: float) -> float:
    """Closed-form map x = mu_T -> mu_C through the Gaussian family.

    Defined on x >= n0^2/sqrt(2), where it vanishes; increasing toward the
    asymptote n0.
    """
    lo = n0 * n0 / math.sqrt(2.0)
    if x < lo * (1.0 - 1e-12):
        raise ValidationError(f"transition map domain starts at n0^2/sqrt(2) = {lo:.6g}, got {x}")
    return n0 * (1.0 - n0 * n0 / (math.sqrt(2.0) * x))


def purity_transition_map(x: float, n0: float) -> float:
    """Formal purity image of the Gaussian family at transport value x.

    Evaluates int dk/2pi log(1 - 2 q (1 - q)) with
    q(k) = (n0^2/x) exp(-n0^2 k^2 / (4 pi x^2)).  On the physical branch
    x >= n0^2 this equals -mu_P of the Gaussian protocol with
    alpha = pi x^2 / n0^2 (the printed integrand is the negative of the
    purity integrand); it decreases from positive values through zero at
    x = n0^2 toward the flat-state limit -2 n0 as x -> infinity.
    """
    if x <= 0.0:
        raise ValidationError("transport value must be positive")
    peak = n0 * n0 / x

    def integrand(k: np.ndarray) -> np.ndarray:
        q = peak * np.exp(-(n0 * n0) * k * k / (4.0 * math.pi * x * x))
        arg = -2.0 * q * (1.0 - q)
        if np.any(arg <= -1.0):
            bad = float(np.asarray(k).flat[int(np.argmax(arg <= -1.0))])
            raise ValidationError(f"log argument vanished at k={bad}")
        return np.log1p(arg)

    # support where q is above threshold; the tail contributes O(q)
    k_cut = (2.0 * x * math.sqrt(math.pi) / n0) * math.sqrt(
        max(math.log(max(peak, 1.0) / 1e-18), math.log(1e18))
    )
    val = specfun.adaptive_quad(integrand, 0.0, k_cut, tol=1e-12, rtol=1e-12)
    return val / math.pi
