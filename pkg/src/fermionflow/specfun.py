"""Special functions and quadrature shared by the other modules.

Integer-order Bessel functions of the first kind are generated row-wise by
Miller's downward recurrence, normalized with the even-order sum identity
``J_0(t) + 2*sum_k J_{2k}(t) = 1``.  On top of the rows sit the discrete
Bessel kernel, the uniform large-order asymptotics, scaled Bessel products
used by the semi-discrete counting-statistics kernels, and Gauss-Legendre
quadrature with an adaptive panel-refinement driver.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .errors import NonConvergenceError, ValidationError

__all__ = [
    "BesselRow",
    "QuadratureRule",
    "bessel_row",
    "discrete_bessel_kernel",
    "bessel_uniform_asymptotic",
    "gauss_legendre",
    "adaptive_quad",
    "scaled_bessel_grow",
    "scaled_bessel_decay",
]

# Rescaling threshold for the downward recurrence; keeps iterates in range
# without losing the relative scale of the decaying tail.
_RESCALE = 1e280


@dataclass(frozen=True)
class BesselRow:
    """Values J_n(t) for all integer orders n in [n_min, n_max]."""

    t: float
    n_min: int
    n_max: int
    values: np.ndarray

    def value(self, n: int) -> float:
        if not self.n_min <= n <= self.n_max:
            raise IndexError(f"order {n} outside [{self.n_min}, {self.n_max}]")
        return float(self.values[n - self.n_min])


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on an interval (lo, hi)."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(np.asarray(f(self.nodes), dtype=float), self.weights))


def _miller_start(t: float, n_max: int) -> int:
    # The start order must sit above both the largest requested order and the
    # turning point n ~ t, otherwise the minimal solution is not yet locked in.
    return max(n_max, int(math.ceil(t))) + max(20, int(math.ceil(10.0 * t ** (1.0 / 3.0))))


@lru_cache(maxsize=256)
def _bessel_row_nonneg(t: float, n_max: int) -> np.ndarray:
    """J_0(t)..J_{n_max}(t) by normalized downward recurrence."""
    if t < 0.0:
        raise ValidationError("bessel argument must be non-negative")
    if t == 0.0:
        row = np.zeros(n_max + 1)
        row[0] = 1.0
        row.setflags(write=False)
        return row
    start = _miller_start(t, n_max)
    vals = np.zeros(start + 2)
    vals[start + 1] = 0.0
    vals[start] = 1e-280
    for n in range(start, 0, -1):
        vals[n - 1] = (2.0 * n / t) * vals[n] - vals[n + 1]
        if abs(vals[n - 1]) > _RESCALE:
            vals[n - 1:] *= 1.0 / _RESCALE
    norm = vals[0] + 2.0 * vals[2::2].sum()
    row = vals[: n_max + 1] / norm
    row.setflags(write=False)
    return row


def bessel_row(t: float, n_min: int, n_max: int) -> BesselRow:
    """Bessel functions of the first kind for a contiguous range of orders.

    Parameters
    ----------
    t : float
        Argument, t >= 0.
    n_min, n_max : int
        Inclusive order range; negative orders follow from
        J_{-n}(t) = (-1)^n J_n(t).

    Returns
    -------
    BesselRow
        Row accurate to ~1e-13 absolute across all orders.
    """
    if n_min > n_max:
        raise ValidationError("n_min must not exceed n_max")
    top = max(abs(n_min), abs(n_max))
    base = _bessel_row_nonneg(float(t), top)
    orders = np.arange(n_min, n_max + 1)
    values = base[np.abs(orders)] * np.where((orders < 0) & (orders % 2 != 0), -1.0, 1.0)
    return BesselRow(t=float(t), n_min=n_min, n_max=n_max, values=values)


def _tail_order(t: float) -> int:
    # Orders beyond t + 10 t^{1/3} + 30 contribute < 1e-16 to kernel sums.
    return int(math.ceil(t + 10.0 * t ** (1.0 / 3.0) + 30.0)) if t > 0 else 1


def discrete_bessel_kernel(t: float, m: int, n: int) -> float:
    """Discrete Bessel kernel B_t(m, n) = sum_{j>=0} J_{m+j}(t) J_{n+j}(t).

    Off the diagonal the telescoped two-Bessel closed form is used; on the
    diagonal the series is summed directly (truncated once terms drop below
    1e-16), which fixes the value the closed form leaves as a 0/0 limit.
    """
    if t < 0.0:
        raise ValidationError("kernel time must be non-negative")
    if t == 0.0:
        return 1.0 if (m == n and m <= 0) else 0.0
    if m == n:
        hi = max(m, _tail_order(t))
        row = bessel_row(t, m, hi)
        return float(np.dot(row.values, row.values))
    lo = min(m, n) - 1
    row = bessel_row(t, lo, max(m, n))
    jm1, jn = row.value(m - 1), row.value(n)
    jm, jn1 = row.value(m), row.value(n - 1)
    return t / (2.0 * (m - n)) * (jm1 * jn - jm * jn1)


def bessel_uniform_asymptotic(u: float, t: float) -> float:
    """Large-order approximant of J_{ut}(t) for 0 < u < 1.

    Accurate in the oscillatory region away from the turning point; the
    envelope diverges as (1-u^2)^{-1/4} when u -> 1.
    """
    if not 0.0 < u < 1.0:
        raise ValidationError("asymptotic parameter u must lie in (0, 1)")
    s = math.sqrt(1.0 - u * u)
    amp = math.sqrt(2.0 / (math.pi * t * s))
    phase = t * (s - u * math.acos(u)) - math.pi / 4.0
    return amp * math.cos(phase)


@lru_cache(maxsize=128)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=4096)
def gauss_legendre(n_nodes: int, lo: float, hi: float) -> QuadratureRule:
    """Gauss-Legendre rule on (lo, hi); exact for polynomials of degree 2n-1."""
    if n_nodes < 1:
        raise ValidationError("need at least one quadrature node")
    if not lo < hi:
        raise ValidationError("quadrature interval must have lo < hi")
    x, w = _leggauss(n_nodes)
    half = 0.5 * (hi - lo)
    nodes = lo + half * (x + 1.0)
    weights = half * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights, interval=(lo, hi))


def adaptive_quad(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    *,
    tol: float = 1e-10,
    rtol: float = 1e-10,
    breakpoints: Iterable[float] = (),
    max_panels: int = 4000,
) -> float:
    """Adaptive Gauss-Legendre integration of a vectorized integrand.

    Panels are bisected worst-error-first (error gauged by nested 16/32-node
    rules) until the summed estimate is converged to ``tol`` absolute or
    ``rtol`` relative.  ``breakpoints`` seed the initial panelization, e.g.
    at kinks or known sharp layers.
    """
    if not lo < hi:
        if lo == hi:
            return 0.0
        raise ValidationError("integration interval must have lo <= hi")
    edges = [lo] + sorted(b for b in set(breakpoints) if lo < b < hi) + [hi]

    def measure(a: float, b: float) -> tuple[float, float]:
        coarse = gauss_legendre(16, a, b)
        fine = gauss_legendre(32, a, b)
        ic = float(np.dot(np.asarray(f(coarse.nodes), dtype=float), coarse.weights))
        if_ = float(np.dot(np.asarray(f(fine.nodes), dtype=float), fine.weights))
        return abs(if_ - ic), if_

    heap: list[tuple[float, float, float, float]] = []
    for a, b in zip(edges[:-1], edges[1:]):
        err, val = measure(a, b)
        heapq.heappush(heap, (-err, a, b, val))
    while True:
        total = math.fsum(item[3] for item in heap)
        err_total = math.fsum(-item[0] for item in heap)
        if err_total <= max(tol, rtol * abs(total)):
            return total
        if len(heap) >= max_panels:
            raise NonConvergenceError(
                f"adaptive quadrature stalled at {len(heap)} panels, error {err_total:.3e}"
            )
        _, a, b, _ = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        for aa, bb in ((a, mid), (mid, b)):
            err, val = measure(aa, bb)
            heapq.heappush(heap, (-err, aa, bb, val))


def _log_factor_series(u: int, x: float) -> float:
    """J_u(x) / ((x/2)^u / u!) via the ascending series; used deep in the decay region."""
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    for m in range(1, 600):
        term *= -q / (m * (u + m))
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    return total


def scaled_bessel_grow(t: float, x: float, u_max: int) -> np.ndarray:
    """(t/x)^u * J_u(x) for u = 0..u_max, stable where J_u alone underflows.

    The product is bounded by (t/2)^u / u! even when the two factors overflow
    and underflow separately, so underflowed row entries are replaced by the
    log-space series route.
    """
    if t <= 0.0 or x <= 0.0:
        raise ValidationError("scaled rows need t > 0 and x > 0")
    row = _bessel_row_nonneg(float(x), u_max)
    u = np.arange(u_max + 1)
    out = np.empty(u_max + 1)
    log_ratio = math.log(t / x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        mag = np.where(row != 0.0, np.log(np.abs(row)) + u * log_ratio, -np.inf)
        out = np.sign(row) * np.exp(mag)
    dead = row == 0.0
    if np.any(dead):
        for ui in np.nonzero(dead)[0]:
            lg = ui * math.log(0.5 * t) - math.lgamma(ui + 1.0)
            out[ui] = math.exp(lg) * _log_factor_series(int(ui), x) if lg > -745.0 else 0.0
    return out


def scaled_bessel_decay(t: float, x: float, u_max: int) -> np.ndarray:
    """(x/t)^u * J_{u-1}(x) for u = 0..u_max (both factors bounded by one for x <= t)."""
    if t <= 0.0 or x <= 0.0:
        raise ValidationError("scaled rows need t > 0 and x > 0")
    row = bessel_row(x, -1, max(u_max - 1, 0)).values
    u = np.arange(u_max + 1)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        scale = np.exp(u * math.log(x / t))
    return scale * row[: u_max + 1]
