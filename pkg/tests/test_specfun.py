"""Tests for Bessel rows, the discrete kernel, asymptotics, and quadrature."""

import math

import numpy as np
import pytest
import scipy.special as sp

from fermionflow import specfun
from fermionflow.errors import ValidationError


def j0_series(t: float) -> float:
    """Independent ascending-series oracle for J_0(t) (fsum-compensated)."""
    q = -0.25 * t * t
    terms, term = [1.0], 1.0
    for k in range(1, 80):
        term *= q / (k * k)
        terms.append(term)
        if abs(term) < 1e-20:
            break
    return math.fsum(terms)


def test_row_at_zero_is_kronecker():
    row = specfun.bessel_row(0.0, -2, 2)
    assert np.array_equal(row.values, [0.0, 0.0, 1.0, 0.0, 0.0])


def test_j0_of_10_against_series_oracle():
    got = specfun.bessel_row(10.0, 0, 0).value(0)
    assert got == pytest.approx(j0_series(10.0), abs=1e-12)
    assert got == pytest.approx(-0.2459358, abs=5e-8)


def test_negative_order_parity():
    row = specfun.bessel_row(5.0, -1, 1)
    assert row.value(-1) == -row.value(1)


def test_rows_match_scipy_to_1e12():
    for t in [0.5, 1.0, 5.0, 10.0, 50.0, 300.0]:
        hi = int(t) + 80
        row = specfun.bessel_row(t, -hi, hi)
        ref = sp.jv(np.arange(-hi, hi + 1), t)
        assert np.max(np.abs(row.values - ref)) < 1e-12


def test_row_invariants():
    for t in [0.5, 1.0, 5.0, 10.0, 50.0]:
        hi = int(t) + 60
        row = specfun.bessel_row(t, 0, hi)
        vals = row.values
        assert np.all(np.abs(vals) <= 1.0 + 1e-15)
        norm = vals[0] + 2.0 * vals[2::2].sum()
        assert abs(norm - 1.0) < 1e-12
        # three-term recurrence, relative to the local magnitude
        n = np.arange(1, hi)
        lhs = vals[:-2][n - 1] + vals[2:][n - 1]
        rhs = (2.0 * n / t) * vals[1:-1][n - 1]
        scale = np.maximum.reduce([np.abs(vals[:-2][n - 1]), np.abs(vals[2:][n - 1]), 1e-300 * np.ones_like(lhs)])
        assert np.max(np.abs(lhs - rhs) / scale) < 1e-10


def test_squared_sum_unity():
    for t in [0.5, 1.0, 5.0, 10.0, 50.0]:
        n = int(t) + 40
        row = specfun.bessel_row(t, -n, n)
        assert abs(np.dot(row.values, row.values) - 1.0) < 1e-10


def test_kernel_trivial_time_zero():
    assert specfun.discrete_bessel_kernel(0.0, 3, 3) == 0.0
    assert specfun.discrete_bessel_kernel(0.0, 0, 0) == 1.0


def test_kernel_offdiag_matches_series():
    t = 8.0
    direct = math.fsum(sp.jv(2 + j, t) * sp.jv(5 + j, t) for j in range(120))
    assert specfun.discrete_bessel_kernel(t, 2, 5) == pytest.approx(direct, abs=1e-10)


def test_kernel_diag_matches_series():
    t = 8.0
    for n in [-4, 0, 3]:
        direct = math.fsum(sp.jv(n + j, t) ** 2 for j in range(150))
        assert specfun.discrete_bessel_kernel(t, n, n) == pytest.approx(direct, abs=1e-12)


def test_kernel_symmetry_exact():
    rng = np.random.default_rng(7)
    for _ in range(30):
        t = float(rng.uniform(0.2, 20.0))
        m, n = rng.integers(-15, 15, size=2)
        if m == n:
            continue
        assert specfun.discrete_bessel_kernel(t, int(m), int(n)) == specfun.discrete_bessel_kernel(t, int(n), int(m))


def test_christoffel_darboux_identity():
    rng = np.random.default_rng(11)
    for _ in range(40):
        t = float(rng.uniform(0.5, 12.0))
        m, n = (int(v) for v in rng.integers(-10, 10, size=2))
        a = int(rng.integers(-12, 6))
        b = a + int(rng.integers(0, 12))
        direct = math.fsum(
            sp.jv(n - j, t) * sp.jv(m - j, t) for j in range(a, b + 1)
        )
        kernels = specfun.discrete_bessel_kernel(t, m - b, n - b) - specfun.discrete_bessel_kernel(
            t, m - a + 1, n - a + 1
        )
        assert kernels == pytest.approx(direct, abs=1e-10)


def test_asymptotic_against_exact_row():
    # order 200 at t=400
    exact = specfun.bessel_row(400.0, 200, 200).value(200)
    approx = specfun.bessel_uniform_asymptotic(0.5, 400.0)
    assert abs(approx - exact) < 5e-3

    # envelope-relative accuracy at large t
    u, t = 0.3, 1000.0
    exact = specfun.bessel_row(t, 300, 300).value(300)
    approx = specfun.bessel_uniform_asymptotic(u, t)
    envelope = math.sqrt(2.0 / (math.pi * t * math.sqrt(1.0 - u * u)))
    assert abs(approx - exact) <= 1e-2 * envelope


def test_asymptotic_amplitude_diverges_near_one():
    amps = []
    for u in [0.9, 0.99, 0.999]:
        s = math.sqrt(1.0 - u * u)
        amps.append(math.sqrt(2.0 / (math.pi * 100.0 * s)))
    assert amps[0] < amps[1] < amps[2]
    with pytest.raises(ValidationError):
        specfun.bessel_uniform_asymptotic(1.0, 100.0)


def test_gauss_legendre_quadratic_exact():
    rule = specfun.gauss_legendre(2, -1.0, 1.0)
    assert rule.integrate(lambda x: x**2) == pytest.approx(2.0 / 3.0, abs=1e-13)


def test_gauss_legendre_rule_invariants():
    rule = specfun.gauss_legendre(50, 0.0, 1.0)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(rule.nodes) > 0)
    assert rule.nodes[0] > 0.0 and rule.nodes[-1] < 1.0
    # degree-(2n-1) exactness on a random polynomial
    rng = np.random.default_rng(3)
    coeffs = rng.standard_normal(2 * 50)
    poly = np.polynomial.Polynomial(coeffs)
    exact = poly.integ()(1.0) - poly.integ()(0.0)
    assert rule.integrate(poly) == pytest.approx(exact, abs=1e-12)


def test_adaptive_quad_smooth_and_peaked():
    val = specfun.adaptive_quad(np.exp, 0.0, 1.0)
    assert val == pytest.approx(math.e - 1.0, abs=1e-12)
    # narrow Lorentzian layer, resolved by panel refinement
    w = 1e-4
    f = lambda x: w / (w**2 + (x - 0.37) ** 2)
    val = specfun.adaptive_quad(f, 0.0, 1.0, breakpoints=[0.37])
    exact = math.atan(0.63 / w) + math.atan(0.37 / w)
    assert val == pytest.approx(exact, rel=1e-9)


def test_scaled_rows_match_direct_products():
    t, x = 10.0, 0.05
    u = np.arange(41)
    grow = specfun.scaled_bessel_grow(t, x, 40)
    direct = (t / x) ** u * sp.jv(u, x)
    assert np.max(np.abs(grow - direct) / np.maximum(np.abs(direct), 1e-250)) < 1e-11
    decay = specfun.scaled_bessel_decay(t, x, 6)
    ref = (x / t) ** np.arange(7) * sp.jv(np.arange(7) - 1, x)
    assert np.allclose(decay, ref, rtol=1e-12, atol=1e-300)
