"""Adaptive quadrature: closed-form oracles, tolerance behavior, open rule."""

import math

import numpy as np
import pytest

from geoscatter.quad import (
    QuadratureConvergenceError,
    QuadratureSpec,
    integrate_plane,
    integrate_radial,
)
from geoscatter.specfun import EULER_GAMMA, bessel_j

# Frozen oracle values:
#  - Weber integral int_0^inf r e^{-r^2} J0(kappa r) dr = exp(-kappa^2/4)/2,
#    cross-checked against 50-digit quadrature during development.
#  - Gaussian integral sqrt(pi)/2.
#  - int_0^inf r ln r e^{-r^2} dr = Gamma'(1)/4 = -gamma/4 (substitute u=r^2).
WEBER_AT_2 = math.exp(-1.0) / 2.0            # 0.18393972058572117
GAUSS_HALF = math.sqrt(math.pi) / 2.0        # 0.8862269254527579
LOG_MOMENT = -EULER_GAMMA / 4.0              # -0.1443039162253832


def weber(r):
    return r * np.exp(-np.square(r)) * bessel_j(0, 2.0 * r)


def gaussian(r):
    return np.exp(-np.square(r))


def log_damped(r):
    return r * np.log(r) * np.exp(-np.square(r))


def test_weber_integral():
    spec = QuadratureSpec()
    assert integrate_radial(weber, spec).real == pytest.approx(WEBER_AT_2, abs=1e-12)


def test_gaussian_integral():
    spec = QuadratureSpec()
    assert integrate_radial(gaussian, spec).real == pytest.approx(GAUSS_HALF, abs=1e-12)


def test_log_singular_integrand():
    spec = QuadratureSpec()
    assert integrate_radial(log_damped, spec).real == pytest.approx(LOG_MOMENT, abs=1e-10)


def test_origin_is_never_sampled():
    spec = QuadratureSpec()

    def f(r):
        assert np.all(np.asarray(r) > 0.0)
        return np.log(r) ** 2 * np.exp(-np.square(r))

    value = integrate_radial(f, spec)
    assert math.isfinite(value.real)


def test_halving_rel_tol_does_not_worsen_oracles():
    for f, exact in ((weber, WEBER_AT_2), (gaussian, GAUSS_HALF), (log_damped, LOG_MOMENT)):
        prev = None
        rel = 1e-4
        while rel >= 1e-9:
            spec = QuadratureSpec(rel_tol=rel, abs_tol=1e-15)
            err = abs(integrate_radial(f, spec).real - exact)
            if prev is not None:
                assert err <= prev + 1e-15
            prev = err
            rel /= 2.0


def test_truncation_radius_independence():
    # beyond the point where the damping undercuts abs_tol the cut is moot
    s1 = QuadratureSpec(truncation_radius=8.0)
    s2 = QuadratureSpec(truncation_radius=12.0)
    v1 = integrate_radial(weber, s1)
    v2 = integrate_radial(weber, s2)
    assert abs(v1 - v2) <= 10 * s1.abs_tol


def test_convergence_error_carries_estimate():
    spec = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-16, max_subdivisions=6)
    with pytest.raises(QuadratureConvergenceError) as info:
        integrate_radial(lambda r: np.cos(40.0 * r) * np.exp(-np.square(r)), spec)
    err = info.value
    assert math.isfinite(err.estimate.real)
    assert err.error_bound > 0
    assert err.subdivisions >= 6


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=-1.0)
    with pytest.raises(ValueError):
        QuadratureSpec(truncation_radius=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=0)


def test_plane_gaussian():
    spec = QuadratureSpec()
    val = integrate_plane(lambda x, y: np.exp(-(x**2 + y**2)), 8.0, spec)
    assert val.real == pytest.approx(math.pi, abs=1e-9)
    assert abs(val.imag) < 1e-12


def test_plane_oscillatory_gaussian():
    # complete the square: int e^{-r^2} e^{ix} d^2x = pi exp(-1/4)
    spec = QuadratureSpec()
    val = integrate_plane(lambda x, y: np.exp(-(x**2 + y**2)) * np.exp(1j * x), 8.0, spec)
    assert abs(val - math.pi * math.exp(-0.25)) < 1e-9


def test_plane_reduces_to_radial_for_radial_integrand():
    spec = QuadratureSpec()

    def radial(r):
        return np.exp(-np.square(r)) * np.cos(r)

    plane = integrate_plane(lambda x, y: radial(np.hypot(x, y)), 9.0, spec)
    reduced = 2.0 * math.pi * integrate_radial(lambda r: r * radial(r), spec, upper=9.0)
    assert abs(plane - reduced) <= 1e-8 * abs(reduced)


def test_radial_interval_validation():
    spec = QuadratureSpec()
    with pytest.raises(ValueError):
        integrate_radial(gaussian, spec, lower=2.0, upper=1.0)
