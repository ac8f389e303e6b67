"""Surface profiles: slope function, curvatures, admissibility checks."""

import math

import numpy as np
import pytest

from geoscatter.surface import (
    GaussianBumpParams,
    MultiBumpSurface,
    RadialProfile,
    SurfaceAdmissibilityWarning,
    curvature_potential,
    curvatures,
    flat_profile,
    gaussian_bump_profile,
    slope_function,
    slope_function_derivative,
)


@pytest.fixture
def bump():
    return gaussian_bump_profile(GaussianBumpParams.from_eta(0.1, 1.0))


def test_flat_profile_is_trivial():
    prof = flat_profile()
    r = np.linspace(0.0, 5.0, 11)
    assert np.all(slope_function(prof, r) == 0.0)
    k_gauss, m_mean = curvatures(prof, r)
    assert np.all(k_gauss == 0.0) and np.all(m_mean == 0.0)
    assert np.all(curvature_potential(prof, r, 0.5, -0.5) == 0.0)


def test_bump_slope_frozen_value(bump):
    # delta = sigma*sqrt(0.1): G(sigma) = -sqrt(0.1) e^{-1/2} / sqrt(1 + 0.1 e^{-1})
    fd = -math.sqrt(0.1) * math.exp(-0.5)
    expected = fd / math.sqrt(1.0 + fd * fd)
    assert expected == pytest.approx(-0.18836828761213373, abs=1e-15)
    assert slope_function(bump, 1.0) == pytest.approx(expected, abs=1e-14)


def test_slope_matches_finite_difference_of_height(bump):
    # G = f'/sqrt(1+f'^2) with f' from centered differences of f
    r = np.linspace(0.05, 4.0, 40)
    h = 1e-6
    fd = (bump.f(r + h) - bump.f(r - h)) / (2 * h)
    np.testing.assert_allclose(
        slope_function(bump, r), fd / np.sqrt(1 + fd**2), rtol=1e-8, atol=1e-12
    )


def test_slope_derivative_matches_finite_difference(bump):
    r = np.linspace(0.01, 10.0, 300)
    h = 1e-6
    fd = (slope_function(bump, r + h) - slope_function(bump, r - h)) / (2 * h)
    np.testing.assert_allclose(slope_function_derivative(bump, r), fd, rtol=1e-6, atol=1e-12)


def test_decay_conditions(bump):
    r = 15.0
    assert abs(slope_function(bump, r)) * r**0.25 < 1e-12
    # the quantities entering the radial integrands are negligible at 10 sigma
    g = slope_function(bump, 10.0)
    k_gauss, m_mean = curvatures(bump, 10.0)
    assert g * g < 1e-30
    assert abs(k_gauss) < 1e-30
    assert m_mean * m_mean < 1e-30


def test_curvature_identity_slope_vs_mean_gauss(bump):
    # G^2 + r^2 G'^2 = 2 r^2 (2 M^2 - K)
    rng = np.random.default_rng(7)
    r = rng.uniform(0.02, 6.0, size=50)
    g = slope_function(bump, r)
    gd = slope_function_derivative(bump, r)
    k_gauss, m_mean = curvatures(bump, r)
    lhs = g**2 + r**2 * gd**2
    rhs = 2 * r**2 * (2 * m_mean**2 - k_gauss)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-300)


def test_slope_from_curvatures_branch():
    # G = r (M +/- sqrt(M^2 - K)); the +-branch is fixed by sign(G/r - M)
    prof = gaussian_bump_profile(GaussianBumpParams(delta=-0.4, sigma=1.3))
    r = np.linspace(0.05, 5.0, 60)
    g = slope_function(prof, r)
    k_gauss, m_mean = curvatures(prof, r)
    disc = np.sqrt(np.maximum(m_mean**2 - k_gauss, 0.0))
    plus = g / r >= m_mean
    recon = np.where(plus, r * (m_mean + disc), r * (m_mean - disc))
    np.testing.assert_allclose(recon, g, rtol=1e-7, atol=1e-12)


def test_axis_limits(bump):
    gd0 = slope_function_derivative(bump, 0.0)
    k0, m0 = curvatures(bump, 0.0)
    assert k0 == pytest.approx(gd0 * gd0, rel=1e-14)
    assert m0 == pytest.approx(gd0, rel=1e-14)
    # array evaluation containing the axis agrees with the scalar limits
    k_arr, m_arr = curvatures(bump, np.array([0.0, 1e-7]))
    assert k_arr[0] == pytest.approx(k0, rel=1e-12)
    assert m_arr[0] == pytest.approx(m0, rel=1e-12)
    assert k_arr[1] == pytest.approx(k0, rel=1e-5)


def test_curvature_potential_zero_couplings(bump):
    r = np.linspace(0.0, 4.0, 9)
    assert np.all(curvature_potential(bump, r, 0.0, 0.0) == 0.0)
    assert np.all(curvature_potential(flat_profile(), r, 0.5, -0.5) == 0.0)


def test_curvature_potential_first_order_in_eta():
    # numerical eta-derivative of C against the hand-derived linear term:
    #   K   -> (eta/s^2) (1 - r^2/s^2) e^{-r^2/s^2}
    #   M^2 -> (eta/4s^2) (2 - r^2/s^2)^2 e^{-r^2/s^2}
    sigma = 1.0
    l1, l2 = 0.5, -0.5
    eta = 1e-6
    prof = gaussian_bump_profile(GaussianBumpParams.from_eta(eta, sigma))
    r = np.linspace(0.1, 4.0, 25)
    numeric = curvature_potential(prof, r, l1, l2) / eta
    u = (r / sigma) ** 2
    analytic = (
        l1 * (1 - u) * np.exp(-u) / sigma**2
        + l2 * 0.25 * (2 - u) ** 2 * np.exp(-u) / sigma**2
    )
    np.testing.assert_allclose(numeric, analytic, rtol=1e-4)


def test_eta_delta_equivalence():
    p = GaussianBumpParams.from_eta(0.09, 2.0)
    assert p.eta == pytest.approx(0.09, rel=1e-15)
    assert GaussianBumpParams(delta=-p.delta, sigma=2.0).eta == pytest.approx(p.eta)


def test_profile_admissibility():
    with pytest.raises(ValueError):
        RadialProfile(
            f=lambda r: np.asarray(r, dtype=float),
            fdot=lambda r: np.ones_like(np.asarray(r, dtype=float)),
            fddot=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        )
    with pytest.raises(ValueError):
        GaussianBumpParams(delta=0.1, sigma=0.0)
    with pytest.raises(ValueError):
        GaussianBumpParams(delta=0.0, sigma=1.0)


def test_slowly_decaying_slope_warns():
    # admissible flatness at 0 and 20 but a fat 1/(1+r^2)-type shoulder
    def fdot(r):
        r = np.asarray(r, dtype=float)
        return 1e-4 * r / (1.0 + r * r)

    def fddot(r):
        r = np.asarray(r, dtype=float)
        return 1e-4 * (1.0 - r * r) / (1.0 + r * r) ** 2

    with pytest.raises(ValueError):
        # fdot(20 sigma) exceeds the flatness tolerance
        RadialProfile(f=lambda r: r, fdot=fdot, fddot=fddot, sigma_scale=1.0)

    # a shoulder near 15 sigma: passes the hard flatness checks, trips the soft one
    def fdot_shoulder(r):
        r = np.asarray(r, dtype=float)
        return 1e-4 * np.exp(-(((r - 15.0) / 1.2) ** 2))

    def fddot_shoulder(r):
        r = np.asarray(r, dtype=float)
        return fdot_shoulder(r) * (-2.0 * (r - 15.0) / 1.2**2)

    with pytest.warns(SurfaceAdmissibilityWarning):
        RadialProfile(
            f=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            fdot=fdot_shoulder,
            fddot=fddot_shoulder,
            sigma_scale=1.0,
        )


def test_multibump_separation_warning():
    p = GaussianBumpParams.from_eta(0.1, 1.0)
    with pytest.warns(SurfaceAdmissibilityWarning):
        MultiBumpSurface(((p, (0.0, 0.0)), (p, (4.0, 0.0))))
    # exactly at the 3(sigma+sigma') threshold: no warning
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        MultiBumpSurface(((p, (0.0, 0.0)), (p, (6.0, 0.0))))
