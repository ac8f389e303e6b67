"""Cylindrically symmetric surfaces z = f(r) and their curvature data.

A surface of revolution enters the scattering problem only through the
slope function

    G(r) = f'(r) / sqrt(1 + f'(r)^2),

its derivative dG/dr = f''(r) / (1 + f'(r)^2)^(3/2), and the curvatures

    K = G G' / r      (Gaussian),
    M = (G/r + G')/2  (mean),

combined into the potential-like term C(r) = lambda1*K + lambda2*M^2.
Profiles must supply analytic first and second derivatives: the central
defect integrand is sensitive near r = 0, where finite differencing of f
would dominate the error budget.

Asymptotic flatness requires f'(0) = 0 and f'(r) -> 0 at infinity; for the
radial reductions to converge, |G| must additionally decay faster than
r^(-1/4).  The latter is checked numerically and reported as a warning
(not an error) since slowly decaying profiles can still be integrated at
reduced accuracy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "RadialProfile",
    "GaussianBumpParams",
    "MultiBumpSurface",
    "SurfaceAdmissibilityWarning",
    "gaussian_bump_profile",
    "flat_profile",
    "slope_function",
    "slope_function_derivative",
    "curvatures",
    "curvature_potential",
]

_FLATNESS_TOL = 1e-10


class SurfaceAdmissibilityWarning(UserWarning):
    """A profile violates a decay or separation guideline (non-fatal)."""


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Height profile of a surface of revolution with analytic derivatives.

    ``sigma_scale`` is the characteristic length used to place the
    truncation radius of the radial quadratures.  Identity-based equality:
    two profiles are interchangeable only if they are the same object,
    which keeps memoized integral tables coherent.
    """

    f: Callable[[np.ndarray], np.ndarray]
    fdot: Callable[[np.ndarray], np.ndarray]
    fddot: Callable[[np.ndarray], np.ndarray]
    sigma_scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.sigma_scale > 0:
            raise ValueError("sigma_scale must be positive")
        s = self.sigma_scale
        if abs(float(self.fdot(0.0))) > _FLATNESS_TOL:
            raise ValueError("profile must have fdot(0) = 0")
        if abs(float(self.fdot(20.0 * s))) > _FLATNESS_TOL:
            raise ValueError("profile must flatten out: |fdot| > tol at r = 20*sigma_scale")
        # Regularity of the curvatures at the axis: f'(r)/r and f''(r)
        # must approach finite limits.
        r_small = 1e-8 * s
        probe = (float(self.fdot(r_small)) / r_small, float(self.fddot(r_small)))
        if not all(math.isfinite(v) for v in probe):
            raise ValueError("fdot(r)/r and fddot(r) must stay finite as r -> 0")
        # Decay guideline: |G| r^(1/4) -> 0.  Checked far out; warn only.
        r_far = 15.0 * s
        g_far = abs(_slope(self, np.asarray(r_far)))
        if g_far * r_far**0.25 > 1e-6:
            warnings.warn(
                "slope decays slowly (|G| r^(1/4) not small at r = 15*sigma_scale); "
                "truncated radial integrals may lose accuracy",
                SurfaceAdmissibilityWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class GaussianBumpParams:
    """Gaussian bump z = delta * exp(-r^2 / (2 sigma^2)).

    The scattering observables depend on delta only through
    eta = delta^2 / sigma^2, so the sign of delta is irrelevant.
    """

    delta: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.delta == 0:
            raise ValueError("delta must be nonzero (use a flat surface instead)")

    @property
    def eta(self) -> float:
        return (self.delta / self.sigma) ** 2

    @classmethod
    def from_eta(cls, eta: float, sigma: float) -> "GaussianBumpParams":
        if not eta > 0:
            raise ValueError("eta must be positive")
        return cls(delta=math.sqrt(eta) * sigma, sigma=sigma)


@dataclass(frozen=True)
class MultiBumpSurface:
    """Superposition of well-separated Gaussian bumps at given centers."""

    bumps: tuple[tuple[GaussianBumpParams, tuple[float, float]], ...]

    def __post_init__(self) -> None:
        bumps = tuple((p, (float(c[0]), float(c[1]))) for p, c in self.bumps)
        object.__setattr__(self, "bumps", bumps)
        for i, (pi, ci) in enumerate(bumps):
            for pj, cj in bumps[:i]:
                dist = math.hypot(ci[0] - cj[0], ci[1] - cj[1])
                if dist < 3.0 * (pi.sigma + pj.sigma):
                    warnings.warn(
                        f"bump centers {cj} and {ci} are {dist:.3g} apart, closer than "
                        f"3*(sigma+sigma'); the single-bump superposition degrades",
                        SurfaceAdmissibilityWarning,
                        stacklevel=2,
                    )


def gaussian_bump_profile(params: GaussianBumpParams) -> RadialProfile:
    """Radial profile of a single Gaussian bump, with exact derivatives."""
    delta, sigma = params.delta, params.sigma
    inv_s2 = 1.0 / sigma**2

    def f(r):
        return delta * np.exp(-0.5 * np.square(r) * inv_s2)

    def fdot(r):
        return -delta * inv_s2 * r * np.exp(-0.5 * np.square(r) * inv_s2)

    def fddot(r):
        r2 = np.square(r)
        return -delta * inv_s2 * (1.0 - r2 * inv_s2) * np.exp(-0.5 * r2 * inv_s2)

    return RadialProfile(f=f, fdot=fdot, fddot=fddot, sigma_scale=sigma)


def flat_profile(sigma_scale: float = 1.0) -> RadialProfile:
    """The plane itself; every geometric quantity vanishes."""
    zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))
    return RadialProfile(f=zero, fdot=zero, fddot=zero, sigma_scale=sigma_scale)


def _slope(profile: RadialProfile, r):
    fd = np.asarray(profile.fdot(r), dtype=float)
    return fd / np.sqrt(1.0 + fd * fd)


def slope_function(profile: RadialProfile, r):
    """G(r) = f'(r) / sqrt(1 + f'(r)^2)."""
    r = np.asarray(r, dtype=float)
    out = _slope(profile, r)
    return float(out) if out.ndim == 0 else out


def slope_function_derivative(profile: RadialProfile, r):
    """dG/dr = f''(r) / (1 + f'(r)^2)^(3/2), exact given the profile."""
    r = np.asarray(r, dtype=float)
    fd = np.asarray(profile.fdot(r), dtype=float)
    out = np.asarray(profile.fddot(r), dtype=float) / (1.0 + fd * fd) ** 1.5
    return float(out) if out.ndim == 0 else out


def curvatures(profile: RadialProfile, r):
    """Gaussian and mean curvature (K, M) at radius r.

    At r = 0 the analytic limits K = G'(0)^2 and M = G'(0) are used instead
    of the 0/0 quotient forms.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("curvatures require r >= 0")
    gd = slope_function_derivative(profile, r)
    if r.ndim == 0:
        if r == 0.0:
            gd0 = float(gd)
            return gd0 * gd0, gd0
        g_over_r = _slope(profile, r) / r
        return float(g_over_r * gd), float(0.5 * (g_over_r + gd))
    g_over_r = np.empty_like(r)
    at_axis = r == 0.0
    g_over_r[~at_axis] = _slope(profile, r[~at_axis]) / r[~at_axis]
    g_over_r[at_axis] = np.asarray(gd)[at_axis] if np.ndim(gd) else gd
    return g_over_r * gd, 0.5 * (g_over_r + gd)


def curvature_potential(profile: RadialProfile, r, lambda1: float, lambda2: float):
    """C(r) = lambda1 * K(r) + lambda2 * M(r)^2."""
    k_gauss, m_mean = curvatures(profile, r)
    return lambda1 * k_gauss + lambda2 * m_mean * m_mean
