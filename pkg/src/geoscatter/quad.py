"""Adaptive quadrature for the radial and planar integrals of the solver.

The production integrands are semi-infinite radial integrals whose
oscillatory Bessel/Hankel factors are damped by a Gaussian envelope (the
squared slope of the surface profile), possibly with an integrable
logarithmic singularity at r = 0.  Truncating at ``truncation_radius``
makes the tail negligible, and the remaining finite-interval problem is
handled by globally adaptive bisection with an open Gauss-Legendre pair
rule (15- and 31-point), so the endpoint r = 0 is never sampled.

Integrands must be vectorized: they receive a float ndarray of abscissae
and return an ndarray (real or complex) of the same shape.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadratureConvergenceError",
    "integrate_radial",
    "integrate_plane",
]

# Open nested pair: the 31-point value is the estimate, |I31 - I15| the
# error proxy.  Gauss-Legendre nodes are strictly interior.
_X_LO, _W_LO = np.polynomial.legendre.leggauss(15)
_X_HI, _W_HI = np.polynomial.legendre.leggauss(31)

_MAX_ANGULAR_POINTS = 1 << 15


@dataclass(frozen=True)
class QuadratureSpec:
    """Error targets and truncation controls for the adaptive integrators.

    ``truncation_radius`` is expressed in units of the characteristic
    damping length of the integrand (callers scale it to physical length
    before use); the default of 10 puts the Gaussian envelope below 1e-43
    at the cut, so the discarded tail is irrelevant at these tolerances.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    truncation_radius: float = 10.0
    max_subdivisions: int = 2000

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.truncation_radius > 0:
            raise ValueError("truncation_radius must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


class QuadratureConvergenceError(RuntimeError):
    """Raised when the error target is not met within max_subdivisions.

    Carries the best available estimate and its error bound so callers can
    decide whether the partial result is still usable.
    """

    def __init__(self, estimate: complex, error_bound: float, subdivisions: int):
        self.estimate = estimate
        self.error_bound = error_bound
        self.subdivisions = subdivisions
        super().__init__(
            f"quadrature did not converge after {subdivisions} subdivisions: "
            f"estimate={estimate}, error bound={error_bound:.3e}"
        )


def _panel(f: Callable[[np.ndarray], np.ndarray], a: float, b: float):
    """Return (I_hi, err) for one panel using the nested GL pair."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    y_lo = np.asarray(f(mid + half * _X_LO))
    y_hi = np.asarray(f(mid + half * _X_HI))
    i_lo = half * (_W_LO @ y_lo)
    i_hi = half * (_W_HI @ y_hi)
    return i_hi, abs(i_hi - i_lo)


def integrate_radial(
    f: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec,
    lower: float = 0.0,
    upper: float | None = None,
) -> complex:
    """Integrate f over (lower, upper] with adaptive open quadrature.

    ``upper`` defaults to ``spec.truncation_radius``; the integral is
    treated as the truncated stand-in for the semi-infinite one.  The
    result satisfies |error| <= max(abs_tol, rel_tol * |result|) as
    estimated by the nested rule, otherwise
    :class:`QuadratureConvergenceError` is raised.
    """
    if upper is None:
        upper = spec.truncation_radius
    if not upper > lower:
        raise ValueError("empty integration interval")

    # A few seed panels so distinct features (origin singularity,
    # oscillations) are separated before adaptivity starts.
    n_seed = 4
    edges = np.linspace(lower, upper, n_seed + 1)
    heap: list[tuple[float, int, float, float, complex]] = []
    counter = 0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = _panel(f, a, b)
        heapq.heappush(heap, (-err, counter, a, b, val))
        counter += 1

    while True:
        total = sum(item[4] for item in heap)
        total_err = -sum(item[0] for item in heap)
        target = max(spec.abs_tol, spec.rel_tol * abs(total))
        if total_err <= target:
            break
        if counter >= spec.max_subdivisions:
            raise QuadratureConvergenceError(total, total_err, counter)
        _, _, a, b, _ = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        for lo, hi in ((a, mid), (mid, b)):
            val, err = _panel(f, lo, hi)
            heapq.heappush(heap, (-err, counter, lo, hi, val))
            counter += 1

    # Sum panels in positional order so the result does not depend on the
    # heap's internal layout.
    return complex(sum(item[4] for item in sorted(heap, key=lambda t: t[2])))


def _angular_average(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    r: np.ndarray,
    spec: QuadratureSpec,
) -> np.ndarray:
    """Full-circle integral of f at each radius in ``r``.

    Midpoint rule with doubling: for smooth periodic integrands it
    converges spectrally, and its nodes avoid theta = 0 so the rule stays
    open in both coordinates.
    """
    r = r[:, None]
    prev = None
    m = 32
    while m <= _MAX_ANGULAR_POINTS:
        theta = (np.arange(m) + 0.5) * (2 * np.pi / m)
        vals = f(r * np.cos(theta), r * np.sin(theta))
        cur = np.asarray(vals).sum(axis=1) * (2 * np.pi / m)
        if prev is not None:
            delta = np.max(np.abs(cur - prev))
            scale = max(1.0, float(np.max(np.abs(cur))))
            if delta <= max(spec.abs_tol, 0.1 * spec.rel_tol * scale):
                return cur
        prev = cur
        m *= 2
    raise QuadratureConvergenceError(complex(np.sum(prev)), np.inf, _MAX_ANGULAR_POINTS)


def integrate_plane(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    bounding_radius: float,
    spec: QuadratureSpec,
) -> complex:
    """Integrate f(x, y) over the disc of radius ``bounding_radius``.

    Polar iterated quadrature: the angular direction is integrated
    numerically (no Bessel identities), the radial direction by
    :func:`integrate_radial`.  Serves as the brute-force cross-check for
    the radially reduced integrals.
    """
    def shell(r: np.ndarray) -> np.ndarray:
        return r * _angular_average(f, np.asarray(r, dtype=float), spec)

    return integrate_radial(shell, spec, lower=0.0, upper=bounding_radius)
