"""Cylinder special functions of orders 0 and 1 for positive real arguments.

Everything downstream (radial quadrature, interaction matrices, far-field
factors) needs J_n, Y_n, H_n^(1) = J_n + i Y_n and the modified functions
I_n, K_n for n in {0, 1} only.  Evaluation is delegated to the cephes
kernels in ``scipy.special``, which meet the double-precision accuracy the
quadrature requires; this module adds the domain guards and the guarantee
that Hankel values are the bit-identical composition of the J and Y values
returned here.

All functions accept scalars or numpy arrays and are pure.
"""

from __future__ import annotations

import numpy as np
from scipy import special as _sp

__all__ = [
    "EULER_GAMMA",
    "bessel_j",
    "bessel_y",
    "hankel1",
    "mod_bessel",
]

# Euler-Mascheroni constant, 16 significant digits.
EULER_GAMMA = 0.5772156649015329

# I_n(x) overflows double precision slightly above exp(700).
_MOD_I_MAX_ARG = 700.0

_J = {0: _sp.j0, 1: _sp.j1}
_Y = {0: _sp.y0, 1: _sp.y1}
_I = {0: _sp.i0, 1: _sp.i1}
_K = {0: _sp.k0, 1: _sp.k1}


def _check_order(order: int) -> int:
    if order not in (0, 1):
        raise ValueError(f"only orders 0 and 1 are supported, got {order!r}")
    return order


def bessel_j(order: int, x):
    """Bessel function of the first kind, J_0 or J_1, for x >= 0."""
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("bessel_j requires finite x")
    if np.any(x < 0):
        raise ValueError("bessel_j requires x >= 0")
    out = _J[order](x)
    return float(out) if out.ndim == 0 else out


def bessel_y(order: int, x):
    """Bessel function of the second kind, Y_0 or Y_1, for x > 0.

    Y_n has a logarithmic (n = 0) or power (n = 1) singularity at the
    origin, so x = 0 is rejected rather than returning -inf.
    """
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("bessel_y requires finite x")
    if np.any(x <= 0):
        raise ValueError("bessel_y requires x > 0 (singular at the origin)")
    out = _Y[order](x)
    return float(out) if out.ndim == 0 else out


def hankel1(order: int, x):
    """Hankel function of the first kind, H_n^(1)(x) = J_n(x) + i Y_n(x).

    Composed literally from :func:`bessel_j` and :func:`bessel_y` so the
    real and imaginary parts are bit-identical to those functions.
    """
    return bessel_j(order, x) + 1j * bessel_y(order, x)


def mod_bessel(kind: str, order: int, x):
    """Modified Bessel function I_n(x) or K_n(x) for x > 0.

    ``kind`` is "I" or "K".  For kind "I" the argument is capped at 700 to
    keep exp-growing values inside double range.
    """
    _check_order(order)
    if kind not in ("I", "K"):
        raise ValueError(f'kind must be "I" or "K", got {kind!r}')
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("mod_bessel requires finite x")
    if np.any(x <= 0):
        raise ValueError("mod_bessel requires x > 0")
    if kind == "I" and np.any(x > _MOD_I_MAX_ARG):
        raise OverflowError(f"mod_bessel kind I overflows for x > {_MOD_I_MAX_ARG}")
    out = (_I if kind == "I" else _K)[order](x)
    return float(out) if out.ndim == 0 else out
