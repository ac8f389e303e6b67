"""Exact scattering by N delta-function point defects in the flat plane.

Natural units hbar = m = 1 throughout; couplings are stored as the
dimensionless renormalized strength g = m*xi/hbar^2.  The bare coupling of
a 2D contact interaction is scale-dependent; removing the logarithmic
divergence of the free Green's function at coincidence yields the finite
coupling

    xi_ren = 1 / (1/xi - (1/pi) * [ln(k*rho/2) + gamma]),

after which the defect response amplitudes X_j solve A X = exp(i a.k)/2pi
with the symmetric interaction matrix

    A_jj = (1/4) (2/g_j + i),
    A_ij = (i/4) H0^(1)(k |a_i - a_j|)   for i != j.

The scattering amplitude (coefficient of e^{ikr}/sqrt(r) in the asymptotic
wavefunction, normalized as in 2D potential scattering) is

    f0(k', k) = -(1/2) sqrt(i / (2 pi k)) sum_ij Ainv_ij e^{i(a_j.k - a_i.k')}

with the principal branch sqrt(i) = e^{i pi/4}.  Closed forms for N = 1, 2
are provided both as fast paths and as independent cross-checks of the
linear-solve route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import EULER_GAMMA, hankel1

__all__ = [
    "DefectConfiguration",
    "Kinematics",
    "InteractionMatrix",
    "ResonanceError",
    "renormalize_coupling",
    "build_interaction_matrix",
    "invert_interaction_matrix",
    "solve_defect_coefficients",
    "amplitude_flat",
    "amplitude_single_closed",
    "amplitude_double_closed",
    "wavefunction_psi0",
]

# Condition number beyond which the linear system is treated as a
# bound-state/resonance condition rather than solved.
_COND_LIMIT = 1e14


class ResonanceError(ArithmeticError):
    """Interaction matrix singular to working precision.

    Physically a bound state or resonance of the defect system; the
    scattering amplitude is not defined by the linear solve there.
    """


@dataclass(frozen=True)
class DefectConfiguration:
    """Positions a_j and renormalized couplings g_j of the point defects."""

    positions: np.ndarray
    couplings: np.ndarray

    def __post_init__(self) -> None:
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        cpl = np.atleast_1d(np.asarray(self.couplings, dtype=complex))
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError("positions must be an (N, 2) array")
        if len(pos) == 0:
            raise ValueError("at least one defect is required")
        if len(cpl) != len(pos):
            raise ValueError("positions and couplings must have equal length")
        if np.any(cpl == 0):
            raise ValueError("couplings must be nonzero")
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        np.fill_diagonal(dist, np.inf)
        if np.any(dist == 0.0):
            raise ValueError("defect positions must be pairwise distinct")
        pos.setflags(write=False)
        cpl.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "couplings", cpl)

    def __len__(self) -> int:
        return len(self.positions)

    def translated(self, shift) -> "DefectConfiguration":
        shift = np.asarray(shift, dtype=float)
        return DefectConfiguration(self.positions + shift, self.couplings)


@dataclass(frozen=True)
class Kinematics:
    """Incident wavenumber and the incident/outgoing directions.

    theta0 and theta are measured in the fixed lab frame.  The derived
    scattering angle is Theta = theta - theta0 and s = sin(Theta/2); the
    momentum transfer magnitude is |k' - k| = 2 k |s|.
    """

    k: float
    theta0: float = 0.0
    theta: float = 0.0

    def __post_init__(self) -> None:
        if not self.k > 0:
            raise ValueError("wavenumber k must be positive")

    @property
    def Theta(self) -> float:
        return self.theta - self.theta0

    @property
    def s(self) -> float:
        return math.sin(0.5 * self.Theta)

    @property
    def kvec(self) -> np.ndarray:
        return self.k * np.array([math.cos(self.theta0), math.sin(self.theta0)])

    @property
    def kvec_out(self) -> np.ndarray:
        return self.k * np.array([math.cos(self.theta), math.sin(self.theta)])


@dataclass(frozen=True)
class InteractionMatrix:
    """Symmetric N x N defect coupling matrix built at a fixed wavenumber."""

    entries: np.ndarray
    k: float

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=complex)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def condition_number(self) -> float:
        return float(np.linalg.cond(self.entries))


def renormalize_coupling(bare_xi: complex, rho: float, k: float) -> complex:
    """Renormalized coupling from a bare strength and regulator radius rho.

    Choosing rho = 2 exp(-gamma)/k makes the log term vanish, so the
    renormalized and bare couplings coincide at that scale.
    """
    if bare_xi == 0:
        raise ValueError("bare coupling must be nonzero")
    if not (rho > 0 and k > 0):
        raise ValueError("rho and k must be positive")
    denom = 1.0 / bare_xi - (math.log(0.5 * k * rho) + EULER_GAMMA) / math.pi
    if abs(denom) < 1e-14:
        raise ResonanceError(
            f"renormalization singular at rho={rho}, k={k}: 1/xi cancels the log term"
        )
    return 1.0 / denom


def build_interaction_matrix(cfg: DefectConfiguration, k: float) -> InteractionMatrix:
    """Assemble A with Hankel off-diagonal couplings between the defects."""
    if not k > 0:
        raise ValueError("wavenumber k must be positive")
    pos = cfg.positions
    n = len(cfg)
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    off = ~np.eye(n, dtype=bool)
    if np.any(dist[off] == 0.0):
        raise ValueError("coincident defects: off-diagonal distance vanished")
    a = np.zeros((n, n), dtype=complex)
    if n > 1:
        a[off] = 0.25j * hankel1(0, k * dist[off])
    a[np.diag_indices(n)] = 0.25 * (2.0 / cfg.couplings + 1j)
    return InteractionMatrix(entries=a, k=k)


def _check_resonance(matrix: InteractionMatrix) -> None:
    cond = matrix.condition_number()
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise ResonanceError(
            f"interaction matrix is singular to working precision "
            f"(condition number {cond:.3e}); bound-state/resonance condition"
        )


def invert_interaction_matrix(matrix: InteractionMatrix) -> np.ndarray:
    """A^-1 as a dense matrix: closed form for N <= 2, LAPACK solve above."""
    _check_resonance(matrix)
    a = matrix.entries
    n = a.shape[0]
    if n == 1:
        return np.array([[1.0 / a[0, 0]]])
    if n == 2:
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        return np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det
    return np.linalg.solve(a, np.eye(n, dtype=complex))


def solve_defect_coefficients(
    matrix: InteractionMatrix, cfg: DefectConfiguration, kvec
) -> np.ndarray:
    """Response amplitudes X_j of the defects to an incident plane wave."""
    _check_resonance(matrix)
    kvec = np.asarray(kvec, dtype=float)
    rhs = np.exp(1j * cfg.positions @ kvec) / (2.0 * math.pi)
    if len(cfg) <= 2:
        return invert_interaction_matrix(matrix) @ rhs
    return np.linalg.solve(matrix.entries, rhs)


def _amplitude_prefactor(k: float) -> complex:
    return -0.5 * np.sqrt(1j / (2.0 * math.pi * k))


def amplitude_flat(cfg: DefectConfiguration, kin: Kinematics) -> complex:
    """Flat-plane amplitude f0(k', k) for any number of defects."""
    matrix = build_interaction_matrix(cfg, kin.k)
    _check_resonance(matrix)
    w_in = np.exp(1j * cfg.positions @ kin.kvec)
    w_out = np.exp(-1j * cfg.positions @ kin.kvec_out)
    y = np.linalg.solve(matrix.entries, w_in)
    return complex(_amplitude_prefactor(kin.k) * (w_out @ y))


def amplitude_single_closed(cfg: DefectConfiguration, kin: Kinematics) -> complex:
    """One-defect amplitude in closed form (cross-check for the solve)."""
    if len(cfg) != 1:
        raise ValueError("closed form requires exactly one defect")
    g = cfg.couplings[0]
    phase = np.exp(1j * cfg.positions[0] @ (kin.kvec - kin.kvec_out))
    return complex(
        -np.sqrt(2j / (math.pi * kin.k)) * g * phase / (2.0 + 1j * g)
    )


def amplitude_double_closed(
    cfg: DefectConfiguration,
    kin: Kinematics,
    transfer_matrix_convention: bool = False,
) -> complex:
    """Two-defect amplitude in closed form.

    With ``transfer_matrix_convention`` the inter-defect propagator
    H0^(1)(k d) is replaced by its real part J0(k d), the convention in
    which the finite-size interpretation of the point scatterers is
    dropped.  The two conventions coincide exactly when k d sits at a zero
    of Y0.
    """
    if len(cfg) != 2:
        raise ValueError("closed form requires exactly two defects")
    g1, g2 = cfg.couplings
    a1, a2 = cfg.positions
    k = kin.k
    h = hankel1(0, k * float(np.hypot(*(a2 - a1))))
    if transfer_matrix_convention:
        h = h.real
    d = (h * h - 1.0) * g1 * g2 + 2j * (g1 + g2) + 4.0
    if abs(d) < 1e-14:
        raise ResonanceError("two-defect denominator vanished (resonance)")
    q = kin.kvec - kin.kvec_out
    num = (
        g1 * (2.0 + 1j * g2) * np.exp(1j * a1 @ q)
        + g2 * (2.0 + 1j * g1) * np.exp(1j * a2 @ q)
        - 1j * g1 * g2 * h * (
            np.exp(1j * (a2 @ kin.kvec - a1 @ kin.kvec_out))
            + np.exp(1j * (a1 @ kin.kvec - a2 @ kin.kvec_out))
        )
    )
    return complex(-np.sqrt(2j / (math.pi * k)) * num / d)


def wavefunction_psi0(cfg: DefectConfiguration, kvec, x) -> complex:
    """Zeroth-order scattering wavefunction (plane wave plus defect waves).

    Normalized like <x|k> = e^{ik.x}/2pi; evaluation exactly at a defect
    position is rejected because the Green's function diverges there.
    """
    kvec = np.asarray(kvec, dtype=float)
    x = np.asarray(x, dtype=float)
    k = float(np.hypot(*kvec))
    sep = np.hypot(*(x - cfg.positions).T)
    if np.any(sep == 0.0):
        raise ValueError("wavefunction is singular at defect positions")
    matrix = build_interaction_matrix(cfg, k)
    _check_resonance(matrix)
    w_in = np.exp(1j * cfg.positions @ kvec)
    y = np.linalg.solve(matrix.entries, w_in)
    scattered = -0.25j * (y @ hankel1(0, k * sep))
    return complex((np.exp(1j * x @ kvec) + scattered) / (2.0 * math.pi))
