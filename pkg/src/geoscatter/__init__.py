"""Scattering of a scalar particle on a curved surface with point defects.

Combines the exact flat-plane solution for N delta-function defects with
the first-Born correction from the surface geometry, for cylindrically
symmetric bumps and superpositions of them.
"""

from .geom_amp import (
    GeometricAmplitude,
    ScatteringSetup,
    TotalAmplitude,
    assemble_geometric_amplitude,
    central_defect_integrals,
    far_defect_integrals,
    g_integrals,
    i0_integral,
    j_integral,
    multibump_geometric_amplitude,
    total_amplitude,
)
from .plane_defects import (
    DefectConfiguration,
    InteractionMatrix,
    Kinematics,
    ResonanceError,
    amplitude_double_closed,
    amplitude_flat,
    amplitude_single_closed,
    build_interaction_matrix,
    renormalize_coupling,
    solve_defect_coefficients,
    wavefunction_psi0,
)
from .quad import QuadratureConvergenceError, QuadratureSpec, integrate_plane, integrate_radial
from .surface import (
    GaussianBumpParams,
    MultiBumpSurface,
    RadialProfile,
    curvature_potential,
    curvatures,
    flat_profile,
    gaussian_bump_profile,
    slope_function,
)

__version__ = "0.1.0"
