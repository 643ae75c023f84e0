"""Photoionization with excitation of heliumlike ions at intermediate photon energies.

The pipeline runs ``solve_wavefunction`` (correlated ground state), then
``compute_elements`` (radial matrix elements against ion orbitals), then
``b_coefficients`` (high-energy limits and 1/omega corrections), and
finally ``ratio_curves`` (energy-dependent ratios).
"""

__version__ = "0.1.0"

from .coulomb import CoulombOrbital, excitation_energy, radial_value
from .elements import MatrixElementSet, angular_c, compute_elements
from .quadrature import QuadratureError, integrate
from .ratios import (
    DYNAMIC_WEIGHTS,
    HARTREE_EV,
    KAPPA_CONVENTIONS,
    ClosedChannelError,
    DomainError,
    RatioCoefficients,
    b_coefficients,
    fit_z_series,
    kinematics,
    ratio_curves,
    scaled_ratios,
)
from .wavefunction import (
    CorrelatedWavefunction,
    DegenerateBasisError,
    HylleraasTerm,
    coalescence_profile,
    load,
    save,
    solve_wavefunction,
)

__all__ = [
    "__version__",
    "CoulombOrbital",
    "excitation_energy",
    "radial_value",
    "MatrixElementSet",
    "angular_c",
    "compute_elements",
    "QuadratureError",
    "integrate",
    "DYNAMIC_WEIGHTS",
    "HARTREE_EV",
    "KAPPA_CONVENTIONS",
    "ClosedChannelError",
    "DomainError",
    "RatioCoefficients",
    "b_coefficients",
    "fit_z_series",
    "kinematics",
    "ratio_curves",
    "scaled_ratios",
    "CorrelatedWavefunction",
    "DegenerateBasisError",
    "HylleraasTerm",
    "coalescence_profile",
    "load",
    "save",
    "solve_wavefunction",
]
