"""Independent numerical checks: grid eigensolver, quadrature and identity residuals."""

from .expectation import (
    check_integrable,
    extrapolate,
    hypervirial_residual_quantum,
    hypervirial_terms,
    kinetic_anticommutator,
    moment_expectation,
    richardson,
    untransformed_energy,
    virial_residual_quantum,
)
from .grid import (
    COULOMB_DOMAINS,
    DiscreteHamiltonian,
    GridSpec,
    build_coulomb_radial,
    build_oscillator_1d,
    build_oscillator_flat,
    build_oscillator_radial,
    coulomb_sphere_energy,
    radial_oscillator_energy,
)
from .spectral import SpectralOscillator
from .tridiag import (
    EigenState,
    bisect_eigenvalues,
    eigen_indices,
    eigen_lowest,
    eigen_nearest,
    residual_tolerance,
    sturm_count,
)

__all__ = [
    "GridSpec",
    "DiscreteHamiltonian",
    "EigenState",
    "COULOMB_DOMAINS",
    "build_oscillator_1d",
    "build_oscillator_flat",
    "build_coulomb_radial",
    "build_oscillator_radial",
    "radial_oscillator_energy",
    "coulomb_sphere_energy",
    "sturm_count",
    "bisect_eigenvalues",
    "eigen_lowest",
    "eigen_indices",
    "eigen_nearest",
    "moment_expectation",
    "check_integrable",
    "kinetic_anticommutator",
    "virial_residual_quantum",
    "hypervirial_terms",
    "hypervirial_residual_quantum",
    "richardson",
    "extrapolate",
    "untransformed_energy",
    "residual_tolerance",
    "SpectralOscillator",
]
