"""Steady state of N on-off sources feeding a fluid buffer: exact spectral
solution, region-by-region asymptotics, conditional limit laws and a Monte
Carlo oracle."""

__version__ = "0.1.0"

from .errors import AmsError
from .model import DerivedParams, ModelParams, derive_params, reference_params, validate
from .spectral import SpectralSolution, cdf_exact, density_exact, eigenvalues
from .saddle import classify, curves, solve_theta, solve_theta0, solve_theta1, solve_theta_plus
from .approx import density_approx
from .conditional import buffer_given_sources, mass_M1, mass_M2, sources_given_buffer
from .estimators import AsymptoticApproximator, ExactSolver, FluidQueueSimulator

__all__ = [
    "AmsError", "ModelParams", "DerivedParams", "derive_params", "reference_params", "validate",
    "SpectralSolution", "cdf_exact", "density_exact", "eigenvalues",
    "classify", "curves", "solve_theta", "solve_theta_plus", "solve_theta0", "solve_theta1",
    "density_approx", "mass_M1", "mass_M2", "sources_given_buffer", "buffer_given_sources",
    "ExactSolver", "AsymptoticApproximator", "FluidQueueSimulator",
]
