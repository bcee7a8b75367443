"""Gaussian dynamics of a quadratically coupled, amplitude-modulated optomechanical system."""

__version__ = "0.1.0"

from .params import CouplingSet, FloquetAmplitudes, SystemParams, compute_couplings, validate_params  # noqa: E402
from .covariance import (  # noqa: E402
    drift_full,
    drift_rwa,
    evolve_covariance,
    noise_matrix,
    routh_hurwitz,
    steady_state_covariance,
)

__all__ = [
    "CouplingSet",
    "FloquetAmplitudes",
    "SystemParams",
    "compute_couplings",
    "validate_params",
    "drift_full",
    "drift_rwa",
    "evolve_covariance",
    "noise_matrix",
    "routh_hurwitz",
    "steady_state_covariance",
]
