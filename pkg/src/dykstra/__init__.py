"""Dykstra's cyclic projections with exact rate computations and trace diagnostics."""

from .engine import DykstraState, Trace, dykstra_run, dykstra_step, map_run, series
from .errors import ConfigError, DykstraError, InvalidInputError, ResourceCapError
from .rates import (
    RateResult,
    rate_alpha,
    rate_asymptotic_step,
    rate_beta,
    rate_gamma,
    rate_Omega,
    rate_phi,
    rate_Phi,
    rate_psi,
)
from .regularity import (
    RegularityModulus,
    SemiAlgebraicParams,
    kappa_threshold,
    modulus_from_rate,
    modulus_orthant,
    modulus_semialgebraic,
    rate_Theta,
)
from .sets import (
    AffineSubspace,
    Ball,
    Box,
    Halfspace,
    Hyperplane,
    SetFamily,
    Simplex,
    distance,
    family,
    kolmogorov_residual,
    project,
)

__all__ = [
    "AffineSubspace", "Ball", "Box", "ConfigError", "DykstraError", "DykstraState",
    "Halfspace", "Hyperplane", "InvalidInputError", "RateResult", "RegularityModulus",
    "ResourceCapError", "SemiAlgebraicParams", "SetFamily", "Simplex", "Trace",
    "distance", "dykstra_run", "dykstra_step", "family", "kappa_threshold",
    "kolmogorov_residual", "map_run", "modulus_from_rate", "modulus_orthant",
    "modulus_semialgebraic", "project", "rate_Omega", "rate_Phi", "rate_Theta",
    "rate_alpha", "rate_asymptotic_step", "rate_beta", "rate_gamma", "rate_phi",
    "rate_psi", "series",
]
