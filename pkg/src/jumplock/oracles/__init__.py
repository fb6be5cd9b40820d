"""Closed-form results used to verify the simulator."""
from .bloch import (
    BlochEquilibria,
    bloch_equilibria,
    bloch_system_rhs,
    dilation_rate,
    first_variation,
    lambda_contraction,
    lambda_theta,
)
from .density import PhaseDensity, averaged_equilibrium, lambda_phase_density, tv_distance
from .kapitsa import (
    KapitsaCoefficients,
    asymptotic_z,
    c5_closed_form,
    contraction_envelope,
    expected_drift,
    kapitsa_coefficients,
    phase_density_two_level,
    rho_bound,
    two_level_contraction,
)
from .tolerances import TOLERANCES, tolerance_table

__all__ = [
    "BlochEquilibria", "bloch_equilibria", "bloch_system_rhs", "dilation_rate", "first_variation",
    "lambda_contraction", "lambda_theta", "PhaseDensity", "averaged_equilibrium",
    "lambda_phase_density", "tv_distance", "KapitsaCoefficients", "asymptotic_z", "c5_closed_form",
    "contraction_envelope", "expected_drift", "kapitsa_coefficients", "phase_density_two_level",
    "rho_bound", "two_level_contraction", "TOLERANCES", "tolerance_table",
]
