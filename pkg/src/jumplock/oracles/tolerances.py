"""Single table of default oracle and acceptance tolerances."""
from __future__ import annotations

from types import MappingProxyType

TOLERANCES = MappingProxyType({
    "kapitsa_residual": 1e-10,
    "equilibrium_residual": 1e-10,
    "sphere": 1e-12,
    "convergence_distance": 1e-6,
    "dilation_rate": 1e-6,
    "orbit_max_error": 1e-3,
    "orbit_ratio_low": 8.0,
    "orbit_ratio_high": 32.0,
    "density_normalization": 1e-6,
    "tv_distance": 0.05,
    "drift_standard_errors": 3.0,
    "contraction_fudge": 10.0,
    "final_window_fudge": 10.0,
    "fig2_mean": 3e-2,
    "fig2_std": 5e-2,
    "fig4_band": 0.05,
    "fig4_majority": 8,
})


def tolerance_table(overrides: dict | None = None) -> dict:
    """Defaults merged with ``overrides``; unknown keys are rejected."""
    table = dict(TOLERANCES)
    for key, value in (overrides or {}).items():
        if key not in table:
            raise KeyError(f"unknown tolerance {key!r}")
        table[key] = type(table[key])(value)
    return table
