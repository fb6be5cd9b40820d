"""Oracle verification suite with JSON and text reports."""
from __future__ import annotations

import json

from . import checks
from .tolerances import tolerance_table


def run_suite(simulate: bool = True, n_clicks: int = 100_000, seed: int = 0,
              tol: dict | None = None) -> list[checks.CheckResult]:
    """Run every oracle check; ``simulate=False`` skips the Monte-Carlo ones."""
    tolerance_table(tol)  # reject unknown keys early
    results = [checks.check_kapitsa_residual(seed=seed, tol=tol)]
    results += checks.check_equilibria(tol=tol)
    results.append(checks.check_quasi_global(seed=seed, tol=tol))
    mismatch = checks.dilation_mismatch((0.6, 0.0, 0.8), (0.0, 1.0, 0.0), 0.6, 0.8)
    limit = tolerance_table(tol)["dilation_rate"]
    results.append(checks.CheckResult("dilation_rate", mismatch, 0.0, limit, mismatch < limit))
    results += checks.check_orbit(tol=tol)
    if simulate:
        results.append(checks.check_phase_density_two_level(n_clicks, seed=seed + 11, tol=tol))
        results.append(checks.check_phase_density_lambda(n_clicks, seed=seed + 12, tol=tol))
    return results


def to_json(results) -> str:
    rows = [{"oracle": r.name, "computed": r.computed, "reference": r.reference,
             "tolerance": r.tolerance, "passed": bool(r.passed), "detail": r.detail}
            for r in results]
    return json.dumps({"passed": all(r.passed for r in results), "checks": rows}, indent=2)


def to_text(results) -> str:
    lines = [r.line() for r in results]
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return "\n".join(lines)
