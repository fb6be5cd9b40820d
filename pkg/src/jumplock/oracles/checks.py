"""Verification routines comparing the simulator with the closed-form oracles."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ..dynamics import PropagatorConfig, ReducedLambdaParams, TwoLevelParams, propagate
from ..feedback import FeedbackConfig, run_closed_loop
from ..jumps import DetectionModel, RngStream
from ..qstate import BlochVector, BrightDarkBasis
from .bloch import (
    HALF_PI,
    bloch_equilibria,
    bloch_system_rhs,
    converge_to,
    dilation_rate,
    first_variation,
)
from .density import lambda_phase_density, tv_distance
from .kapitsa import asymptotic_z, first_order_residual, kapitsa_coefficients, phase_density_two_level
from .tolerances import tolerance_table


class CheckResult(NamedTuple):
    name: str
    computed: float
    reference: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"[{verdict}] {self.name}: computed={self.computed:.6g} reference={self.reference:.6g} "
                f"tolerance={self.tolerance:.3g} {self.detail}").rstrip()


# Grid used for the equilibrium checks: includes p = 0, beta = 0 and beta = pi/2
# and avoids the merged point |p| = 1 at beta = pi/2.
EQUILIBRIUM_P = np.concatenate([np.linspace(-2.5, 2.5, 19), [0.5]])
EQUILIBRIUM_BETA = np.linspace(0.0, HALF_PI, 20)


def check_kapitsa_residual(n: int = 1000, seed: int = 0, tol: dict | None = None) -> CheckResult:
    """Orbit coefficients solve their linear system for random admissible parameters."""
    t = tolerance_table(tol)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        c = rng.uniform(0.05, 1.0)
        delta = rng.uniform(-c, c)
        omega = rng.uniform(math.sqrt(4 * c * c + 1) / 2 + 0.01, 5.0)
        k = kapitsa_coefficients(delta, omega, rng.uniform(0.1, 2), rng.uniform(0.1, 2))
        worst = max(worst, first_order_residual(k))
    return CheckResult("kapitsa_residual", worst, 0.0, t["kapitsa_residual"],
                       worst < t["kapitsa_residual"], f"({n} random parameter sets)")


def equilibrium_grid(ps=EQUILIBRIUM_P, betas=EQUILIBRIUM_BETA):
    """``(p, beta, residual, s_plus, s_minus, sphere_error)`` rows over a grid."""
    rows = []
    for p in ps:
        for beta in betas:
            e = bloch_equilibria(p, beta)
            res = max(np.linalg.norm(bloch_system_rhs(m, p, beta)) for m in (e.m_plus, e.m_minus))
            sphere = max(abs(math.sqrt(sum(v * v for v in m)) - 1) for m in (e.m_plus, e.m_minus))
            rows.append((p, beta, res, dilation_rate(e.m_plus, beta) / 2,
                         dilation_rate(e.m_minus, beta) / 2, sphere))
    return np.array(rows)


def on_boundary(p: float, beta: float) -> bool:
    """At ``beta = pi/2``, ``|p| > 1`` both equilibria lie on the hemisphere boundary."""
    return beta == HALF_PI and abs(p) > 1


def check_equilibria(tol: dict | None = None) -> list[CheckResult]:
    t = tolerance_table(tol)
    rows = equilibrium_grid()
    residual = float(rows[:, 2].max())
    sphere = float(rows[:, 5].max())
    boundary = np.array([on_boundary(p, b) for p, b in rows[:, :2]])
    interior = rows[~boundary]
    signs_ok = bool(np.all(interior[:, 3] > 0) and np.all(interior[:, 4] < 0))
    edge = float(np.abs(rows[boundary][:, 3:5]).max()) if boundary.any() else 0.0
    return [
        CheckResult("equilibrium_residual", residual, 0.0, t["equilibrium_residual"],
                    residual < t["equilibrium_residual"], f"({len(rows)} grid points)"),
        CheckResult("equilibrium_on_sphere", sphere, 0.0, t["sphere"], sphere < t["sphere"]),
        CheckResult("hemisphere_signs", float(interior[:, 4].max()), 0.0, 0.0, signs_ok,
                    f"(s+ > 0 > s- at {len(interior)} points; "
                    f"|s| = {edge:.1e} at {int(boundary.sum())} boundary points)"),
    ]


def random_sphere_points(n: int, seed: int = 0) -> np.ndarray:
    v = np.random.default_rng(seed).normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def check_quasi_global(p: float = 0.6, beta: float = 0.8, n: int = 100, seed: int = 0,
                       tol: dict | None = None) -> CheckResult:
    """Random initial states all converge to ``M-`` when ``|p sin(beta)| < 1``."""
    t = tolerance_table(tol)
    if not abs(p * math.sin(beta)) < 1:
        raise ValueError("quasi-global convergence needs |p sin(beta)| < 1")
    target = np.array(bloch_equilibria(p, beta).m_minus)
    final, elapsed = converge_to(random_sphere_points(n, seed), target, p, beta,
                                 tol=t["convergence_distance"])
    dist = float(np.max(np.linalg.norm(final - target, axis=1)))
    return CheckResult(f"quasi_global(p={p:g},beta={beta:g})", dist, 0.0, t["convergence_distance"],
                       dist < t["convergence_distance"], f"({n} states, time {elapsed:g})")


def dilation_mismatch(state, dstate, p: float, beta: float, duration: float = 1.0,
                      step: float = 1e-3) -> float:
    """Largest gap between ``d/ds log|ds|^2`` and the dilation rate along a flow.

    The state and a tangent vector are advanced together by RK4; the log
    derivative is taken from the variational right-hand side.
    """
    x = np.array(state, dtype=float)
    v = np.array(dstate, dtype=float)
    v -= x * (x @ v)
    worst = 0.0
    for _ in range(int(round(duration / step))):
        rate = 2 * (v @ first_variation(x, v, p, beta)) / (v @ v)
        worst = max(worst, abs(rate - dilation_rate(x, beta)))
        y = np.concatenate([x, v])

        def f(w):
            return np.concatenate([bloch_system_rhs(w[:3], p, beta),
                                   first_variation(w[:3], w[3:], p, beta)])

        k1 = f(y)
        k2 = f(y + 0.5 * step * k1)
        k3 = f(y + 0.5 * step * k2)
        k4 = f(y + step * k3)
        y = y + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        x, v = y[:3], y[3:] / np.linalg.norm(y[3:])
    return worst


def orbit_error(epsilon: float, delta: float = 0.25, omega: float = 1.0, kappa1: float = 1.0,
                kappa2: float = 1.0, transient: float = 40.0, periods: int = 2,
                samples_per_period: int = 200) -> float:
    """Max ``|Z(t) - Z~(t)|`` over ``periods`` after a transient, from the ground state."""
    model = TwoLevelParams(delta, epsilon * kappa1, epsilon * kappa2, omega)
    cfg = PropagatorConfig.for_model(model)
    period = 2 * math.pi / omega
    t0 = math.ceil(transient / period) * period
    state = propagate(model, BlochVector(0.0, 0.0, -1.0), 0.0, t0, cfg)
    ts = t0 + np.arange(periods * samples_per_period + 1) * period / samples_per_period
    zs = [state.z]
    for a, b in zip(ts[:-1], ts[1:]):
        state = propagate(model, state, a, b, cfg)
        zs.append(state.z)
    k = kapitsa_coefficients(delta, omega, kappa1, kappa2)
    return float(np.max(np.abs(np.array(zs) - asymptotic_z(ts, k, epsilon))))


def check_orbit(epsilon: float = 0.06, delta: float = 0.25, omega: float = 1.0,
                tol: dict | None = None) -> list[CheckResult]:
    t = tolerance_table(tol)
    full = orbit_error(epsilon, delta, omega)
    half = orbit_error(epsilon / 2, delta, omega)
    ratio = full / half
    return [
        CheckResult("orbit_max_error", full, 0.0, t["orbit_max_error"], full <= t["orbit_max_error"],
                    f"(eps={epsilon:g}, Delta={delta:g}, omega={omega:g})"),
        CheckResult("orbit_error_ratio", ratio, 16.0, t["orbit_ratio_high"],
                    t["orbit_ratio_low"] <= ratio <= t["orbit_ratio_high"], "(eps halved)"),
    ]


def frozen_phases(model, n_clicks: int, dead_time: float, seed: int, eta: float = 1.0) -> np.ndarray:
    """Phases of ``n_clicks`` matured detected clicks with the feedback switched off."""
    if isinstance(model, TwoLevelParams):
        cfg = FeedbackConfig(max(0.5, abs(model.delta)), 0.0, model.omega, dead_time)
    else:
        cfg = FeedbackConfig(0.49, 0.0, model.omega / model.unit_scale, dead_time,
                             variant="lambda", alpha=model.alpha)
    record = run_closed_loop(model, cfg, DetectionModel.for_model(model, eta), RngStream(seed),
                             delta0=model.delta / model.unit_scale, max_clicks=n_clicks)
    return record.phase[record.matured]


def check_phase_density_two_level(n_clicks: int = 100_000, delta: float = 0.2, epsilon: float = 0.06,
                                  omega: float = 1.0, dead_time: float = 20.0, seed: int = 11,
                                  tol: dict | None = None) -> CheckResult:
    t = tolerance_table(tol)
    model = TwoLevelParams(delta, epsilon, epsilon, omega)
    density = phase_density_two_level(kapitsa_coefficients(delta, omega, 1.0, 1.0), epsilon)
    tv = tv_distance(frozen_phases(model, n_clicks, dead_time, seed), density)
    return CheckResult("phase_density_two_level", tv, 0.0, t["tv_distance"], tv < t["tv_distance"],
                       f"({n_clicks} clicks, Delta={delta:g})")


def check_phase_density_lambda(n_clicks: int = 100_000, delta: float = 0.2, epsilon: float = 0.03,
                               omega: float = 20.0, alpha: float = math.pi / 4,
                               dead_time: float = 10.0, seed: int = 12,
                               tol: dict | None = None) -> CheckResult:
    t = tolerance_table(tol)
    model = ReducedLambdaParams(delta, epsilon, omega, BrightDarkBasis.from_angle(alpha))
    tv = tv_distance(frozen_phases(model, n_clicks, dead_time, seed), lambda_phase_density(model))
    return CheckResult("phase_density_lambda", tv, 0.0, t["tv_distance"], tv < t["tv_distance"],
                       f"({n_clicks} clicks, Delta={delta:g})")
