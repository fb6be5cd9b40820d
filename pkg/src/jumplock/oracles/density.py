"""Jump-phase densities on ``[0, 2 pi)``.

Both oracle densities are trigonometric polynomials of degree two,

    P(phi) = (a0 + a1 cos phi + b1 sin phi + a2 cos 2phi + b2 sin 2phi) / Z,

so bin probabilities and moments are available in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..dynamics import ReducedLambdaParams, _linear_part, hermitian_basis, from_coords, to_coords
from ..errors import ConvergenceError, RegimeError
from ..qstate import SIGMA_Z, from_lambda_bloch, projector
from .bloch import bloch_equilibria

TWO_PI = 2.0 * np.pi
QUADRATURE_POINTS = 1024


@dataclass(frozen=True)
class PhaseDensity:
    variant: str
    a0: float
    a1: float
    b1: float
    a2: float
    b2: float
    normalizer: float
    grid: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_harmonics(cls, variant: str, a0: float, a1: float = 0.0, b1: float = 0.0,
                       a2: float = 0.0, b2: float = 0.0) -> "PhaseDensity":
        """Normalize the unnormalized harmonics by trapezoidal quadrature."""
        grid = np.linspace(0.0, TWO_PI, QUADRATURE_POINTS + 1)
        raw = _trig(grid, a0, a1, b1, a2, b2)
        z = float(np.trapezoid(raw, grid))
        if not z > 0:
            raise ValueError("phase density normalizer must be positive")
        return cls(variant, float(a0), float(a1), float(b1), float(a2), float(b2), z, grid)

    def __call__(self, phi) -> np.ndarray:
        return _trig(np.asarray(phi, dtype=float), self.a0, self.a1, self.b1, self.a2,
                     self.b2) / self.normalizer

    def values(self) -> np.ndarray:
        """Density on the quadrature grid."""
        return self(self.grid)

    def minimum(self) -> float:
        return float(self(np.linspace(0.0, TWO_PI, 4097)).min())

    def cumulative(self, phi) -> np.ndarray:
        """``int_0^phi P``."""
        phi = np.asarray(phi, dtype=float)
        prim = (self.a0 * phi + self.a1 * np.sin(phi) + self.b1 * (1 - np.cos(phi))
                + 0.5 * self.a2 * np.sin(2 * phi) + 0.5 * self.b2 * (1 - np.cos(2 * phi)))
        return prim / self.normalizer

    def bin_probabilities(self, nbins: int = 64) -> np.ndarray:
        edges = np.linspace(0.0, TWO_PI, nbins + 1)
        return np.diff(self.cumulative(edges))

    def mean_cos(self) -> float:
        """``int cos(phi) P(phi) dphi``."""
        return np.pi * self.a1 / self.normalizer

    def mean_sin(self) -> float:
        return np.pi * self.b1 / self.normalizer


def _trig(phi, a0, a1, b1, a2, b2):
    return (a0 + a1 * np.cos(phi) + b1 * np.sin(phi) + a2 * np.cos(2 * phi)
            + b2 * np.sin(2 * phi))


def empirical_bins(phases, nbins: int = 64) -> np.ndarray:
    """Fraction of ``phases`` in each of ``nbins`` equal bins of ``[0, 2 pi)``."""
    phases = np.mod(np.asarray(phases, dtype=float), TWO_PI)
    counts, _ = np.histogram(phases, bins=nbins, range=(0.0, TWO_PI))
    return counts / max(len(phases), 1)


def tv_distance(phases, density: PhaseDensity, nbins: int = 64) -> float:
    """Total-variation distance between a phase histogram and ``density``."""
    return 0.5 * float(np.abs(empirical_bins(phases, nbins) - density.bin_probabilities(nbins)).sum())


def averaged_equilibrium(delta: float, basis, epsilon: float, tol: float = 1e-13,
                         max_doublings: int = 60) -> np.ndarray:
    """Stationary state of the period-averaged reduced no-jump dynamics.

    The averaged rate operator is ``|b><b| + eps^2 |d><d| / 2``.  The
    linear (unnormalized) flow is advanced by repeatedly squaring a short RK4
    step map, renormalizing after each squaring, until the state stops moving.
    """
    basis_m = hermitian_basis(2)
    rate = projector(basis.bright) + 0.5 * epsilon**2 * projector(basis.dark)
    gen = _linear_part(0.5 * delta * SIGMA_Z, rate, basis_m)
    h = 0.05
    a = h * gen
    step = np.eye(4) + a @ (np.eye(4) + a @ (np.eye(4) / 2 + a @ (np.eye(4) / 6 + a / 24)))
    x = to_coords(np.eye(2) / 2, basis_m)
    for _ in range(max_doublings):
        y = step @ x
        y /= y[0] * math.sqrt(2)
        step = step @ step
        step /= np.max(np.abs(step))
        if np.max(np.abs(y - x)) < tol:
            return from_coords(y, basis_m)
        x = y
    raise ConvergenceError("averaged no-jump dynamics did not relax to an equilibrium")


def lambda_phase_density(params: ReducedLambdaParams, epsilon: float | None = None,
                         richardson_step: float = 0.1) -> PhaseDensity:
    """Jump-phase density of the reduced Lambda system at fixed detuning.

    ``P ~ tr(b rho_-) + eps^2 cos^2(phi) tr(d rho_-) + eps^2 tr(b rho_1)
    - eps cos(phi) Y_-`` where ``rho_-`` is the contracting equilibrium of
    the unmodulated dynamics and ``rho_1`` its second-order correction,
    extrapolated from two relaxed averaged equilibria.
    """
    eps = params.epsilon if epsilon is None else float(epsilon)
    delta, alpha = params.delta, params.alpha
    if not abs(delta) < 0.5:
        raise RegimeError(f"|Delta| < 1/2 is required, got {delta}")
    if not 0 < alpha < 0.5 * math.pi:
        raise RegimeError("alpha must lie in (0, pi/2)")
    m_minus = bloch_equilibria(2 * delta, 2 * alpha).m_minus
    rho_minus = from_lambda_bloch(m_minus)
    b, d = projector(params.basis.bright), projector(params.basis.dark)

    def bright_shift(h):
        return (np.trace(b @ averaged_equilibrium(delta, params.basis, h)).real
                - np.trace(b @ rho_minus).real) / (h * h)

    h = richardson_step
    b1 = (4 * bright_shift(h / 2) - bright_shift(h)) / 3
    tb, td = np.trace(b @ rho_minus).real, np.trace(d @ rho_minus).real
    a0 = tb + 0.5 * eps**2 * td + eps**2 * b1
    density = PhaseDensity.from_harmonics("lambda", a0, -eps * m_minus.y, 0.0, 0.5 * eps**2 * td, 0.0)
    if not density.normalizer > 0 or density.minimum() < 0:
        raise RegimeError("Lambda phase density is not a probability density here")
    return density
