"""Closed-form periodic orbit of the weakly driven two-level atom.

With ``u_bar = eps kappa1`` and ``v_bar = eps kappa2`` the no-jump Bloch
dynamics settle on a periodic orbit

    X = eps X1(t) + O(eps^3),   Y = eps Y1(t) + O(eps^3),
    Z = -1 + eps^2 (X1^2 + Y1^2) / 2 + O(eps^4),

with ``X1 = a1 cos + b1 sin + g1`` and ``Y1 = a2 cos + b2 sin + g2``.
Expanding ``Z`` in harmonics of ``omega t`` gives the constants ``C1..C5``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import RegimeError, SingularityError
from .density import PhaseDensity


@dataclass(frozen=True)
class KapitsaCoefficients:
    delta: float
    omega: float
    kappa1: float
    kappa2: float
    a1: float
    a2: float
    b1: float
    b2: float
    g1: float
    g2: float
    xi: float
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float

    @property
    def harmonics(self) -> np.ndarray:
        """``(C1, C2, C3, C4, C5)``."""
        return np.array([self.c1, self.c2, self.c3, self.c4, self.c5])


def xi(delta: float, omega: float) -> float:
    d2, w2 = delta * delta, omega * omega
    return 16 * d2 * d2 + 8 * d2 + 1 + 8 * w2 + 16 * w2 * w2 - 32 * d2 * w2


def kapitsa_coefficients(delta: float, omega: float, kappa1: float, kappa2: float,
                         verbatim: bool = False) -> KapitsaCoefficients:
    """First-order orbit coefficients and the harmonic constants ``C1..C5``.

    ``C3``, ``C4`` and ``C5`` are the Fourier coefficients of
    ``(X1^2 + Y1^2) / 2``.  The frequently quoted forms
    ``C3 = a1 b1 + a2 b2``, ``C4 = 2(a1 g1 + a2 g2)``, ``C5 = 2(b1 g1 + b2 g2)``
    are twice too large; pass ``verbatim=True`` to get them anyway.
    """
    x = xi(delta, omega)
    if x == 0:
        raise SingularityError(f"Xi vanishes at delta={delta}, omega={omega}")
    d, w = delta, omega
    a1 = -4 * kappa2 * (4 * w * w + 4 * d * d + 1) / x
    a2 = 8 * kappa2 * d * (4 * w * w - 4 * d * d - 1) / x
    b1 = -8 * kappa2 * w * (4 * w * w - 4 * d * d + 1) / x
    b2 = -32 * kappa2 * w * d / x
    g1 = -8 * kappa1 * d / (1 + 4 * d * d)
    g2 = 4 * kappa1 / (1 + 4 * d * d)
    c1 = (a1**2 + a2**2) / 4 + (b1**2 + b2**2) / 4 + (g1**2 + g2**2) / 2
    c2 = (a1**2 + a2**2) / 4 - (b1**2 + b2**2) / 4
    factor = 2.0 if verbatim else 1.0
    c3 = factor * (a1 * b1 + a2 * b2) / 2
    c4 = factor * (a1 * g1 + a2 * g2)
    c5 = factor * (b1 * g1 + b2 * g2)
    return KapitsaCoefficients(d, w, kappa1, kappa2, a1, a2, b1, b2, g1, g2, x,
                               c1, c2, c3, c4, c5)


def first_order_residual(k: KapitsaCoefficients) -> float:
    """Largest residual of the six linear equations fixing the first-order orbit."""
    d, w = k.delta, k.omega
    res = [
        d * k.b2 + 0.5 * k.b1 - w * k.a1,
        -d * k.a2 - 0.5 * k.a1 - w * k.b1 - 2 * k.kappa2,
        -d * k.b1 + 0.5 * k.b2 - w * k.a2,
        d * k.a1 - 0.5 * k.a2 - w * k.b2,
        d * k.g2 + 0.5 * k.g1,
        -d * k.g1 + 0.5 * k.g2 - 2 * k.kappa1,
    ]
    return float(np.max(np.abs(res)))


def c5_closed_form(delta: float, omega: float, kappa1: float, kappa2: float) -> float:
    """``C5 = 64 k1 k2 omega (4 omega^2 - 4 delta^2 - 1) delta / (Xi (1 + 4 delta^2))``."""
    x = xi(delta, omega)
    if x == 0:
        raise SingularityError(f"Xi vanishes at delta={delta}, omega={omega}")
    return (64 * kappa1 * kappa2 * omega * (4 * omega**2 - 4 * delta**2 - 1) * delta
            / (x * (1 + 4 * delta**2)))


def first_order_orbit(t, k: KapitsaCoefficients):
    """``(X1(t), Y1(t))``."""
    c, s = np.cos(k.omega * np.asarray(t)), np.sin(k.omega * np.asarray(t))
    return k.a1 * c + k.b1 * s + k.g1, k.a2 * c + k.b2 * s + k.g2


def asymptotic_z(t, coeffs: KapitsaCoefficients, epsilon: float, omega: float | None = None):
    """``Z(t) = -1 + eps^2 (C1 + C2 cos 2wt + C3 sin 2wt + C4 cos wt + C5 sin wt)``."""
    w = coeffs.omega if omega is None else omega
    wt = w * np.asarray(t, dtype=float)
    c1, c2, c3, c4, c5 = coeffs.harmonics
    return -1.0 + epsilon**2 * (c1 + c2 * np.cos(2 * wt) + c3 * np.sin(2 * wt)
                                + c4 * np.cos(wt) + c5 * np.sin(wt))


def phase_density_two_level(coeffs: KapitsaCoefficients, epsilon: float | None = None) -> PhaseDensity:
    """Density of the modulation phase at a jump, from the excited population.

    ``epsilon`` only scales the excited population and cancels on
    normalization; it is accepted for symmetry with the Lambda oracle.
    """
    c1, c2, c3, c4, c5 = coeffs.harmonics
    if not c1 > 0:
        raise RegimeError("C1 must be positive for a jump-phase density")
    density = PhaseDensity.from_harmonics("two-level", c1, c4, c5, c2, c3)
    if density.minimum() < 0:
        raise RegimeError("phase density is negative: the orbit expansion is outside its regime")
    return density


def expected_drift(coeffs: KapitsaCoefficients, delta_gain: float) -> float:
    """Mean single-update change ``-delta C5 / (2 C1)`` of the detuning."""
    return -delta_gain * coeffs.c5 / (2 * coeffs.c1)


def rho_bound(omega: float, c_bound: float, kappa1: float, kappa2: float) -> float:
    """Upper bound ``4 k2^2 (1 + 5C^2 + 4 omega^2) + 16 k1^2`` on ``C1`` for ``|delta| <= C``."""
    return 4 * kappa2**2 * (1 + 5 * c_bound**2 + 4 * omega**2) + 16 * kappa1**2


def two_level_contraction(omega: float, c_bound: float, kappa1: float, kappa2: float,
                          kappa3: float, verbatim: bool = False) -> float:
    """Mean-square contraction factor ``sigma`` of the two-level lock.

    ``E[Delta_{N+1}^2 | Delta_N] <= (1 - eps^2 sigma) Delta_N^2 + O(eps^4)``
    needs ``C5 / C1 >= C5 / rho`` so ``rho`` divides the bound.  The
    ``verbatim`` form multiplies by ``rho`` instead and is kept for comparison.
    """
    margin = 4 * omega**2 - 4 * c_bound**2 - 1
    if margin < 0:
        raise RegimeError(f"4 omega^2 >= 4 C^2 + 1 fails (omega={omega}, C={c_bound})")
    base = (64 * kappa1 * kappa2 * kappa3 * omega * margin
            / ((4 * c_bound**2 + 1) * (16 * omega**4 + 8 * omega**2 + 1 + 8 * c_bound**2)))
    rho = rho_bound(omega, c_bound, kappa1, kappa2)
    return base * rho if verbatim else base / rho


def contraction_envelope(n, delta0: float, epsilon: float, sigma: float, fudge: float) -> np.ndarray:
    """``(1 - eps^2 sigma)^N delta0^2 + fudge eps^2``."""
    n = np.asarray(n, dtype=float)
    return (1 - epsilon**2 * sigma) ** n * delta0**2 + fudge * epsilon**2


__all__ = [
    "KapitsaCoefficients", "kapitsa_coefficients", "first_order_residual", "c5_closed_form",
    "first_order_orbit", "asymptotic_z", "phase_density_two_level", "expected_drift",
    "rho_bound", "two_level_contraction", "contraction_envelope", "xi",
]
