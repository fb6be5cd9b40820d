"""Conditional no-jump dynamics of the three plants and their integration.

Every plant is described by a Hamiltonian ``H(t) = H0 + c H1`` and a jump-rate
operator ``K(t) = K0 + c K1 + c^2 K2`` with ``c = cos(omega t)``.  Between
jumps the normalized state follows

    d rho/dt = -i[H, rho] - {K, rho}/2 + tr(K rho) rho

and the probability of a jump in ``[t, t+dt]`` is ``tr(K rho) dt``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Union

import numpy as np

from .errors import ConfigurationError, DomainError
from .qstate import (
    KET_E,
    KET_EL,
    KET_G,
    KET_G1,
    KET_G2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    BlochVector,
    BrightDarkBasis,
    from_bloch,
    make_bright_dark,
    projector,
    renormalize,
    to_bloch,
)


KET_G2D = np.eye(2, dtype=complex)  # |g1>, |g2> inside the reduced ground space


class OperatorTerms(NamedTuple):
    h0: np.ndarray
    h1: np.ndarray
    k0: np.ndarray
    k1: np.ndarray
    k2: np.ndarray


@dataclass(frozen=True)
class TwoLevelParams:
    """Driven two-level atom in units of the excited-state decay rate."""

    delta: float
    u_bar: float
    v_bar: float
    omega: float

    tag = "two-level"
    dim = 2

    def __post_init__(self):
        if self.u_bar < 0 or self.v_bar < 0:
            raise DomainError("drive amplitudes must be nonnegative")
        if not self.omega > 0:
            raise DomainError("modulation frequency must be positive")

    @property
    def unit_scale(self) -> float:
        return 1.0

    @property
    def fast_time(self) -> float:
        return 1.0 / max(1.0, 2 * (self.u_bar + self.v_bar), abs(self.delta))

    @property
    def max_jump_rate(self) -> float:
        return 1.0

    @property
    def channel_probabilities(self) -> np.ndarray:
        return np.array([1.0])

    def reset_states(self) -> list[np.ndarray]:
        return [projector(KET_G)]

    def with_delta(self, delta: float) -> "TwoLevelParams":
        return replace(self, delta=float(delta))

    def operator_terms(self) -> OperatorTerms:
        zero = np.zeros((2, 2), dtype=complex)
        return OperatorTerms(
            0.5 * self.delta * SIGMA_Z + self.u_bar * SIGMA_X,
            self.v_bar * SIGMA_Y,
            projector(KET_E),
            zero,
            zero,
        )


@dataclass(frozen=True)
class ReducedLambdaParams:
    """Slow ground-subspace model of the Lambda system, in units of gamma."""

    delta: float
    epsilon: float
    omega: float
    basis: BrightDarkBasis
    gamma1: float = 0.5
    gamma2: float = 0.5

    tag = "lambda-reduced"
    dim = 2

    def __post_init__(self):
        if not 0 < self.basis.alpha < math.pi / 2:
            raise DomainError("bright-state angle must lie strictly inside (0, pi/2)")
        if self.gamma1 <= 0 or self.gamma2 <= 0:
            raise DomainError("branching rates must be positive")
        if abs(self.gamma1 + self.gamma2 - 1.0) > 1e-12:
            raise DomainError("branching rates must sum to 1 in gamma units")
        if not self.omega > 0:
            raise DomainError("modulation frequency must be positive")

    @classmethod
    def from_rabi(cls, delta, epsilon, omega, omega1, omega2, Gamma1, Gamma2):
        total = Gamma1 + Gamma2
        return cls(delta, epsilon, omega, make_bright_dark(omega1, omega2),
                   Gamma1 / total, Gamma2 / total)

    @property
    def alpha(self) -> float:
        return self.basis.alpha

    @property
    def unit_scale(self) -> float:
        return 1.0

    @property
    def fast_time(self) -> float:
        return 1.0 / max(1.0, abs(self.delta))

    @property
    def max_jump_rate(self) -> float:
        return 1.0 + self.epsilon**2

    @property
    def channel_probabilities(self) -> np.ndarray:
        return np.array([self.gamma1, self.gamma2])

    def reset_states(self) -> list[np.ndarray]:
        return [projector(KET_G2D[0]), projector(KET_G2D[1])]

    def with_delta(self, delta: float) -> "ReducedLambdaParams":
        return replace(self, delta=float(delta))

    def modulated_bright(self, t: float) -> np.ndarray:
        """Unnormalized ``|b> + i eps cos(omega t) |d>``."""
        return self.basis.bright + 1j * self.epsilon * math.cos(self.omega * t) * self.basis.dark

    def operator_terms(self) -> OperatorTerms:
        b, d = self.basis.bright, self.basis.dark
        bd = np.outer(b, d.conj())
        return OperatorTerms(
            0.5 * self.delta * SIGMA_Z,
            np.zeros((2, 2), dtype=complex),
            projector(b),
            1j * self.epsilon * (bd.conj().T - bd),
            self.epsilon**2 * projector(d),
        )


@dataclass(frozen=True)
class FullLambdaParams:
    """Three-level Lambda system with the excited level kept explicitly.

    Rates are in an arbitrary reference unit; ``unit_scale`` is the optical
    pumping rate ``gamma`` that converts controller (gamma) units into them.
    The modulated fields ``omega1 + i eps omega2 c`` and ``omega2 - i eps omega1 c``
    make the excited level couple to ``|b> - i eps c |d>`` with the dark
    vector of :class:`~jumplock.qstate.BrightDarkBasis`; a negative ``epsilon``
    gives the parent of :class:`ReducedLambdaParams` with the same ``epsilon``
    magnitude.
    """

    delta: float
    omega1: float
    omega2: float
    Gamma1: float
    Gamma2: float
    epsilon: float
    omega: float
    delta_e: float = 0.0

    tag = "lambda-full"
    dim = 3

    def __post_init__(self):
        if self.Gamma1 <= 0 or self.Gamma2 <= 0:
            raise DomainError("decay rates must be positive")
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise DomainError("Rabi frequencies must be positive")
        if not self.omega > 0:
            raise DomainError("modulation frequency must be positive")

    @property
    def gamma_rates(self) -> tuple[float, float]:
        scale = 4 * (self.omega1**2 + self.omega2**2) / (self.Gamma1 + self.Gamma2) ** 2
        return scale * self.Gamma1, scale * self.Gamma2

    @property
    def unit_scale(self) -> float:
        return sum(self.gamma_rates)

    @property
    def basis(self) -> BrightDarkBasis:
        return make_bright_dark(self.omega1, self.omega2)

    @property
    def alpha(self) -> float:
        return self.basis.alpha

    @property
    def fast_time(self) -> float:
        rabi = math.hypot(self.omega1, self.omega2)
        return 1.0 / max(self.Gamma1 + self.Gamma2, rabi, abs(self.delta_e))

    @property
    def max_jump_rate(self) -> float:
        return self.Gamma1 + self.Gamma2

    @property
    def channel_probabilities(self) -> np.ndarray:
        total = self.Gamma1 + self.Gamma2
        return np.array([self.Gamma1 / total, self.Gamma2 / total])

    def reset_states(self) -> list[np.ndarray]:
        return [projector(KET_G1), projector(KET_G2)]

    def with_delta(self, delta: float) -> "FullLambdaParams":
        return replace(self, delta=float(delta))

    def operator_terms(self) -> OperatorTerms:
        p1, p2 = projector(KET_G1), projector(KET_G2)
        g1e = np.outer(KET_G1, KET_EL)
        g2e = np.outer(KET_G2, KET_EL)
        h0 = (0.5 * self.delta * (p2 - p1) + (self.delta_e + 0.5 * self.delta) * (p1 + p2)
              + self.omega1 * (g1e + g1e.T) + self.omega2 * (g2e + g2e.T))
        # Omega1 -> Omega1 + i eps Omega2 c, Omega2 -> Omega2 - i eps Omega1 c
        a1 = 1j * self.epsilon * self.omega2
        a2 = -1j * self.epsilon * self.omega1
        h1 = a1 * g1e + np.conj(a1) * g1e.T + a2 * g2e + np.conj(a2) * g2e.T
        zero = np.zeros((3, 3), dtype=complex)
        return OperatorTerms(h0, h1, (self.Gamma1 + self.Gamma2) * projector(KET_EL), zero, zero)


Model = Union[TwoLevelParams, ReducedLambdaParams, FullLambdaParams]


def hamiltonian(model: Model, t: float) -> np.ndarray:
    terms = model.operator_terms()
    return terms.h0 + math.cos(model.omega * t) * terms.h1


def rate_operator(model: Model, t: float) -> np.ndarray:
    terms = model.operator_terms()
    c = math.cos(model.omega * t)
    return terms.k0 + c * terms.k1 + c * c * terms.k2


def nojump_rhs(model: Model, rho: np.ndarray, t: float) -> np.ndarray:
    """Normalized conditional derivative for any plant."""
    h = hamiltonian(model, t)
    k = rate_operator(model, t)
    kr = k @ rho
    return -1j * (h @ rho - rho @ h) - 0.5 * (kr + rho @ k) + np.trace(kr) * rho


def two_level_rhs(state, params: TwoLevelParams, t: float) -> np.ndarray:
    """Bloch-form derivative ``(dX, dY, dZ)`` of the driven two-level atom."""
    x, y, z = state
    d, u = params.delta, params.u_bar
    v = params.v_bar * math.cos(params.omega * t)
    return np.array([
        -d * y - 0.5 * x + 0.5 * (1 + z) * x + 2 * v * z,
        d * x - 0.5 * y + 0.5 * (1 + z) * y - 2 * u * z,
        -0.5 * (1 - z) * (1 + z) + 2 * u * y - 2 * v * x,
    ])


def reduced_lambda_rhs(rho: np.ndarray, params: ReducedLambdaParams, t: float) -> np.ndarray:
    return nojump_rhs(params, np.asarray(rho, dtype=complex), t)


def full_lambda_nojump_rhs(rho: np.ndarray, params: FullLambdaParams, t: float) -> np.ndarray:
    return nojump_rhs(params, np.asarray(rho, dtype=complex), t)


def default_dt(model: Model) -> float:
    """``min(1e-3 * fast time, period / 200)``."""
    return min(1e-3 * model.fast_time, 2 * math.pi / model.omega / 200)


@dataclass(frozen=True)
class PropagatorConfig:
    dt: float
    renormalize: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError("integration step must be positive")

    @classmethod
    def for_model(cls, model: Model, dt: float | None = None, renormalize: bool = True):
        cfg = cls(default_dt(model) if dt is None else dt, renormalize)
        cfg.check(model)
        return cfg

    def check(self, model: Model) -> None:
        if self.dt * model.max_jump_rate >= 0.1:
            raise ConfigurationError(
                f"dt={self.dt:g} too large for jump rate {model.max_jump_rate:g} "
                "(need dt * rate < 0.1)")


def _rk4(f, y, t, h):
    k1 = f(y, t)
    k2 = f(y + 0.5 * h * k1, t + 0.5 * h)
    k3 = f(y + 0.5 * h * k2, t + 0.5 * h)
    k4 = f(y + h * k3, t + h)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def propagate(model: Model, state, t0: float, t1: float, cfg: PropagatorConfig):
    """Fixed-step RK4 integration of the no-jump dynamics from ``t0`` to ``t1``.

    The two-level plant is integrated in Bloch form and accepts either a
    ``BlochVector`` or a 2x2 density matrix (the same kind is returned).
    Lambda plants take and return density matrices.
    """
    if t1 < t0:
        raise ConfigurationError("t1 must not precede t0")
    cfg.check(model)
    span = t1 - t0
    n = 0 if span == 0 else max(1, math.ceil(span / cfg.dt - 1e-9))
    if isinstance(model, TwoLevelParams):
        as_matrix = isinstance(state, np.ndarray) and state.ndim == 2
        y = np.array(to_bloch(state) if as_matrix else state, dtype=float)

        def f(s, t):
            return two_level_rhs(s, model, t)
    else:
        as_matrix = True
        y = np.array(state, dtype=complex)

        def f(s, t):
            return nojump_rhs(model, s, t)
    if n:
        h = span / n
        for i in range(n):
            y = _rk4(f, y, t0 + i * h, h)
            if cfg.renormalize and y.ndim == 2:
                y = renormalize(y)
    if isinstance(model, TwoLevelParams):
        if as_matrix:
            return from_bloch(y / max(1.0, float(np.linalg.norm(y))))
        return BlochVector(*y)
    return y


# -- real-coordinate superoperators -------------------------------------------------

def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) Hermitian basis with ``I/sqrt(d)`` first."""
    mats = [np.eye(d, dtype=complex) / math.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1 / math.sqrt(2)
            mats.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[j, k], m[k, j] = -1j / math.sqrt(2), 1j / math.sqrt(2)
            mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag / math.sqrt(l * (l + 1))).astype(complex))
    return np.array(mats)


def to_coords(rho: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.einsum("kij,ji->k", basis, rho).real


def from_coords(x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.einsum("k,kij->ij", x, basis)


def _linear_part(h: np.ndarray, k: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Real matrix of ``rho -> -i[h, rho] - {k, rho}/2`` in ``basis`` coordinates."""
    images = -1j * (h @ basis - basis @ h) - 0.5 * (k @ basis + basis @ k)
    return np.einsum("iab,jba->ij", basis, images).real


@dataclass(frozen=True)
class LinearGenerator:
    """Unnormalized no-jump generator ``A(t) = R0 + c R1 + c^2 R2`` in real coordinates.

    The first coordinate times ``sqrt(dim)`` is the trace, i.e. the survival
    probability of the unnormalized state.
    """

    r0: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    basis: np.ndarray = field(repr=False)

    @classmethod
    def for_model(cls, model: Model) -> "LinearGenerator":
        basis = hermitian_basis(model.dim)
        t = model.operator_terms()
        zero = np.zeros_like(t.h0)
        return cls(_linear_part(t.h0, t.k0, basis), _linear_part(t.h1, t.k1, basis),
                   _linear_part(zero, t.k2, basis), basis)

    @property
    def trace_weight(self) -> float:
        return math.sqrt(self.basis.shape[1])
