"""Density matrices, Bloch coordinates and the bright/dark ground basis.

Basis order is fixed project-wide: ``(|g>, |e>)`` for the two-level atom and
``(|g1>, |g2>, |e>)`` for the Lambda system.  Density matrices are plain
complex ``numpy`` arrays; the helpers below validate and convert them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, DomainError

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-9
PSD_ATOL = 1e-9

# Pauli matrices in the (|g>, |e>) order: |g> is the south pole (Z = -1).
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)

KET_G = np.array([1, 0], dtype=complex)
KET_E = np.array([0, 1], dtype=complex)
# Lambda system: ground kets live in the first two slots.
KET_G1 = np.array([1, 0, 0], dtype=complex)
KET_G2 = np.array([0, 1, 0], dtype=complex)
KET_EL = np.array([0, 0, 1], dtype=complex)


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float

    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class BrightDarkBasis:
    """Bright/dark pair spanned by the two ground states.

    ``bright = cos(a)|g1> + sin(a)|g2>`` and ``dark = -sin(a)|g1> + cos(a)|g2>``
    where ``a = atan2(omega2, omega1)``.  The overall sign of the dark vector
    is irrelevant for ``|d><d|`` but fixes the phase of the modulated bright
    vector ``|b> + i eps cos(omega t) |d>`` used by the reduced Lambda model.
    """

    alpha: float
    bright: np.ndarray
    dark: np.ndarray

    @classmethod
    def from_angle(cls, alpha: float) -> "BrightDarkBasis":
        c, s = np.cos(alpha), np.sin(alpha)
        return cls(float(alpha), np.array([c, s], dtype=complex), np.array([-s, c], dtype=complex))

    def bright_projector(self) -> np.ndarray:
        return projector(self.bright)

    def dark_projector(self) -> np.ndarray:
        return projector(self.dark)


def projector(ket) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def ground_state() -> np.ndarray:
    return projector(KET_G)


def excited_state() -> np.ndarray:
    return projector(KET_E)


def make_bright_dark(omega1: float, omega2: float) -> BrightDarkBasis:
    """Bright/dark basis for two positive Rabi frequencies."""
    if not (omega1 > 0 and omega2 > 0):
        raise DomainError(f"Rabi frequencies must be positive, got ({omega1}, {omega2})")
    return BrightDarkBasis.from_angle(np.arctan2(omega2, omega1))


def _check_dim(rho: np.ndarray, dim: int | None) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise DimensionError(f"expected a {dim}x{dim} density matrix, got {rho.shape}")
    return rho


def validate_density_matrix(rho, dim: int | None = None, psd: bool = False) -> np.ndarray:
    """Check Hermiticity and unit trace (and positivity when ``psd``).

    The eigenvalue solve is opt-in; production loops only pay for the cheap
    checks.
    """
    rho = _check_dim(rho, dim)
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_ATOL:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TRACE_ATOL:
        raise DomainError(f"density matrix trace is {np.trace(rho).real:.3e}, not 1")
    if psd and np.linalg.eigvalsh(rho).min() < -PSD_ATOL:
        raise DomainError("density matrix is not positive semidefinite")
    return rho


def renormalize(rho: np.ndarray) -> np.ndarray:
    """Clamp floating-point drift: Hermitian part, then unit trace."""
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def to_bloch(rho) -> BlochVector:
    rho = _check_dim(rho, 2)
    return BlochVector(
        float(np.trace(SIGMA_X @ rho).real),
        float(np.trace(SIGMA_Y @ rho).real),
        float(np.trace(SIGMA_Z @ rho).real),
    )


def from_bloch(v) -> np.ndarray:
    x, y, z = (float(c) for c in v)
    if x * x + y * y + z * z > 1.0 + 1e-9:
        raise DomainError(f"Bloch vector ({x}, {y}, {z}) lies outside the unit ball")
    return 0.5 * (IDENTITY2 + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)


# The Lambda-system analysis puts |g1> on the north pole, so its Z axis is the
# opposite of the two-level one while X and Y coincide.
def to_lambda_bloch(rho) -> BlochVector:
    """Bloch coordinates of a ground-subspace state in the Lambda convention."""
    x, y, z = to_bloch(rho)
    return BlochVector(x, y, -z)


def from_lambda_bloch(v) -> np.ndarray:
    x, y, z = (float(c) for c in v)
    return from_bloch((x, y, -z))


def embed_ground(rho2: np.ndarray) -> np.ndarray:
    """Place a 2x2 ground-subspace matrix into the 3x3 Lambda space."""
    rho2 = _check_dim(rho2, 2)
    out = np.zeros((3, 3), dtype=complex)
    out[:2, :2] = rho2
    return out
