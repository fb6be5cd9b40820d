"""Unperturbed Lambda no-jump dynamics on the Bloch sphere.

With ``p = 2 Delta``, ``beta = 2 alpha`` and time rescaled by two, the
ground-subspace no-jump dynamics (Lambda Bloch convention, ``|g1>`` on the
north pole) read

    X' = -p Y - sin(beta) + s X,   Y' = p X + s Y,   Z' = -cos(beta) + s Z,

with ``s = sin(beta) X + cos(beta) Z``.  Surface elements dilate where
``s > 0`` and contract where ``s < 0``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ..errors import ConvergenceError, RegimeError
from ..qstate import BlochVector

HALF_PI = 0.5 * math.pi


class BlochEquilibria(NamedTuple):
    m_plus: BlochVector
    m_minus: BlochVector
    p: float
    beta: float
    unique: bool = False


def _s(state, beta):
    state = np.asarray(state, dtype=float)
    return math.sin(beta) * state[..., 0] + math.cos(beta) * state[..., 2]


def bloch_system_rhs(state, p: float, beta: float) -> np.ndarray:
    """Right-hand side of the rescaled system; ``state`` may be ``(..., 3)``."""
    state = np.asarray(state, dtype=float)
    x, y, z = state[..., 0], state[..., 1], state[..., 2]
    s = _s(state, beta)
    return np.stack([-p * y - math.sin(beta) + s * x, p * x + s * y, -math.cos(beta) + s * z], axis=-1)


def first_variation(state, dstate, p: float, beta: float) -> np.ndarray:
    """Linearization of :func:`bloch_system_rhs` applied to ``dstate``."""
    state = np.asarray(state, dtype=float)
    dstate = np.asarray(dstate, dtype=float)
    s = _s(state, beta)
    ds = _s(dstate, beta)
    dx, dy, dz = dstate[..., 0], dstate[..., 1], dstate[..., 2]
    return np.stack([-p * dy + s * dx + state[..., 0] * ds,
                     p * dx + s * dy + state[..., 1] * ds,
                     s * dz + state[..., 2] * ds], axis=-1)


def dilation_rate(state, beta: float):
    """``2 (sin(beta) X + cos(beta) Z)``, the log-rate of tangent length squared."""
    return 2.0 * _s(state, beta)


def bloch_equilibria(p: float, beta: float) -> BlochEquilibria:
    """Equilibria ``M+`` (dilating) and ``M-`` (contracting) for ``beta`` in ``[0, pi/2]``.

    At ``(|p|, beta) = (1, pi/2)`` the two points merge and ``unique`` is set.
    """
    p, beta = float(p), float(beta)
    if not -1e-15 <= beta <= HALF_PI + 1e-15:
        raise RegimeError(f"beta must lie in [0, pi/2], got {beta}")
    if p == 0.0:
        sb, cb = math.sin(beta), math.cos(beta)
        return BlochEquilibria(BlochVector(sb, 0.0, cb), BlochVector(-sb, 0.0, -cb), p, beta)
    if beta == 0.0:
        return BlochEquilibria(BlochVector(0.0, 0.0, 1.0), BlochVector(0.0, 0.0, -1.0), p, beta)
    if beta == HALF_PI:
        if abs(p) < 1:
            r = math.sqrt(1 - p * p)
            return BlochEquilibria(BlochVector(r, -p, 0.0), BlochVector(-r, -p, 0.0), p, beta)
        if abs(p) == 1:
            m = BlochVector(0.0, -p, 0.0)
            return BlochEquilibria(m, m, p, beta, unique=True)
        r = math.sqrt(1 - 1 / (p * p))
        return BlochEquilibria(BlochVector(0.0, -1 / p, r), BlochVector(0.0, -1 / p, -r), p, beta)
    # Cancellation-free rewrite of the radical formula using
    # (root + a)(root - a) = 4 p^2 cos^2(beta) and p^2 + 1 - root = 4 p^2 sin^2(beta) / (p^2 + 1 + root).
    sb, cb = math.sin(beta), math.cos(beta)
    p2 = p * p
    a = p2 - 1
    root = math.hypot(a, 2 * p * cb)
    if a < 0:
        v = root - a
        z = math.sqrt(2) * cb / math.sqrt(v)
    else:
        v = 4 * p2 * cb * cb / (root + a)
        z = math.sqrt((root + a) / (2 * p2))
    denom = p2 + 1 + root
    x = math.sqrt(2 * v) * sb / denom
    y = -2 * p * sb / denom
    return BlochEquilibria(BlochVector(x, y, z), BlochVector(-x, y, -z), p, beta)


def integrate(states, p: float, beta: float, duration: float, step: float = 0.01,
              project: bool = True) -> np.ndarray:
    """RK4 flow of the rescaled system for a batch of states ``(n, 3)``."""
    y = np.array(states, dtype=float)
    n = max(1, math.ceil(duration / step))
    h = duration / n

    def f(v):
        return bloch_system_rhs(v, p, beta)

    for _ in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if project:
            y /= np.linalg.norm(y, axis=-1, keepdims=True)
    return y


def converge_to(states, target, p: float, beta: float, tol: float = 1e-6,
                chunk: float = 5.0, max_time: float = 2000.0):
    """Integrate until every state is within ``tol`` of ``target``.

    Returns ``(final_states, elapsed)``; raises :class:`ConvergenceError`
    if ``max_time`` passes first.
    """
    y = np.array(states, dtype=float)
    target = np.asarray(target, dtype=float)
    elapsed = 0.0
    while elapsed < max_time:
        if np.max(np.linalg.norm(y - target, axis=-1)) < tol:
            return y, elapsed
        y = integrate(y, p, beta, chunk)
        elapsed += chunk
    raise ConvergenceError(f"states did not reach the target within time {max_time}")


def lambda_theta(delta: float, alpha: float) -> float:
    """``4 Delta^2 + 1 - sqrt((4 Delta^2 - 1)^2 + 16 Delta^2 cos^2(2 alpha))``."""
    d2 = 4 * delta * delta
    return d2 + 1 - math.sqrt((d2 - 1) ** 2 + 4 * d2 * math.cos(2 * alpha) ** 2)


def lambda_contraction(delta: float, alpha: float, c_bound: float, kappa2: float):
    """``(Theta, sigma)`` for the Lambda lock with gain ``delta_gain = kappa2 eps^3``."""
    if not 0 < alpha < HALF_PI:
        raise RegimeError(f"alpha must lie in (0, pi/2), got {alpha}")
    if not 0 < c_bound < 0.5:
        raise RegimeError(f"the clip bound must satisfy 0 < C < 1/2, got {c_bound}")
    c2a = math.cos(2 * alpha)
    sigma = (math.pi * kappa2 * 4 * math.sin(2 * alpha) ** 2
             / (1 + 8 * c2a * c2a * c_bound**2 + 16 * c_bound**4))
    return lambda_theta(delta, alpha), sigma


__all__ = [
    "BlochEquilibria", "bloch_system_rhs", "first_variation", "dilation_rate",
    "bloch_equilibria", "integrate", "converge_to", "lambda_theta", "lambda_contraction",
]
