"""Compiled inner loops of the jump sampler.

The unnormalized no-jump state is linear in its initial value, so one RK4
step is a fixed real matrix once the step index within a modulation period is
known.  With ``dt = period / M`` the ``M`` step maps repeat every period and a
whole period collapses to a single product matrix.
"""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def _matmul(a, b, out):
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += a[i, k] * b[k, j]
            out[i, j] = s


@njit(cache=True)
def _matvec(a, x, out):
    n = a.shape[0]
    for i in range(n):
        s = 0.0
        for k in range(n):
            s += a[i, k] * x[k]
        out[i] = s


@njit(cache=True)
def build_step_maps(r0, r1, r2, omega, dt, maps):
    """Fill ``maps[k]`` with the RK4 step from ``k*dt`` to ``(k+1)*dt``."""
    m_steps, n = maps.shape[0], maps.shape[1]
    a_start = np.empty((n, n))
    a_mid = np.empty((n, n))
    a_end = np.empty((n, n))
    tmp = np.empty((n, n))
    k2 = np.empty((n, n))
    k3 = np.empty((n, n))
    k4 = np.empty((n, n))
    for k in range(m_steps):
        t = k * dt
        c0 = math.cos(omega * t)
        cm = math.cos(omega * (t + 0.5 * dt))
        c1 = math.cos(omega * (t + dt))
        for i in range(n):
            for j in range(n):
                a_start[i, j] = r0[i, j] + c0 * r1[i, j] + c0 * c0 * r2[i, j]
                a_mid[i, j] = r0[i, j] + cm * r1[i, j] + cm * cm * r2[i, j]
                a_end[i, j] = r0[i, j] + c1 * r1[i, j] + c1 * c1 * r2[i, j]
        # k2 = A_mid (I + dt/2 k1)
        for i in range(n):
            for j in range(n):
                tmp[i, j] = 0.5 * dt * a_start[i, j]
            tmp[i, i] += 1.0
        _matmul(a_mid, tmp, k2)
        for i in range(n):
            for j in range(n):
                tmp[i, j] = 0.5 * dt * k2[i, j]
            tmp[i, i] += 1.0
        _matmul(a_mid, tmp, k3)
        for i in range(n):
            for j in range(n):
                tmp[i, j] = dt * k3[i, j]
            tmp[i, i] += 1.0
        _matmul(a_end, tmp, k4)
        for i in range(n):
            for j in range(n):
                maps[k, i, j] = dt / 6.0 * (a_start[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
            maps[k, i, i] += 1.0


@njit(cache=True)
def _affine_times(c, slope, p, deg, out):
    """``out = (c + x slope) p`` for a matrix polynomial ``p`` in ``x`` of degree ``deg``."""
    n = c.shape[0]
    tmp = np.empty((n, n))
    for j in range(deg + 2):
        for i in range(n):
            for l in range(n):
                out[j, i, l] = 0.0
    for j in range(deg + 1):
        _matmul(c, p[j], tmp)
        out[j] += tmp
        _matmul(slope, p[j], tmp)
        out[j + 1] += tmp


@njit(cache=True)
def build_delta_polynomials(r0, slope, r1, r2, omega, dt, coef):
    """RK4 step maps as exact degree-4 polynomials in the detuning.

    The generator is affine in the detuning, ``A = R0 + x S + c R1 + c^2 R2``,
    so ``coef[k, j]`` holds the ``x**j`` coefficient of step map ``k``.
    """
    m_steps, n = coef.shape[0], coef.shape[2]
    eye = np.eye(n)
    a_start = np.empty((n, n))
    a_mid = np.empty((n, n))
    a_end = np.empty((n, n))
    t1 = np.zeros((5, n, n))
    k2 = np.zeros((5, n, n))
    k3 = np.zeros((5, n, n))
    k4 = np.zeros((5, n, n))
    for k in range(m_steps):
        t = k * dt
        c0 = math.cos(omega * t)
        cm = math.cos(omega * (t + 0.5 * dt))
        c1 = math.cos(omega * (t + dt))
        for i in range(n):
            for j in range(n):
                a_start[i, j] = r0[i, j] + c0 * r1[i, j] + c0 * c0 * r2[i, j]
                a_mid[i, j] = r0[i, j] + cm * r1[i, j] + cm * cm * r2[i, j]
                a_end[i, j] = r0[i, j] + c1 * r1[i, j] + c1 * c1 * r2[i, j]
        # k2 = A_mid (I + dt/2 A_start)
        t1[:] = 0.0
        t1[0] = eye + 0.5 * dt * a_start
        t1[1] = 0.5 * dt * slope
        _affine_times(a_mid, slope, t1, 1, k2)
        # k3 = A_mid (I + dt/2 k2)
        t1[:] = 0.5 * dt * k2
        t1[0] += eye
        _affine_times(a_mid, slope, t1, 2, k3)
        # k4 = A_end (I + dt k3)
        t1[:] = dt * k3
        t1[0] += eye
        _affine_times(a_end, slope, t1, 3, k4)
        for j in range(5):
            coef[k, j] = dt / 6.0 * (2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        coef[k, 0] += eye + dt / 6.0 * a_start
        coef[k, 1] += dt / 6.0 * slope


@njit(cache=True)
def evaluate_maps(coef, x, maps):
    """``maps[k] = sum_j coef[k, j] x**j`` (Horner)."""
    m_steps, deg, n = coef.shape[0], coef.shape[1] - 1, coef.shape[2]
    for k in range(m_steps):
        for i in range(n):
            for l in range(n):
                v = coef[k, deg, i, l]
                for j in range(deg - 1, -1, -1):
                    v = v * x + coef[k, j, i, l]
                maps[k, i, l] = v


@njit(cache=True)
def period_product(maps):
    m_steps, n = maps.shape[0], maps.shape[1]
    u = np.eye(n)
    tmp = np.empty((n, n))
    for k in range(m_steps):
        _matmul(maps[k], u, tmp)
        u[:, :] = tmp
    return u


@njit(cache=True)
def next_jump(maps, period, x0, k0, target, trace_weight, max_steps):
    """Number of steps until the survival probability drops below ``exp(-target)``.

    ``x0`` is a unit-trace state in real coordinates at step index ``k0``.
    Returns ``(steps, x)`` where ``x`` is the normalized state just before the
    reset, or ``(-1, x)`` when ``max_steps`` elapse first.
    """
    m_steps, n = maps.shape[0], maps.shape[1]
    x = x0.copy()
    y = np.empty(n)
    consumed = 0.0
    threshold = math.exp(-target)
    steps = 0
    k = k0
    while steps < max_steps:
        if k == 0 and steps + m_steps <= max_steps:
            _matvec(period, x, y)
            s = trace_weight * y[0]
            if s > threshold:
                consumed += -math.log(s)
                threshold = math.exp(consumed - target)
                for i in range(n):
                    x[i] = y[i] / s
                steps += m_steps
                continue
        _matvec(maps[k], x, y)
        s = trace_weight * y[0]
        steps += 1
        k += 1
        if k == m_steps:
            k = 0
        if s <= threshold:
            for i in range(n):
                x[i] = y[i] / s
            return steps, x
        if k == 0:
            consumed += -math.log(s)
            threshold = math.exp(consumed - target)
            for i in range(n):
                x[i] = y[i] / s
        else:
            for i in range(n):
                x[i] = y[i]
    s = trace_weight * x[0]
    for i in range(n):
        x[i] = x[i] / s
    return -1, x
