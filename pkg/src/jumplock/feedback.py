"""Click-triggered synchronization controller.

After every detected click that arrives later than the dead time ``T`` since
the previous detected click, the detuning is updated with the modulation
phase at the click:

* two-level atom: ``Delta <- Delta - delta sin(phi)``
* Lambda system:  ``Delta <- Delta - delta sin(2 alpha) cos(phi)``

and then clipped at the prior bound ``C``.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .dynamics import Model, PropagatorConfig, TwoLevelParams
from .errors import ConfigurationError, DomainError
from .jumps import TWO_PI, DetectionModel, PeriodicJumpSampler, RngStream, step_with_jumps
from .qstate import to_bloch
from .records import TrajectoryRecord

CLIP_MODES = ("paper", "symmetric")
VARIANTS = ("two-level", "lambda")


@dataclass(frozen=True)
class FeedbackConfig:
    """Controller gains in controller (plant rate) units.

    ``alpha`` is required for the Lambda variant, where the update is scaled
    by ``sin(2 alpha)``.  ``clip_mode="paper"`` maps any out-of-range
    candidate to ``+C``; ``"symmetric"`` clamps to ``[-C, C]``.
    """

    c_bound: float
    delta_gain: float
    omega: float
    dead_time: float = 0.0
    variant: str = "two-level"
    alpha: float | None = None
    clip_mode: str = "paper"

    def __post_init__(self):
        if not self.c_bound > 0:
            raise DomainError("clip bound C must be positive")
        if self.delta_gain < 0:
            raise DomainError("gain must be nonnegative")
        if self.dead_time < 0:
            raise DomainError("dead time must be nonnegative")
        if not self.omega > 0:
            raise DomainError("modulation frequency must be positive")
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown variant {self.variant!r}")
        if self.clip_mode not in CLIP_MODES:
            raise ConfigurationError(f"unknown clip mode {self.clip_mode!r}")
        if self.variant == "lambda":
            if self.alpha is None:
                raise ConfigurationError("the Lambda variant needs the bright-state angle alpha")
            if not self.c_bound < 0.5:
                warnings.warn(f"C = {self.c_bound} is outside the proven Lambda regime C < 1/2",
                              stacklevel=3)
        elif not 4 * self.c_bound**2 + 1 < 4 * self.omega**2:
            warnings.warn(f"4C^2 + 1 < 4 omega^2 fails for C = {self.c_bound}, omega = {self.omega}",
                          stacklevel=3)

    @property
    def gain_factor(self) -> float:
        return 1.0 if self.variant == "two-level" else math.sin(2 * self.alpha)

    def demodulate(self, phase: float) -> float:
        return math.sin(phase) if self.variant == "two-level" else math.cos(phase)

    def clip(self, candidate: float) -> float:
        c = self.c_bound
        if self.clip_mode == "symmetric":
            return min(max(candidate, -c), c)
        return candidate if abs(candidate) <= c else c


class HistoryEntry(NamedTuple):
    counter: int
    t: float
    delta: float
    phase: float
    matured: bool


@dataclass
class FeedbackState:
    """Mutable controller memory; the ``on_*`` functions update it in place."""

    delta_n: float
    stopwatch: float = 0.0
    counter: int = 0
    history: list = field(default_factory=list)


def on_tick(fs: FeedbackState, dt: float) -> FeedbackState:
    if not dt > 0:
        raise DomainError("tick length must be positive")
    fs.stopwatch += dt
    return fs


def on_detected_click(fs: FeedbackState, t: float, cfg: FeedbackConfig,
                      phase: float | None = None) -> FeedbackState:
    """Process a detected click at time ``t`` (controller units).

    ``phase`` defaults to ``omega t mod 2 pi``; the jump samplers pass the
    phase they stored with the event.
    """
    if phase is None:
        phase = (cfg.omega * t) % TWO_PI
    matured = fs.stopwatch > cfg.dead_time
    fs.stopwatch = 0.0
    if matured:
        step = cfg.delta_gain * cfg.gain_factor * cfg.demodulate(phase)
        fs.delta_n = cfg.clip(fs.delta_n - step)
        fs.counter += 1
    fs.history.append(HistoryEntry(fs.counter, t, fs.delta_n, phase, matured))
    return fs


def _check_units(model: Model, cfg: FeedbackConfig) -> None:
    expected = "two-level" if isinstance(model, TwoLevelParams) else "lambda"
    if cfg.variant != expected:
        raise ConfigurationError(f"controller variant {cfg.variant!r} does not match plant {model.tag!r}")
    plant_omega = cfg.omega * model.unit_scale
    if not math.isclose(plant_omega, model.omega, rel_tol=1e-9):
        raise ConfigurationError(
            f"plant omega {model.omega:g} != controller omega {cfg.omega:g} x unit scale {model.unit_scale:g}")
    if cfg.variant == "lambda" and not math.isclose(cfg.alpha, model.alpha, rel_tol=1e-12):
        raise ConfigurationError("controller alpha differs from the plant bright-state angle")


def _initial_state(model: Model, rho0):
    if rho0 is None:
        return model.reset_states()[0]
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim == 1:
        rho0 = np.outer(rho0, rho0.conj())
    if rho0.shape != (model.dim, model.dim):
        raise ConfigurationError(f"initial state must be {model.dim}x{model.dim}")
    return rho0


def run_closed_loop(model: Model, cfg: FeedbackConfig, det: DetectionModel, rng: RngStream, *,
                    delta0: float, max_clicks: int | None = None, max_time: float | None = None,
                    rho0=None, dt: float | None = None, engine: str = "periodic") -> TrajectoryRecord:
    """Simulate the plant under feedback until a stop condition is met.

    ``delta0`` and ``max_time`` are in controller units; the plant sees the
    detuning ``delta_n * model.unit_scale``.  ``max_clicks`` counts matured
    detected clicks.  ``engine="stepwise"`` uses one Bernoulli draw per step
    and is meant for cross-checks only.
    """
    if max_clicks is None and max_time is None:
        raise ConfigurationError("a stop condition (max_clicks or max_time) is required")
    if max_clicks is not None and max_clicks < 0:
        raise ConfigurationError("max_clicks must be nonnegative")
    _check_units(model, cfg)
    if abs(delta0) > cfg.c_bound:
        raise DomainError(f"|delta0| = {abs(delta0)} exceeds the clip bound {cfg.c_bound}")
    if len(det.eta) != len(model.channel_probabilities):
        raise ConfigurationError("one detection efficiency per jump channel is required")
    fs = FeedbackState(float(delta0))
    state = _initial_state(model, rho0)
    started = time.perf_counter()
    runner = _run_periodic if engine == "periodic" else _run_stepwise if engine == "stepwise" else None
    if runner is None:
        raise ConfigurationError(f"unknown engine {engine!r}")
    log, final_time = runner(model, cfg, det, rng, fs, state, max_clicks, max_time, dt)
    n = len(log)
    cols = list(zip(*log)) if n else [[]] * 7
    return TrajectoryRecord(
        seed=rng.seed, model=model.tag, delta0=float(delta0),
        t=cols[0], kind=cols[1], detected=cols[2], phase=cols[3], matured=cols[4],
        counter=cols[5], delta=cols[6], final_time=final_time,
        wall_time=time.perf_counter() - started, rng_draws=rng.counter,
        meta={"engine": engine})


def _run_periodic(model, cfg, det, rng, fs, state, max_clicks, max_time, dt):
    scale = model.unit_scale
    sampler = PeriodicJumpSampler(model.with_delta(fs.delta_n * scale), dt)
    m = sampler.steps_per_period
    step_ctrl = sampler.dt * scale
    total_steps = None if max_time is None else int(math.floor(max_time / step_ctrl + 1e-9))
    two_channels = len(sampler.branching) > 1
    x = sampler.coords(state)
    n = 0
    log = []
    while max_clicks is None or fs.counter < max_clicks:
        sampler.set_delta(fs.delta_n * scale)
        target = -math.log1p(-rng.uniform())
        budget = (1 << 62) if total_steps is None else total_steps - n
        if budget <= 0:
            break
        steps, x = sampler.next_jump(x, n % m, target, budget)
        if steps < 0:
            n += budget
            on_tick(fs, budget * step_ctrl)
            break
        n += steps
        on_tick(fs, steps * step_ctrl)
        channel = 1 if two_channels and rng.uniform() >= sampler.branching[0] else 0
        detected = rng.uniform() < det.efficiency(channel)
        x = sampler.reset_coords[channel].copy()
        t = n * step_ctrl
        phase = sampler.phase(n)
        matured = False
        if detected:
            on_detected_click(fs, t, cfg, phase)
            matured = fs.history[-1].matured
        log.append((t, channel + 1, detected, phase, matured, fs.counter, fs.delta_n))
    return log, n * step_ctrl


def _run_stepwise(model, cfg, det, rng, fs, state, max_clicks, max_time, dt):
    scale = model.unit_scale
    h = PropagatorConfig.for_model(model, dt).dt
    if isinstance(model, TwoLevelParams):
        state = to_bloch(state)
    plant = model.with_delta(fs.delta_n * scale)
    n = 0
    log = []
    while max_clicks is None or fs.counter < max_clicks:
        t_plant = n * h
        if max_time is not None and (n + 1) * h * scale > max_time + 1e-12:
            break
        state, event = step_with_jumps(plant, state, t_plant, h, rng, det)
        n += 1
        on_tick(fs, h * scale)
        if event is None:
            continue
        matured = False
        t = event.t * scale
        if event.detected:
            on_detected_click(fs, t, cfg, event.phase)
            matured = fs.history[-1].matured
            plant = model.with_delta(fs.delta_n * scale)
        log.append((t, event.kind, event.detected, event.phase, matured, fs.counter, fs.delta_n))
    return log, n * h * scale
