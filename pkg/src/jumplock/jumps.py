"""Jump sampling, detection efficiency and click events.

Two samplers share the same conventions:

* :func:`step_with_jumps` draws one Bernoulli per integration step, exactly as
  the stochastic recipe is usually stated.  It is slow and used as a reference.
* :class:`PeriodicJumpSampler` propagates the unnormalized (linear) no-jump
  flow with precomputed RK4 step maps and places each jump where the survival
  probability crosses an exponential threshold.  This is the production path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .dynamics import (
    FullLambdaParams,
    LinearGenerator,
    Model,
    PropagatorConfig,
    ReducedLambdaParams,
    TwoLevelParams,
    default_dt,
    propagate,
    to_coords,
)
from .errors import ConfigurationError, DomainError
from .qstate import BlochVector

TWO_PI = 2.0 * math.pi
STEP_LIMIT = 0.1  # largest admissible jump probability per step


class JumpEvent(NamedTuple):
    t: float
    kind: int
    detected: bool
    phase: float


@dataclass(frozen=True)
class DetectionModel:
    """Per-channel detection efficiencies, one per reset target."""

    eta: tuple[float, ...]

    def __post_init__(self):
        eta = tuple(float(e) for e in np.atleast_1d(self.eta))
        if not eta or any(not (0.0 < e <= 1.0) for e in eta):
            raise DomainError(f"detection efficiencies must lie in (0, 1], got {eta}")
        object.__setattr__(self, "eta", eta)

    @classmethod
    def for_model(cls, model: Model, eta: float | Sequence[float] = 1.0) -> "DetectionModel":
        """Broadcast a scalar efficiency to all channels of ``model``."""
        n = len(model.channel_probabilities)
        eta = tuple(np.broadcast_to(np.atleast_1d(np.asarray(eta, dtype=float)), (n,)))
        return cls(eta)

    def efficiency(self, channel: int) -> float:
        return self.eta[min(channel, len(self.eta) - 1)]


class RngStream:
    """Replayable uniform stream on a Philox counter-based generator.

    ``RngStream(seed, counter)`` continues exactly where a stream with the same
    seed stood after ``counter`` draws.
    """

    def __init__(self, seed: int, counter: int = 0):
        if counter < 0:
            raise ConfigurationError("counter must be non-negative")
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._bits = np.random.Philox(key=self.seed)
        if counter:
            self._bits.random_raw(counter)
        self.counter = int(counter)

    @classmethod
    def substream(cls, master_seed: int, index: int) -> "RngStream":
        """Independent stream for trajectory ``index`` of an ensemble."""
        return cls(trajectory_seed(master_seed, index))

    def uniform(self) -> float:
        """Uniform variate on ``[0, 1)`` with 53 random bits."""
        raw = int(self._bits.random_raw())
        self.counter += 1
        return (raw >> 11) * 2.0**-53

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, counter={self.counter})"


def trajectory_seed(master_seed: int, index: int) -> int:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def _check_step(p: float, dt: float) -> None:
    if p >= STEP_LIMIT:
        raise ConfigurationError(f"jump probability {p:.3g} per step of {dt:g} exceeds {STEP_LIMIT}")


def jump_probability_two_level(state, dt: float) -> float:
    """``<e|rho|e> dt`` from the Bloch vector of a two-level atom."""
    z = float(state[2])
    p = min(max(0.5 * (1.0 + z) * dt, 0.0), 1.0)
    _check_step(p, dt)
    return p


def jump_probability_lambda(rho, params: ReducedLambdaParams, t: float, dt: float):
    """``(p_total, p1, p2)`` for the reduced Lambda system at time ``t``."""
    b = params.modulated_bright(t)
    weight = float(np.real(np.conj(b) @ np.asarray(rho) @ b))
    p = min(max(weight * dt, 0.0), 1.0)
    _check_step(p, dt)
    return p, params.gamma1 * p, params.gamma2 * p


def jump_probability_full(rho, params: FullLambdaParams, dt: float):
    """``(p_total, p1, p2)`` with ``p_j = Gamma_j <e|rho|e> dt``."""
    pe = max(float(np.real(np.asarray(rho)[2, 2])), 0.0)
    p1, p2 = params.Gamma1 * pe * dt, params.Gamma2 * pe * dt
    _check_step(p1 + p2, dt)
    return p1 + p2, p1, p2


def _split(model: Model, state, t: float, dt: float) -> tuple[float, np.ndarray]:
    if isinstance(model, TwoLevelParams):
        z = state[2] if not (isinstance(state, np.ndarray) and state.ndim == 2) else \
            float(np.real(state[1, 1] - state[0, 0]))
        return jump_probability_two_level((0.0, 0.0, z), dt), np.array([1.0])
    if isinstance(model, ReducedLambdaParams):
        p, p1, p2 = jump_probability_lambda(state, model, t, dt)
    else:
        p, p1, p2 = jump_probability_full(state, model, dt)
    return p, model.channel_probabilities


def _reset_state(model: Model, channel: int, like):
    if isinstance(model, TwoLevelParams) and not (isinstance(like, np.ndarray) and like.ndim == 2):
        return BlochVector(0.0, 0.0, -1.0)
    return model.reset_states()[channel]


def step_with_jumps(model: Model, state, t: float, dt: float, rng: RngStream,
                    det: DetectionModel):
    """Advance one step of length ``dt``, possibly jumping.

    Returns ``(new_state, event)`` where ``event`` is ``None`` unless a jump
    occurred.  A jump is dated at the end of the step.
    """
    p, branching = _split(model, state, t, dt)
    if rng.uniform() < p:
        channel = 0
        if len(branching) > 1 and rng.uniform() >= branching[0]:
            channel = 1
        detected = rng.uniform() < det.efficiency(channel)
        t_jump = t + dt
        event = JumpEvent(t_jump, channel + 1, detected, (model.omega * t_jump) % TWO_PI)
        return _reset_state(model, channel, state), event
    return propagate(model, state, t, t + dt, PropagatorConfig(dt)), None


class PeriodicJumpSampler:
    """Waiting-time sampler on a step grid commensurate with the modulation.

    ``dt = period / M``; the ``M`` RK4 step maps of the linear no-jump flow
    are rebuilt only when the plant detuning changes.
    """

    def __init__(self, model: Model, dt: float | None = None):
        period = TWO_PI / model.omega
        dt_max = default_dt(model) if dt is None else float(dt)
        self.steps_per_period = max(1, math.ceil(period / dt_max - 1e-9))
        self.dt = period / self.steps_per_period
        PropagatorConfig(self.dt).check(model)
        self.model = model
        base = LinearGenerator.for_model(model.with_delta(0.0))
        unit = LinearGenerator.for_model(model.with_delta(1.0))
        self.basis = base.basis
        self.trace_weight = base.trace_weight
        self.branching = np.asarray(model.channel_probabilities, dtype=float)
        self.reset_coords = [to_coords(r, self.basis) for r in model.reset_states()]
        n = self.basis.shape[0]
        # Step maps are degree-4 polynomials in the detuning: precompute once.
        self._coef = np.empty((self.steps_per_period, 5, n, n))
        _kernels.build_delta_polynomials(base.r0, unit.r0 - base.r0, base.r1, base.r2,
                                         model.omega, self.dt, self._coef)
        self._maps = np.empty((self.steps_per_period, n, n))
        self._period = np.eye(n)
        self.delta = None
        self.set_delta(model.delta)

    def set_delta(self, delta: float) -> None:
        """Switch the plant detuning (plant units), rebuilding the step maps."""
        delta = float(delta)
        if delta == self.delta:
            return
        _kernels.evaluate_maps(self._coef, delta, self._maps)
        self._period = _kernels.period_product(self._maps)
        self.delta = delta

    def coords(self, rho) -> np.ndarray:
        return to_coords(np.asarray(rho, dtype=complex), self.basis)

    def next_jump(self, x: np.ndarray, step_index: int, target: float, max_steps: int):
        """Steps until the next jump for exponential threshold ``target``.

        Returns ``(steps, x)`` with ``x`` the normalized pre-jump coordinates,
        or ``(-1, x)`` if no jump occurs within ``max_steps``.
        """
        steps, x = _kernels.next_jump(self._maps, self._period, np.ascontiguousarray(x, dtype=float),
                                      int(step_index) % self.steps_per_period, float(target),
                                      self.trace_weight, int(max_steps))
        return int(steps), x

    def phase(self, step_number: int) -> float:
        return TWO_PI * (step_number % self.steps_per_period) / self.steps_per_period

