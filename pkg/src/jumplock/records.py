"""Per-trajectory event log and controller history."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class TrajectoryRecord:
    """Everything one closed-loop trajectory produced.

    Event arrays are aligned: entry ``i`` describes the ``i``-th physical jump.
    ``counter`` and ``delta`` hold the controller state right after the event
    was processed, and ``matured`` flags the detected clicks that updated the
    detuning.  Times are in controller units.
    """

    seed: int
    model: str
    delta0: float
    t: np.ndarray
    kind: np.ndarray
    detected: np.ndarray
    phase: np.ndarray
    matured: np.ndarray
    counter: np.ndarray
    delta: np.ndarray
    final_time: float
    wall_time: float = 0.0
    rng_draws: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.kind = np.asarray(self.kind, dtype=np.int64)
        self.detected = np.asarray(self.detected, dtype=bool)
        self.phase = np.asarray(self.phase, dtype=float)
        self.matured = np.asarray(self.matured, dtype=bool)
        self.counter = np.asarray(self.counter, dtype=np.int64)
        self.delta = np.asarray(self.delta, dtype=float)

    @property
    def n_events(self) -> int:
        return len(self.t)

    @property
    def n_clicks(self) -> int:
        """Number of matured detected clicks, i.e. detuning updates."""
        return int(self.counter[-1]) if len(self.counter) else 0

    @property
    def deltas(self) -> np.ndarray:
        """``Delta_0, Delta_1, ..., Delta_N`` indexed by the click counter."""
        return np.concatenate([[self.delta0], self.delta[self.matured]])

    @property
    def click_times(self) -> np.ndarray:
        """Times of the matured clicks (``t_1, ..., t_N``)."""
        return self.t[self.matured]

    def history(self) -> np.ndarray:
        """Controller table ``(N, t, Delta_N, phase, matured)`` over detected clicks."""
        sel = self.detected
        return np.column_stack([self.counter[sel], self.t[sel], self.delta[sel],
                                self.phase[sel], self.matured[sel]])
