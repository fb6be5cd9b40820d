"""Ensemble runs, summary statistics and run-level invariant checks."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import TrajectoryError
from ..feedback import run_closed_loop
from ..jumps import RngStream, trajectory_seed
from ..oracles.checks import CheckResult
from ..records import TrajectoryRecord
from .config import RunConfig

FINAL_FRACTION = 0.2


def run_trajectory(cfg: RunConfig, index: int) -> TrajectoryRecord:
    """Trajectory ``index`` of the ensemble described by ``cfg``."""
    seed = trajectory_seed(cfg.seed, index)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            fb = cfg.feedback_config()
        record = run_closed_loop(cfg.build_model(), fb, cfg.detection(), RngStream(seed),
                                 delta0=cfg.delta0, max_clicks=cfg.clicks, max_time=cfg.time,
                                 rho0=cfg.initial_state(), dt=cfg.dt, engine=cfg.engine)
    except Exception as exc:  # report which trajectory broke
        raise TrajectoryError(str(exc), seed, index) from exc
    record.meta["index"] = index
    return record


def _run_indexed(args):
    return run_trajectory(*args)


def run_ensemble(cfg: RunConfig, workers: int | None = None):
    """Run ``cfg.ensemble`` trajectories; returns ``(records, summary)``.

    Trajectory ``i`` always uses the substream ``i`` of the master seed, so
    results do not depend on the number of workers.
    """
    workers = cfg.workers if workers is None else workers
    jobs = [(cfg, i) for i in range(cfg.ensemble)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_indexed, jobs))
    else:
        records = [_run_indexed(job) for job in jobs]
    return records, summarize(records)


@dataclass(frozen=True)
class EnsembleSummary:
    """Cross-trajectory statistics of ``Delta_N``, truncated to the shortest record.

    ``std`` is the sample standard deviation across trajectories (zero for a
    single trajectory).  The final-window values pool every ``Delta_N`` of
    every trajectory over the last ``FINAL_FRACTION`` of click indices.
    """

    n: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    mean_square: np.ndarray
    mean_time: np.ndarray
    window_start: int
    final_mean: float
    final_std: float
    final_mean_square: float
    n_trajectories: int

    def window(self) -> slice:
        return slice(self.window_start, len(self.n))


def summarize(records, final_fraction: float = FINAL_FRACTION) -> EnsembleSummary:
    if not records:
        raise ValueError("summarize needs at least one trajectory record")
    series = [r.deltas for r in records]
    length = min(len(s) for s in series)
    deltas = np.array([s[:length] for s in series])
    times = np.array([np.concatenate([[0.0], r.click_times])[:length] for r in records])
    k = len(records)
    std = deltas.std(axis=0, ddof=1) if k > 1 else np.zeros(length)
    start = min(length - 1, int(math.floor((1 - final_fraction) * (length - 1))) + 1) if length > 1 else 0
    window = deltas[:, start:].ravel()
    return EnsembleSummary(
        n=np.arange(length),
        mean=deltas.mean(axis=0),
        std=std,
        mean_square=(deltas**2).mean(axis=0),
        mean_time=times.mean(axis=0),
        window_start=start,
        final_mean=float(window.mean()),
        final_std=float(window.std(ddof=1)) if window.size > 1 else 0.0,
        final_mean_square=float((window**2).mean()),
        n_trajectories=k,
    )


def fit_decay_rate(series, start: int = 0, stop: int | None = None) -> float:
    """Per-step rate ``r`` of a geometric decay ``A (1 - r)^N`` by log-linear least squares."""
    y = np.asarray(series, dtype=float)[start:stop]
    n = np.arange(start, start + len(y))
    keep = y > 0
    if keep.sum() < 2:
        raise ValueError("need at least two positive values to fit a decay rate")
    slope = np.polyfit(n[keep], np.log(y[keep]), 1)[0]
    return float(1 - math.exp(slope))


def check_invariants(records, cfg: RunConfig) -> list[CheckResult]:
    """Run-level invariants; the CLI exits non-zero if any fails."""
    c = cfg.c_bound
    factor = 1.0 if cfg.model == "two-level" else abs(math.sin(2 * math.atan2(cfg.omega2, cfg.omega1)))
    step_limit = cfg.gain * factor * (1 + 1e-12) + 1e-15
    worst_abs, worst_step = 0.0, 0.0
    times_ok = counters_ok = stop_ok = True
    for r in records:
        d = r.deltas
        worst_abs = max(worst_abs, float(np.abs(d).max()))
        jumps = np.abs(np.diff(d))
        unclipped = np.abs(d[1:]) != c
        if unclipped.any():
            worst_step = max(worst_step, float(jumps[unclipped].max()))
        times_ok &= bool(np.all(np.diff(r.t) > 0))
        counters_ok &= bool(np.all(np.diff(r.counter) >= 0))
        if cfg.clicks is not None and cfg.time is None:
            stop_ok &= r.n_clicks == cfg.clicks
    return [
        CheckResult("clip_bound", worst_abs, c, 0.0, worst_abs <= c),
        CheckResult("update_step", worst_step, step_limit, 0.0, worst_step <= step_limit),
        CheckResult("event_times_increasing", float(times_ok), 1.0, 0.0, times_ok),
        CheckResult("counter_nondecreasing", float(counters_ok), 1.0, 0.0, counters_ok),
        CheckResult("stop_condition", float(stop_ok), 1.0, 0.0, stop_ok),
    ]
