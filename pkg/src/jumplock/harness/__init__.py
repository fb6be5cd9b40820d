"""Ensemble orchestration, persistence and the command line."""
from .config import RunConfig, read_preset
from .ensemble import EnsembleSummary, check_invariants, fit_decay_rate, run_ensemble, run_trajectory, summarize
from .export import compare_outputs, export, load_records, replay

__all__ = [
    "RunConfig", "read_preset", "EnsembleSummary", "check_invariants", "fit_decay_rate",
    "run_ensemble", "run_trajectory", "summarize", "compare_outputs", "export", "load_records", "replay",
]
