"""Persistence: per-trajectory CSVs, summary CSV, plot data and a replay manifest.

Floats are written with ``repr`` so that reading a CSV back yields the exact
in-memory values.
"""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .. import __version__
from ..records import TrajectoryRecord
from .config import RunConfig
from .ensemble import EnsembleSummary, run_ensemble, summarize

MANIFEST = "manifest.json"
SUMMARY = "summary.csv"
EVENT_COLUMNS = ("t", "kind", "detected", "phase", "N", "delta", "matured")
CONTROLLER_COLUMNS = ("N", "t", "delta", "phase", "matured")
SUMMARY_COLUMNS = ("N", "mean", "std", "mean_square", "mean_time")


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_rows(path: Path, header, rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def events_name(index: int) -> str:
    return f"trajectory_{index:03d}_events.csv"


def controller_name(index: int) -> str:
    return f"trajectory_{index:03d}_controller.csv"


def write_events_csv(record: TrajectoryRecord, path) -> None:
    """One row per physical jump: ``t, kind, detected, phase, N, delta, matured``."""
    rows = zip(record.t, record.kind, record.detected, record.phase, record.counter,
               record.delta, record.matured)
    _write_rows(Path(path), EVENT_COLUMNS, rows)


def write_controller_csv(record: TrajectoryRecord, path) -> None:
    """One row per detected click: ``N, t, delta, phase, matured``."""
    sel = record.detected
    rows = zip(record.counter[sel], record.t[sel], record.delta[sel], record.phase[sel],
               record.matured[sel])
    _write_rows(Path(path), CONTROLLER_COLUMNS, rows)


def write_summary_csv(summary: EnsembleSummary, path) -> None:
    rows = zip(summary.n, summary.mean, summary.std, summary.mean_square, summary.mean_time)
    _write_rows(Path(path), SUMMARY_COLUMNS, rows)


def write_dat(path, x, y) -> None:
    """Two-column whitespace-separated data for external plotting."""
    with open(path, "w") as fh:
        for a, b in zip(x, y):
            fh.write(f"{_fmt(a)} {_fmt(b)}\n")


def write_svg(records, summary: EnsembleSummary, path) -> None:
    """Line chart of every ``Delta_N`` series and the ensemble mean."""
    import matplotlib

    matplotlib.use("Agg")
    from matplotlib import pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for r in records:
        d = r.deltas
        ax.plot(np.arange(len(d)), d, lw=0.5, alpha=0.6)
    ax.plot(summary.n, summary.mean, color="k", lw=1.5, label="ensemble mean")
    ax.set_xlabel("click N")
    ax.set_ylabel("detuning")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def export(records, summary: EnsembleSummary, cfg: RunConfig, out_dir) -> Path:
    """Write every output file; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries, written = [], []
    for r in records:
        i = int(r.meta.get("index", len(entries)))
        write_events_csv(r, out / events_name(i))
        write_controller_csv(r, out / controller_name(i))
        d = r.deltas
        write_dat(out / f"trajectory_{i:03d}_delta.dat", np.arange(len(d)), d)
        written += [events_name(i), controller_name(i)]
        entries.append({"index": i, "seed": r.seed, "model": r.model, "delta0": r.delta0,
                        "n_events": r.n_events, "n_clicks": r.n_clicks,
                        "final_time": r.final_time, "rng_draws": r.rng_draws,
                        "events": events_name(i), "controller": controller_name(i)})
    write_summary_csv(summary, out / SUMMARY)
    written.append(SUMMARY)
    write_dat(out / "delta_mean.dat", summary.n, summary.mean)
    write_dat(out / "delta_std.dat", summary.n, summary.std)
    write_dat(out / "clicks_vs_time.dat", summary.mean_time, summary.n)
    if cfg.svg:
        write_svg(records, summary, out / "delta.svg")
    manifest = {
        "package": "jumplock",
        "version": __version__,
        "master_seed": cfg.seed,
        "config": cfg.to_dict(),
        "trajectories": entries,
        "summary": {"final_mean": summary.final_mean, "final_std": summary.final_std,
                    "final_mean_square": summary.final_mean_square,
                    "window_start": summary.window_start, "length": len(summary.n)},
        "sha256": {name: _sha256(out / name) for name in written},
    }
    path = out / MANIFEST
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def read_manifest(path) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST
    try:
        return json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise OSError(f"cannot read manifest {path}: {exc}") from exc


def config_from_manifest(manifest: dict) -> RunConfig:
    return RunConfig.from_mapping(manifest["config"])


def load_records(out_dir) -> list[TrajectoryRecord]:
    """Rebuild the trajectory records from an output directory."""
    out = Path(out_dir)
    manifest = read_manifest(out)
    records = []
    for entry in manifest["trajectories"]:
        with open(out / entry["events"], newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        cols = list(zip(*rows)) if rows else [()] * len(EVENT_COLUMNS)
        records.append(TrajectoryRecord(
            seed=entry["seed"], model=entry["model"], delta0=entry["delta0"],
            t=[float(v) for v in cols[0]], kind=[int(v) for v in cols[1]],
            detected=[v == "1" for v in cols[2]], phase=[float(v) for v in cols[3]],
            counter=[int(v) for v in cols[4]], delta=[float(v) for v in cols[5]],
            matured=[v == "1" for v in cols[6]], final_time=entry["final_time"],
            rng_draws=entry["rng_draws"], meta={"index": entry["index"]}))
    return records


def summary_from_outputs(out_dir) -> EnsembleSummary:
    return summarize(load_records(out_dir))


def replay(manifest_path, out_dir) -> Path:
    """Re-run the configuration stored in a manifest into ``out_dir``."""
    cfg = config_from_manifest(read_manifest(manifest_path))
    records, summary = run_ensemble(cfg)
    return export(records, summary, cfg, out_dir)


def compare_outputs(dir_a, dir_b) -> list[str]:
    """Names of CSV files that differ (byte-wise) between two output directories."""
    a, b = Path(dir_a), Path(dir_b)
    names = sorted({p.name for p in a.glob("*.csv")} | {p.name for p in b.glob("*.csv")})
    return [n for n in names
            if not ((a / n).exists() and (b / n).exists() and (a / n).read_bytes() == (b / n).read_bytes())]
