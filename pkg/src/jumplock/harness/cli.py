"""Command line entry point: ``jumplock <subcommand> [options]``."""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from ..errors import JumplockError
from ..oracles import report
from .config import RunConfig, read_preset
from .ensemble import check_invariants, run_ensemble
from .export import compare_outputs, export, read_manifest, replay

DEFAULT_PRESETS = {"two-level": "fig2", "lambda-full": "fig4", "lambda-reduced": "fig4_reduced"}


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", help="preset name (fig2, fig4) or path to a preset file")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--ensemble", type=int, help="number of trajectories")
    parser.add_argument("--clicks", type=int, help="matured detected clicks per trajectory")
    parser.add_argument("--time", type=float, help="time horizon per trajectory")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--eta", help="detection efficiency (comma-separated per channel)")
    parser.add_argument("--delta0", type=float, help="initial detuning")
    parser.add_argument("--dead-time", type=float, dest="dead_time")
    parser.add_argument("--clip-mode", choices=("paper", "symmetric"), dest="clip_mode")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--svg", action="store_true", default=None, help="also write an SVG plot")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any preset key (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jumplock", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("two-level", "lambda-reduced", "lambda-full"):
        _common(sub.add_parser(name, help=f"run a {name} ensemble"))
    oracle = sub.add_parser("oracle", help="run the oracle verification suite")
    oracle.add_argument("--clicks", type=int, default=100_000,
                        help="matured clicks for the phase-density checks")
    oracle.add_argument("--no-simulation", action="store_true",
                        help="skip the Monte-Carlo checks")
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--out", type=Path, help="directory for oracle_report.json/.txt")
    rep = sub.add_parser("replay", help="re-run a manifest and compare the CSV outputs")
    rep.add_argument("manifest", type=Path)
    rep.add_argument("--out", type=Path, help="output directory (default: <manifest dir>/replay)")
    return parser


def _parse_sets(items) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise JumplockError(f"--set expects KEY=VALUE, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def config_from_args(args) -> RunConfig:
    preset = args.preset or DEFAULT_PRESETS[args.command]
    values = read_preset(preset)
    values["model"] = args.command
    values.update(_parse_sets(args.set))
    for key in ("seed", "ensemble", "clicks", "time", "eta", "delta0", "dead_time", "clip_mode",
                "workers", "svg"):
        value = getattr(args, key)
        if value is not None:
            values[key] = value
    if args.time is not None and args.clicks is None:
        values["clicks"] = None
    return RunConfig.from_mapping(values)


def _run(args) -> int:
    cfg = config_from_args(args)
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        cfg.feedback_config()
    records, summary = run_ensemble(cfg)
    out = args.out or Path("runs") / args.command
    manifest = export(records, summary, cfg, out)
    print(f"{cfg.model}: {len(records)} trajectories, {len(summary.n) - 1} common clicks")
    print(f"final window from click {summary.window_start}: mean={summary.final_mean:.4g} "
          f"std={summary.final_std:.4g} E[Delta^2]={summary.final_mean_square:.4g}")
    checks = check_invariants(records, cfg)
    for c in checks:
        print(c.line())
    print(f"manifest: {manifest}")
    return 0 if all(c.passed for c in checks) else 1


def _oracle(args) -> int:
    results = report.run_suite(simulate=not args.no_simulation, n_clicks=args.clicks, seed=args.seed)
    text = report.to_text(results)
    print(text)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "oracle_report.json").write_text(report.to_json(results) + "\n")
        (args.out / "oracle_report.txt").write_text(text + "\n")
    return 0 if all(r.passed for r in results) else 1


def _replay(args) -> int:
    source = args.manifest.parent if args.manifest.is_file() else args.manifest
    read_manifest(args.manifest)
    out = args.out or source / "replay"
    replay(args.manifest, out)
    diff = compare_outputs(source, out)
    if diff:
        print("replay differs in: " + ", ".join(diff))
        return 1
    print(f"replay identical: {out}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "oracle":
            return _oracle(args)
        if args.command == "replay":
            return _replay(args)
        return _run(args)
    except (JumplockError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
