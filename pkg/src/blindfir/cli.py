"""Command-line entry point: ``blindfir <preset|custom|plot> [options]``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .config import PRESETS, ConfigError, format_manifest, load_config, override, preset
from .evaluation import run_experiment, write_results_csv, write_trials_csv

OUT_ENV = "BLINDFIR_OUT"
DEFAULT_OUT = "results"

logger = logging.getLogger("blindfir")


def _snr_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _seed(text: str) -> int:
    n = int(text)
    if not 0 <= n < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must fit in an unsigned 64-bit integer, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blindfir",
        description="Blind multichannel FIR identification: SS vs SSS Monte Carlo experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value config file")
    common.add_argument("--out", type=Path,
                        help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument("--seed", type=_seed, help="master seed override")
    common.add_argument("--plot", action="store_true", help="also write an MSE plot")
    common.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1,
                        help="worker processes (default: all cores)")
    common.add_argument("--snr-grid", type=_snr_list, help="comma-separated SNR values in dB")
    common.add_argument("--trials", type=_positive_int, help="Monte Carlo runs per cell")
    common.add_argument("--dump-trials", action="store_true",
                        help="also write per-trial records to trials.csv")
    common.add_argument("-v", "--verbose", action="store_true")

    for name in PRESETS:
        sub.add_parser(name, parents=[common], help=f"run the {name} preset")
    sub.add_parser("custom", parents=[common], help="run the experiment described by --config")

    p = sub.add_parser("plot", help="plot an existing results CSV")
    p.add_argument("csv", type=Path)
    p.add_argument("--output", type=Path, help="image path (default: CSV path with .png)")
    return parser


def run(args: argparse.Namespace) -> int:
    if args.command == "plot":
        from .plotting import plot_results_csv
        try:
            path = plot_results_csv(args.csv, args.output)
        except (OSError, ValueError, KeyError) as exc:
            print(f"blindfir: cannot plot {args.csv}: {exc}", file=sys.stderr)
            return 1
        print(path)
        return 0

    try:
        if args.command == "custom":
            if args.config is None:
                print("blindfir: custom requires --config", file=sys.stderr)
                return 2
            cfg = load_config(args.config)
        elif args.config is not None:
            print("blindfir: --config is only accepted by 'custom'", file=sys.stderr)
            return 2
        else:
            cfg = preset(args.command)
        cfg = override(cfg, seed=args.seed, snr_grid=args.snr_grid, trials=args.trials)
    except ConfigError as exc:
        print(f"blindfir: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"blindfir: invalid configuration: {exc}", file=sys.stderr)
        return 2

    out = args.out or Path(os.environ.get(OUT_ENV) or DEFAULT_OUT)
    try:
        out.mkdir(parents=True, exist_ok=True)
        result = run_experiment(cfg, jobs=args.jobs)
        csv_path = out / "results.csv"
        write_results_csv(result, csv_path)
        if args.dump_trials:
            write_trials_csv(result, out / "trials.csv")
        (out / "manifest.txt").write_text(format_manifest(cfg))
        if args.plot:
            from .plotting import plot_results_csv
            plot_results_csv(csv_path, out / f"{cfg.name}.png", title=cfg.name)
    except OSError as exc:
        print(f"blindfir: I/O error: {exc}", file=sys.stderr)
        return 1
    failures = sum(c.n_failures for c in result.cells)
    print(f"{cfg.name}: {len(result.cells)} cells, {failures} failed trials -> {csv_path}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
