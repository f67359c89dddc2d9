"""Command-line entry point: ``linkhyst {validate,print-config,run,sweep,plot}``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import format_config, load_config
from .experiment import read_csv, run_once, sweep, to_csv, write_csv, write_plot_data
from .mobility import ConfigError
from .routing import Algorithm

log = logging.getLogger("linkhyst")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="experiment config file (INI grammar)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="linkhyst", description="Link-quality hysteresis experiments")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check a config file")
    sub.add_parser("print-config", parents=[common], help="print the effective configuration")

    run = sub.add_parser("run", parents=[common], help="run one (speed, algorithm, seed) cell")
    run.add_argument("--algo", choices=[a.value for a in Algorithm])
    run.add_argument("--speed", type=float, metavar="KMH")
    run.add_argument("--seed", type=int, default=1)
    run.add_argument("--out", metavar="PATH", help="CSV output (default: stdout)")
    run.add_argument("--trace", metavar="PATH", help="per-event debug trace")

    sw = sub.add_parser("sweep", parents=[common], help="run the full speed x algorithm x seed grid")
    sw.add_argument("--out", metavar="PATH", help="CSV output (default: [output] path)")
    sw.add_argument("--plot-data", metavar="PATH", help="also write per-algorithm plot series")
    sw.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    sw.add_argument("--jobs", type=int, help="parallel worker processes")
    sw.add_argument("--speed", type=float, action="append", metavar="KMH", help="restrict to this speed (repeatable)")
    sw.add_argument("--seed", type=int, action="append", help="restrict to this seed (repeatable)")
    sw.add_argument("--algo", choices=[a.value for a in Algorithm], action="append")

    pl = sub.add_parser("plot", help="render figures from an existing results CSV")
    pl.add_argument("csv", metavar="CSV")
    pl.add_argument("--plot-data", metavar="PATH")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "plot":
        from .plotting import render_figures

        with open(args.csv, encoding="utf-8") as fh:
            rows = read_csv(fh)
        for path in render_figures(rows, args.csv):
            print(path)
        if args.plot_data:
            with open(args.plot_data, "w", encoding="utf-8") as fh:
                write_plot_data(rows, fh)
        return 0

    cfg = load_config(args.config)
    if args.command == "validate":
        print("ok")
        return 0
    if args.command == "print-config":
        sys.stdout.write(format_config(cfg))
        return 0

    if args.command == "run":
        speed = cfg.scenario.speed if args.speed is None else args.speed
        algo = cfg.algorithm if args.algo is None else Algorithm(args.algo)
        result = run_once(cfg, speed, algo, args.seed, trace_path=args.trace)
        text = to_csv([result], cfg.output.overhead_unit)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0

    from dataclasses import replace

    sw = cfg.sweep
    if args.speed:
        sw = replace(sw, speeds_kmh=tuple(args.speed))
    if args.seed:
        sw = replace(sw, seeds=tuple(args.seed))
    if args.algo:
        sw = replace(sw, algorithms=tuple(Algorithm(a) for a in args.algo))
    cfg = replace(cfg, sweep=sw).validate()
    results = sweep(cfg, jobs=args.jobs)
    out = args.out or cfg.output.path
    with open(out, "w", encoding="utf-8") as fh:
        write_csv(results, fh, cfg.output.overhead_unit)
    log.info("wrote %d runs to %s", len(results), out)
    with open(out, encoding="utf-8") as fh:
        rows = read_csv(fh)
    if args.plot_data:
        with open(args.plot_data, "w", encoding="utf-8") as fh:
            write_plot_data(rows, fh)
    if cfg.output.figures and not args.no_figures:
        from .plotting import render_figures

        render_figures(rows, out, cfg.output.overhead_unit)
    return 0


if __name__ == "__main__":
    sys.exit(main())
