"""Command line entry point.

    dsomrl train <config> [--seeds 0,1,2] [--episodes N] [--workers W] [--out DIR]
    dsomrl sweep <config> [...]
    dsomrl units-sweep <config> --counts 8,32,72 [...]
    dsomrl analyze <checkpoint> --out DIR [--raw-dots] [--loss greedy|sum]
"""

import argparse
import sys

from . import config as config_mod, harness
from .errors import ConfigError, InputError


def _add_run_flags(p):
    p.add_argument("config")
    p.add_argument("--seeds", help="comma-separated seed list override")
    p.add_argument("--episodes", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")


def _load_config(args):
    cfg = config_mod.parse_config_file(args.config)
    if args.seeds:
        cfg.seeds = [int(s) for s in args.seeds.split(",")]
    if args.episodes is not None:
        cfg.episodes = args.episodes
    if args.workers is not None:
        cfg.workers = args.workers
    if args.out:
        cfg.out = args.out
    return cfg.validate()


def main(argv=None):
    parser = argparse.ArgumentParser(prog="dsomrl")
    sub = parser.add_subparsers(dest="cmd", required=True)

    _add_run_flags(sub.add_parser("train", help="run one config over its seeds"))
    _add_run_flags(sub.add_parser("sweep", help="run the Cartesian sweep"))
    p_units = sub.add_parser("units-sweep", help="sweep total unit budgets")
    _add_run_flags(p_units)
    p_units.add_argument("--counts", required=True,
                         help="comma-separated total-unit budgets")
    p_an = sub.add_parser("analyze", help="heatmap + interference from a checkpoint")
    p_an.add_argument("checkpoint")
    p_an.add_argument("--out", required=True)
    p_an.add_argument("--raw-dots", action="store_true",
                      help="skip unit-norm gradient scaling")
    p_an.add_argument("--loss", choices=["greedy", "sum"], default="greedy")

    args = parser.parse_args(argv)
    try:
        if args.cmd == "train":
            cfg = _load_config(args)
            log = harness.run(cfg)
            print(f"ran {len(cfg.seeds)} seeds x {cfg.episodes} episodes; "
                  f"final-window mean steps {log.final_window_mean():.1f}")
            if log.failed_seeds:
                print(f"warning: {len(log.failed_seeds)} seed(s) failed "
                      f"numerically", file=sys.stderr)
        elif args.cmd == "sweep":
            cfg = _load_config(args)
            results = harness.sweep(cfg)
            print(f"swept {len(results)} configurations -> {cfg.out}/summary.csv")
        elif args.cmd == "units-sweep":
            cfg = _load_config(args)
            counts = [int(c) for c in args.counts.split(",")]
            rows = harness.units_sweep(cfg, counts)
            print(f"swept {len(rows)} unit budgets -> {cfg.out}/units_summary.csv")
        elif args.cmd == "analyze":
            heat, inter = harness.analyze(args.checkpoint, args.out,
                                          normalize=not args.raw_dots,
                                          loss=args.loss)
            print(f"wrote {heat} and {inter}")
    except (ConfigError, InputError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
