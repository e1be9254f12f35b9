"""CLI: plotkit curves|heatmaps|units --in ... --out ..."""

import argparse
import sys

from .io import SchemaError
from .plots import CurveSpec, plot_curves, plot_heatmaps, plot_units_sweep


def main(argv=None):
    parser = argparse.ArgumentParser(prog="plotkit")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_curves = sub.add_parser("curves", help="learning curves with seed bands")
    p_curves.add_argument("--in", dest="inputs", nargs="+", required=True,
                          metavar="LABEL=RUNS_CSV")
    p_curves.add_argument("--metric", choices=["steps", "return"],
                          default="steps")
    p_curves.add_argument("--window", type=int, default=1)
    p_curves.add_argument("--out", required=True)

    p_heat = sub.add_parser("heatmaps", help="per-unit activation tiles")
    p_heat.add_argument("--in", dest="input", required=True)
    p_heat.add_argument("--units", required=True,
                        help="comma-separated unit ids")
    p_heat.add_argument("--out", required=True)

    p_units = sub.add_parser("units", help="unit-budget sweep chart")
    p_units.add_argument("--in", dest="input", required=True)
    p_units.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    try:
        if args.cmd == "curves":
            series = []
            for item in args.inputs:
                if "=" not in item:
                    raise SchemaError(f"expected LABEL=PATH, got '{item}'")
                label, path = item.split("=", 1)
                series.append((label, path))
            spec = CurveSpec(series=series, window=args.window,
                             metric=args.metric)
            print(plot_curves(spec, args.out))
        elif args.cmd == "heatmaps":
            ids = [int(u) for u in args.units.split(",")]
            print(plot_heatmaps(args.input, ids, args.out))
        elif args.cmd == "units":
            print(plot_units_sweep(args.input, args.out))
    except (SchemaError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
