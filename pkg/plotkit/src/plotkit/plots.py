"""Static figures from experiment CSVs: learning curves with seed-averaged
error bands, per-unit activation heatmap grids, and unit-budget charts."""

import math
import warnings

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from dataclasses import dataclass, field  # noqa: E402

from .io import SchemaError, read_heatmap, read_runs, read_units_summary

FIGSIZE_CURVE = (7.0, 4.5)
TILE_SIZE = 1.6


@dataclass
class CurveSpec:
    series: list = field(default_factory=list)  # (label, runs-csv path)
    window: int = 1                             # moving-average width
    metric: str = "steps"                       # steps | return


def aggregate_curve(runs, metric="steps", window=1):
    """Seed-mean and standard error per episode, then moving-averaged.

    window=1 reproduces the raw per-episode means exactly.
    """
    if metric not in ("steps", "return"):
        raise SchemaError(f"unknown metric column '{metric}'")
    episodes = np.unique(runs["episode"])
    means, errs = [], []
    for ep in episodes:
        vals = runs[metric][runs["episode"] == ep].astype(float)
        means.append(vals.mean())
        errs.append(vals.std(ddof=1) / math.sqrt(len(vals))
                    if len(vals) > 1 else 0.0)
    means, errs = np.array(means), np.array(errs)
    if window > 1:
        kernel = np.ones(window) / window
        pads = (window // 2, window - 1 - window // 2)

        def smooth(a):
            return np.convolve(np.pad(a, pads, mode="edge"), kernel,
                               mode="valid")
        means, errs = smooth(means), smooth(errs)
    return episodes, means, errs


def plot_curves(spec, out_path):
    """One chart: x=episode, y=seed-mean metric with a stderr band per label."""
    fig, ax = plt.subplots(figsize=FIGSIZE_CURVE)
    for label, path in spec.series:
        runs = read_runs(path)
        ep, mean, err = aggregate_curve(runs, spec.metric, spec.window)
        ax.plot(ep, mean, label=label)
        ax.fill_between(ep, mean - err, mean + err, alpha=0.25)
    ax.set_xlabel("episode")
    ax.set_ylabel(spec.metric)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def plot_heatmaps(heatmap_csv, unit_ids, out_path):
    """Grid of 11x11 activation tiles, one per requested unit, with a shared
    [0, 1] color scale. Tile axes: x = position index, y = velocity index."""
    units, values = read_heatmap(heatmap_csv)
    lookup = {int(u): i for i, u in enumerate(units)}
    missing = [u for u in unit_ids if u not in lookup]
    if missing:
        raise SchemaError(f"unknown unit ids {missing}; available "
                          f"{sorted(lookup)}")
    side = int(round(math.sqrt(values.shape[1])))
    if side * side != values.shape[1]:
        raise SchemaError(f"{heatmap_csv}: {values.shape[1]} states do not "
                          "form a square probe lattice")
    ncols = math.ceil(math.sqrt(len(unit_ids)))
    nrows = math.ceil(len(unit_ids) / ncols)
    fig, axes = plt.subplots(nrows, ncols,
                             figsize=(TILE_SIZE * ncols, TILE_SIZE * nrows),
                             squeeze=False)
    for k, u in enumerate(unit_ids):
        ax = axes[k // ncols][k % ncols]
        # probe state index is x*side + y, so row-major reshape puts the
        # position axis first; transpose to plot position along x
        tile = values[lookup[u]].reshape(side, side).T
        ax.imshow(tile, origin="lower", vmin=0.0, vmax=1.0, cmap="viridis")
        ax.set_title(f"unit {u}", fontsize=7)
        ax.set_xticks([])
        ax.set_yticks([])
    for k in range(len(unit_ids), nrows * ncols):
        axes[k // ncols][k % ncols].axis("off")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def plot_units_sweep(summary_csv, out_path):
    """x = total unit budget, y = mean steps per episode, one line per method."""
    rows = read_units_summary(summary_csv)
    if any(r[3] is None for r in rows):
        warnings.warn(f"{summary_csv}: no stderr column, plotting without bands")
    fig, ax = plt.subplots(figsize=FIGSIZE_CURVE)
    for method in sorted({r[0] for r in rows}):
        pts = sorted((r[1], r[2], r[3]) for r in rows if r[0] == method)
        x = np.array([p[0] for p in pts])
        y = np.array([p[1] for p in pts])
        ax.plot(x, y, marker="o", label=method)
        if all(p[2] is not None for p in pts):
            e = np.array([p[2] for p in pts])
            ax.fill_between(x, y - e, y + e, alpha=0.25)
    ax.set_xlabel("total units")
    ax.set_ylabel("mean steps per episode")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path
