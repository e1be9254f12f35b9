"""Experiment runner: multi-seed runs, hyperparameter sweeps, the
hidden-unit budget sweep, and checkpoint analysis.

CSV schemas (comma separated, '.' decimal):
  runs.csv          seed,episode,steps,return,epsilon
  summary.csv       config_id,param_values,mean_final_steps,stderr
  units_summary.csv method,units,mean_steps,stderr
  heatmap.csv       unit,s0,...,s120
  interference.csv  i,j,dot  (7260 pair rows, then a -1,-1,<mean> summary row)
"""

import itertools
import os
from multiprocessing import get_context

import numpy as np
from dataclasses import dataclass, field

from . import analysis, checkpoint, config as config_mod
from .envs import make_env
from .errors import ConfigError, NumericalError

FINAL_WINDOW = 100


@dataclass
class MetricsLog:
    rows: list = field(default_factory=list)  # (seed, episode, steps, ret, eps)
    failed_seeds: list = field(default_factory=list)

    def seed_rows(self, seed):
        return [r for r in self.rows if r[0] == seed]

    def final_window_mean(self, seed=None, window=FINAL_WINDOW):
        """Mean episode length over the last `window` episodes (per seed, or
        averaged over seeds)."""
        if seed is not None:
            steps = [r[2] for r in self.seed_rows(seed)[-window:]]
            return float(np.mean(steps)) if steps else float("nan")
        per_seed = [self.final_window_mean(s) for s in self.seeds()]
        return float(np.mean(per_seed)) if per_seed else float("nan")

    def overall_mean_steps(self):
        return float(np.mean([r[2] for r in self.rows])) if self.rows else float("nan")

    def seeds(self):
        return sorted({r[0] for r in self.rows})


def _fmt(x):
    return repr(float(x)) if isinstance(x, float) else str(x)


def write_runs_csv(path, log):
    with open(path, "w") as f:
        f.write("seed,episode,steps,return,epsilon\n")
        for seed, ep, steps, ret, eps in sorted(log.rows):
            f.write(f"{seed},{ep},{steps},{_fmt(ret)},{_fmt(eps)}\n")


def read_runs_csv(path):
    log = MetricsLog()
    with open(path) as f:
        header = f.readline().strip()
        if header != "seed,episode,steps,return,epsilon":
            raise ConfigError(f"{path}: unexpected runs header '{header}'")
        for line in f:
            seed, ep, steps, ret, eps = line.strip().split(",")
            log.rows.append((int(seed), int(ep), int(steps),
                             float(ret), float(eps)))
    return log


def _run_seed(args):
    cfg, seed, out_dir = args
    env, agent, rngs = config_mod.build_agent(cfg, seed)
    rows = []
    try:
        for ep in range(cfg.episodes):
            steps, ret = agent.run_episode(env, rngs)
            rows.append((seed, ep, steps, ret, agent.policy.eps))
    except NumericalError as e:
        return seed, rows, str(e)
    if out_dir is not None:
        checkpoint.save(os.path.join(out_dir, f"checkpoint_seed{seed}.bin"),
                        agent)
    return seed, rows, None


def run(cfg, out_dir=None, workers=None):
    """Run every seed of a config; write runs.csv and per-seed checkpoints
    when out_dir is given. A numerical blow-up in one seed is recorded and
    does not stop the others."""
    cfg.validate()
    if out_dir is None and cfg.out:
        out_dir = cfg.out
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    workers = workers or cfg.workers or 1
    jobs = [(cfg, seed, out_dir) for seed in cfg.seeds]
    if workers > 1 and len(jobs) > 1:
        with get_context("spawn").Pool(workers) as pool:
            results = pool.map(_run_seed, jobs)
    else:
        results = [_run_seed(j) for j in jobs]
    log = MetricsLog()
    for seed, rows, err in results:
        log.rows.extend(rows)
        if err is not None:
            log.failed_seeds.append((seed, err))
    log.rows.sort()
    if out_dir:
        write_runs_csv(os.path.join(out_dir, "runs.csv"), log)
        if log.failed_seeds:
            with open(os.path.join(out_dir, "failed.txt"), "w") as f:
                for seed, err in log.failed_seeds:
                    f.write(f"{seed}: {err}\n")
    return log


def sweep_cells(cfg):
    """Expand sweep axes into (config_id, param_string, concrete config)."""
    axes = sorted(cfg.sweep_axes.items())
    if not axes:
        return [("c000", "", cfg)]
    names = [k for k, _ in axes]
    grids = [v for _, v in axes]
    count = int(np.prod([len(g) for g in grids]))
    if count > cfg.sweep_cap:
        raise ConfigError(f"sweep would expand to {count} cells "
                          f"(cap {cfg.sweep_cap})")
    cells = []
    for i, combo in enumerate(itertools.product(*grids)):
        cell = cfg
        for key, value in zip(names, combo):
            cell = config_mod.apply_override(cell, key, value)
        label = ";".join(f"{k}={v}" for k, v in zip(names, combo))
        cells.append((f"c{i:03d}", label, cell))
    return cells


def sweep(cfg, out_dir=None, workers=None):
    """Run the Cartesian product of all sweep axes; rank cells by mean
    episode length over the final window and write summary.csv."""
    out_dir = out_dir or cfg.out
    os.makedirs(out_dir, exist_ok=True)
    results = []
    for cid, label, cell in sweep_cells(cfg):
        cell_dir = os.path.join(out_dir, cid)
        log = run(cell, out_dir=cell_dir, workers=workers)
        results.append((cid, label, log))
    ranked = sorted(results, key=lambda r: r[2].final_window_mean())
    with open(os.path.join(out_dir, "summary.csv"), "w") as f:
        f.write("config_id,param_values,mean_final_steps,stderr\n")
        for cid, label, log in ranked:
            per_seed = [log.final_window_mean(s) for s in log.seeds()]
            mean = float(np.mean(per_seed)) if per_seed else float("nan")
            err = (float(np.std(per_seed, ddof=1) / np.sqrt(len(per_seed)))
                   if len(per_seed) > 1 else 0.0)
            f.write(f"{cid},{label},{_fmt(mean)},{_fmt(err)}\n")
    return results


def units_sweep(cfg, unit_counts, out_dir=None, workers=None):
    """Run the base config at several total-unit budgets and report the mean
    episode length over the whole training budget for each."""
    out_dir = out_dir or cfg.out
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for count in sorted(unit_counts):
        cell = config_mod.apply_override(cfg, "network.total_units", count)
        log = run(cell, out_dir=os.path.join(out_dir, f"units{count}"),
                  workers=workers)
        per_seed = [float(np.mean([r[2] for r in log.seed_rows(s)]))
                    for s in log.seeds()]
        mean = float(np.mean(per_seed)) if per_seed else float("nan")
        err = (float(np.std(per_seed, ddof=1) / np.sqrt(len(per_seed)))
               if len(per_seed) > 1 else 0.0)
        rows.append((cfg.agent.variant, count, mean, err))
    with open(os.path.join(out_dir, "units_summary.csv"), "w") as f:
        f.write("method,units,mean_steps,stderr\n")
        for method, count, mean, err in rows:
            f.write(f"{method},{count},{_fmt(mean)},{_fmt(err)}\n")
    return rows


def analyze(checkpoint_path, out_dir, normalize=True, loss="greedy",
            env_id="mountain_car"):
    """Write heatmap.csv and interference.csv for a saved checkpoint."""
    snap = checkpoint.load(checkpoint_path)
    env = make_env(env_id)
    os.makedirs(out_dir, exist_ok=True)
    heat = analysis.activation_heatmap(snap, env)
    heat_path = os.path.join(out_dir, "heatmap.csv")
    with open(heat_path, "w") as f:
        f.write("unit," + ",".join(f"s{i}" for i in range(heat.shape[1])) + "\n")
        for u in range(heat.shape[0]):
            f.write(str(u) + "," + ",".join(_fmt(v) for v in heat[u]) + "\n")
    report = analysis.interference(snap, env, normalize=normalize, loss=loss)
    inter_path = os.path.join(out_dir, "interference.csv")
    with open(inter_path, "w") as f:
        f.write("i,j,dot\n")
        for i, j, dot in report.pairs:
            f.write(f"{int(i)},{int(j)},{_fmt(dot)}\n")
        f.write(f"-1,-1,{_fmt(report.mean_pairwise)}\n")
    return heat_path, inter_path
