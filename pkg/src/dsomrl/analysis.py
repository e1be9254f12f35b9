"""Representation and interference diagnostics on a fixed probe grid.

The probe is an 11 x 11 lattice over the raw Mountain Car state space.
Diagnostics: per-unit activation heatmaps (how much of the state space each
hidden unit responds to) and the mean pairwise dot product of per-state
parameter gradients (how much an update at one state drags on another).
"""

import numpy as np
from dataclasses import dataclass

from .errors import ConfigError
from .nncore import backward, forward

N_PROBE = 121
N_PAIRS = N_PROBE * (N_PROBE - 1) // 2  # 7260


def probe_grid():
    """Raw states (-1.2 + 0.17x, -0.07 + 0.014y) for x, y in 0..10."""
    states = [(-1.2 + 0.17 * x, -0.07 + 0.014 * y)
              for x in range(11) for y in range(11)]
    return np.array(states)


@dataclass
class InterferenceReport:
    mean_pairwise: float
    pairs: np.ndarray       # [7260, 3] columns (i, j, dot)
    normalized: bool
    zero_grad_states: list  # probe indices with an all-zero gradient


def _probe_forward(agent, env, raw_state):
    v = env.normalize(np.asarray(raw_state))
    m = agent.state_mask(v)
    return forward(agent.params, v, m)


def activation_heatmap(agent, env, grid=None):
    """[H x 121] matrix of hidden activations over the probe, each unit's row
    scaled by its own max (all-zero rows stay zero). Masked agents report the
    masked activations, i.e. what the output layer actually sees."""
    if grid is None:
        grid = probe_grid()
    rows = []
    for raw in grid:
        _, trace = _probe_forward(agent, env, raw)
        rows.append(trace.masked_hidden if agent.map is not None
                    else trace.hidden)
    acts = np.array(rows).T  # [H, n_states]
    peak = acts.max(axis=1, keepdims=True)
    scale = np.where(peak > 0.0, peak, 1.0)
    return acts / scale


def activation_support(heatmap, threshold=0.1):
    """Mean fraction of probe states per unit with activation above threshold."""
    return float((heatmap > threshold).mean())


def state_gradients(agent, env, grid=None, loss="greedy"):
    """Per-probe-state gradient of the value output w.r.t. all parameters,
    flattened to one row per state. loss='greedy' differentiates the greedy
    action's value; 'sum' differentiates the sum over actions."""
    if loss not in ("greedy", "sum"):
        raise ConfigError(f"unknown loss mode '{loss}'")
    if grid is None:
        grid = probe_grid()
    rows = []
    for raw in grid:
        q, trace = _probe_forward(agent, env, raw)
        if loss == "greedy":
            g = backward(agent.params, trace, int(np.argmax(q)), 1.0)
            flat = np.concatenate([a.ravel() for a in g.arrays()])
        else:
            flat = 0.0
            for a_idx in range(len(q)):
                g = backward(agent.params, trace, a_idx, 1.0)
                flat = flat + np.concatenate([a.ravel() for a in g.arrays()])
        rows.append(flat)
    return np.array(rows)


def interference(agent, env, grid=None, normalize=True, loss="greedy"):
    """Mean gradient dot product over all unique probe-state pairs.

    In normalized mode each state's gradient is scaled to unit norm first;
    states with an all-zero gradient contribute 0 to their pairs and are
    listed in the report.
    """
    grads = state_gradients(agent, env, grid, loss=loss)
    norms = np.linalg.norm(grads, axis=1)
    zero_states = [int(i) for i in np.flatnonzero(norms == 0.0)]
    if normalize:
        safe = np.where(norms > 0.0, norms, 1.0)
        grads = grads / safe[:, None]
    dots = grads @ grads.T
    n = grads.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    pairs = np.column_stack([iu, ju, dots[iu, ju]])
    return InterferenceReport(
        mean_pairwise=float(pairs[:, 2].mean()),
        pairs=pairs,
        normalized=normalize,
        zero_grad_states=zero_states,
    )
