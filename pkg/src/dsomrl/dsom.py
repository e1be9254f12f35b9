"""Dynamic self-organizing map with per-node output masks.

Unlike the classic SOM there is no time-decayed learning rate or
neighborhood radius: every update depends only on the current map state
and the input vector, so the map keeps tracking non-stationary streams.
"""

import numpy as np
from dataclasses import dataclass

from .errors import ConfigError, InputError

# below this distance (in the normalized norm) between input and BMU the
# whole update is skipped: the neighborhood divides by it and the update
# magnitude vanishes in the limit anyway
SINGULARITY_TOL = 1e-9


@dataclass
class DsomMap:
    vectors: np.ndarray    # [N, d] node weight vectors
    positions: np.ndarray  # [N, 2] fixed grid coordinates in [0,1]^2
    epsilon: float         # map learning rate
    eta: float             # elasticity (node coupling strength)
    kappa: float           # mask temperature

    def __post_init__(self):
        if self.epsilon <= 0 or self.eta <= 0 or self.kappa <= 0:
            raise ConfigError("epsilon, eta, kappa must all be > 0")

    @property
    def N(self):
        return self.vectors.shape[0]

    @property
    def d(self):
        return self.vectors.shape[1]

    def copy(self):
        return DsomMap(self.vectors.copy(), self.positions.copy(),
                       self.epsilon, self.eta, self.kappa)


def grid_shape(N):
    """Most-square factorization rows x cols = N (square when N allows)."""
    rows = int(np.sqrt(N))
    while N % rows != 0:
        rows -= 1
    return rows, N // rows


def init_map(N, d, rng, epsilon=0.25, eta=1.0, kappa=0.5):
    """Node vectors uniform in [0,1]^d on a fixed 2-D lattice in [0,1]^2.

    Perfect squares give the usual sqrt(N) x sqrt(N) grid; other counts fall
    back to the most-square rows x cols factorization.
    """
    if N < 1:
        raise ConfigError(f"need at least one node, got N={N}")
    vectors = rng.uniform(0.0, 1.0, size=(N, d))
    rows, cols = grid_shape(N)
    ax_r = np.linspace(0.0, 1.0, rows) if rows > 1 else np.zeros(1)
    ax_c = np.linspace(0.0, 1.0, cols) if cols > 1 else np.zeros(1)
    gx, gy = np.meshgrid(ax_r, ax_c, indexing="ij")
    positions = np.column_stack([gx.ravel(), gy.ravel()])
    return DsomMap(vectors, positions, epsilon, eta, kappa)


def omega_norm(diff):
    """Normalized euclidean norm: ||x|| / sqrt(d). In [0,1] on the unit cube."""
    diff = np.atleast_2d(diff)
    return np.sqrt(np.sum(diff * diff, axis=1) / diff.shape[1])


def bmu(m, v):
    """Index of the best matching unit (euclidean argmin, lowest index wins)."""
    diff = m.vectors - v
    return int(np.argmin(np.einsum("ij,ij->i", diff, diff)))


def neighborhood(m, i, b, v):
    """Coupling of node i to BMU b for input v.

    exp(-(1/eta^2) * ||p_i - p_b||^2 / ||v - w_b||_omega^2); degenerates to
    an indicator of i == b when the input sits on the BMU.
    """
    db = omega_norm(v - m.vectors[b])[0]
    if db < SINGULARITY_TOL:
        return 1.0 if i == b else 0.0
    pd2 = np.sum((m.positions[i] - m.positions[b]) ** 2)
    return float(np.exp(-pd2 / (m.eta ** 2 * db ** 2)))


def update(m, v):
    """One competitive-learning step: shift every node towards v, weighted by
    its own distance to v and its grid proximity to the BMU."""
    v = np.asarray(v, dtype=np.float64)
    if not np.isfinite(v).all():
        raise InputError("non-finite DSOM input")
    diff = v - m.vectors
    dist_omega = omega_norm(diff)
    b = int(np.argmin(dist_omega))
    db = dist_omega[b]
    if db < SINGULARITY_TOL:
        return
    pd2 = np.sum((m.positions - m.positions[b]) ** 2, axis=1)
    h = np.exp(-pd2 / (m.eta ** 2 * db ** 2))
    m.vectors += m.epsilon * (dist_omega * h)[:, None] * diff


def mask(m, v):
    """Per-node output mask exp(-||v - w_i|| / kappa), each in (0, 1]."""
    diff = m.vectors - v
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return np.exp(-dist / m.kappa)


def quantization_error(m, batch):
    """Mean euclidean distance from each input to its BMU."""
    batch = np.atleast_2d(np.asarray(batch, dtype=np.float64))
    if batch.size == 0:
        raise InputError("empty batch")
    d2 = np.sum((batch[:, None, :] - m.vectors[None, :, :]) ** 2, axis=2)
    return float(np.mean(np.sqrt(d2.min(axis=1))))
