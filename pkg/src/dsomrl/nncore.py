"""Single-hidden-layer ReLU network with manual backprop and a hidden-unit mask.

The mask is an externally supplied per-unit multiplier applied to the hidden
layer output before the linear readout. It is treated as a constant during
backprop: gradients into a hidden unit are scaled by its mask value.
"""

import numpy as np
from dataclasses import dataclass

from .errors import ConfigError, ContractError, InputError


@dataclass
class NetworkParams:
    w1: np.ndarray  # [H, D]
    b1: np.ndarray  # [H]
    w2: np.ndarray  # [A, H]
    b2: np.ndarray  # [A]

    @property
    def H(self):
        return self.w1.shape[0]

    @property
    def D(self):
        return self.w1.shape[1]

    @property
    def A(self):
        return self.w2.shape[0]

    def arrays(self):
        return [self.w1, self.b1, self.w2, self.b2]

    def copy(self):
        return NetworkParams(self.w1.copy(), self.b1.copy(),
                             self.w2.copy(), self.b2.copy())

    def all_finite(self):
        return all(np.isfinite(a).all() for a in self.arrays())


@dataclass
class ForwardTrace:
    input: np.ndarray         # [D]
    pre_act: np.ndarray       # [H]
    hidden: np.ndarray        # [H], post-ReLU
    mask: np.ndarray          # [H]
    masked_hidden: np.ndarray  # [H]
    q: np.ndarray             # [A]


@dataclass
class ParamGrads:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def arrays(self):
        return [self.w1, self.b1, self.w2, self.b2]


def init_network(D, H, A, rng):
    """He-uniform hidden layer, Xavier-uniform linear output, zero biases."""
    if D < 1 or H < 1 or A < 1:
        raise ConfigError("network dimensions must be >= 1, got "
                          f"D={D} H={H} A={A}")
    lim1 = np.sqrt(6.0 / D)
    lim2 = np.sqrt(6.0 / (H + A))
    return NetworkParams(
        w1=rng.uniform(-lim1, lim1, size=(H, D)),
        b1=np.zeros(H),
        w2=rng.uniform(-lim2, lim2, size=(A, H)),
        b2=np.zeros(A),
    )


def forward(params, x, mask=None):
    """Compute q = w2 (mask * relu(w1 x + b1)) + b2 and cache intermediates.

    mask=None means the all-ones mask (the plain unmasked network).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.D,):
        raise ConfigError(f"input shape {x.shape} != ({params.D},)")
    if not np.isfinite(x).all():
        raise InputError("non-finite network input")
    pre = params.w1 @ x + params.b1
    hidden = np.maximum(pre, 0.0)
    if mask is None:
        mask = np.ones_like(hidden)
        masked = hidden
    else:
        mask = np.asarray(mask, dtype=np.float64)
        if mask.shape != hidden.shape:
            raise ConfigError(f"mask shape {mask.shape} != ({params.H},)")
        masked = hidden * mask
    q = params.w2 @ masked + params.b2
    return q, ForwardTrace(x, pre, hidden, mask, masked, q)


def backward(params, trace, action, out_grad):
    """Gradients of out_grad * q[action] w.r.t. all parameters.

    ReLU subgradient at 0 is 0; the mask scales gradients flowing into each
    hidden unit, so a fully masked-out unit receives no update.
    """
    if trace.pre_act.shape != (params.H,) or trace.input.shape != (params.D,):
        raise ContractError("trace does not match network shapes")
    if not 0 <= action < params.A:
        raise ContractError(f"action {action} out of range [0, {params.A})")
    g_b2 = np.zeros(params.A)
    g_b2[action] = out_grad
    g_w2 = np.zeros_like(params.w2)
    g_w2[action] = out_grad * trace.masked_hidden
    g_pre = (out_grad * params.w2[action]) * trace.mask
    g_pre *= trace.pre_act > 0.0
    g_w1 = np.outer(g_pre, trace.input)
    return ParamGrads(g_w1, g_pre, g_w2, g_b2)
