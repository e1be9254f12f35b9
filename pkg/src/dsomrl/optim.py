"""First-order optimizers over NetworkParams.

All optimizers ASCEND: params += step(alpha, grads). TD agents pass
delta * grad(q) as the gradient, so the step matches the classic
semi-gradient update rule w += alpha * delta * grad(q).
"""

import numpy as np

from .errors import ConfigError, NumericalError


class SGD:
    kind = "sgd"

    def __init__(self, alpha):
        self.alpha = alpha

    def apply(self, params, grads):
        for p, g in zip(params.arrays(), grads.arrays()):
            _check(p, g)
            p += self.alpha * g


class RMSProp:
    kind = "rmsprop"

    def __init__(self, alpha, rho=0.9, eps=1e-8):
        self.alpha = alpha
        self.rho = rho
        self.eps = eps
        self.sq = None

    def apply(self, params, grads):
        if self.sq is None:
            self.sq = [np.zeros_like(p) for p in params.arrays()]
        for p, g, s in zip(params.arrays(), grads.arrays(), self.sq):
            _check(p, g)
            s *= self.rho
            s += (1.0 - self.rho) * g * g
            p += self.alpha * g / (np.sqrt(s) + self.eps)


class Adam:
    kind = "adam"

    def __init__(self, alpha, beta1=0.9, beta2=0.999, eps=1e-8):
        self.alpha = alpha
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = None
        self.v = None
        self.t = 0

    def apply(self, params, grads):
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params.arrays()]
            self.v = [np.zeros_like(p) for p in params.arrays()]
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params.arrays(), grads.arrays(), self.m, self.v):
            _check(p, g)
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p += self.alpha * (m / c1) / (np.sqrt(v / c2) + self.eps)


def _check(p, g):
    if p.shape != g.shape:
        raise ConfigError(f"gradient shape {g.shape} != parameter {p.shape}")
    if not np.isfinite(g).all():
        raise NumericalError("non-finite gradient")


def make_optimizer(kind, alpha, **hp):
    if kind == "sgd":
        return SGD(alpha)
    if kind == "rmsprop":
        return RMSProp(alpha, **hp)
    if kind == "adam":
        return Adam(alpha, **hp)
    raise ConfigError(f"unknown optimizer kind '{kind}'")
