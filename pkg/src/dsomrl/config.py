"""Experiment configuration: a flat key=value file with dotted keys.

Repeating a key turns it into a sweep axis, e.g.

    optimizer.alpha=0.005
    optimizer.alpha=0.000025

`seeds` is a comma-separated list, never a sweep axis.
"""

import copy

import numpy as np
from dataclasses import dataclass, field

from .agents import Agent, AgentConfig, RngStreams, budget_split
from .envs import make_env
from .errors import ConfigError
from .optim import make_optimizer


@dataclass
class ExperimentConfig:
    env: str = "mountain_car"
    episodes: int = 500
    seeds: list = field(default_factory=lambda: [0])
    out: str = "out"
    workers: int = 1
    agent: AgentConfig = field(default_factory=AgentConfig)
    total_units: int = 0          # 0 = use agent.hidden directly
    optimizer_kind: str = "sgd"
    alpha: float = 0.005
    opt_hp: dict = field(default_factory=dict)
    sweep_axes: dict = field(default_factory=dict)
    sweep_cap: int = 512

    def resolved(self):
        """Copy with the unit budget folded into concrete layer sizes."""
        cfg = copy.deepcopy(self)
        if cfg.total_units:
            if cfg.agent.variant == "dsom":
                h, n = budget_split(cfg.total_units)
                cfg.agent.hidden, cfg.agent.dsom_n = h, n
            else:
                cfg.agent.hidden = cfg.total_units
        return cfg

    def validate(self):
        if not self.seeds:
            raise ConfigError("seed list is empty")
        if self.episodes < 0:
            raise ConfigError("episodes must be >= 0")
        if self.agent.gamma < 0 or self.agent.gamma > 1:
            raise ConfigError(f"gamma {self.agent.gamma} outside [0,1]")
        if self.agent.hidden < 1 and not self.total_units:
            raise ConfigError("need hidden units >= 1")
        return self


_INT_KEYS = {"episodes", "workers", "agent.hidden", "network.total_units",
             "dsom.n", "replay.capacity", "replay.batch_size",
             "replay.target_period", "sweep.cap"}
_FLOAT_KEYS = {"agent.gamma", "policy.eps", "policy.eps_start",
               "policy.eps_end", "policy.eps_decay", "optimizer.alpha",
               "optimizer.rho", "optimizer.beta1", "optimizer.beta2",
               "optimizer.eps", "dsom.epsilon", "dsom.eta", "dsom.kappa",
               "replay.tau"}
_STR_KEYS = {"env", "out", "agent.algorithm", "agent.variant", "policy.kind",
             "optimizer.kind", "replay.target_mode"}


def _parse_value(key, raw):
    raw = raw.strip()
    if key == "seeds":
        return [int(s) for s in raw.split(",") if s.strip()]
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _STR_KEYS:
        return raw
    raise ConfigError(f"unknown config key '{key}'")


def _assign(cfg, key, value):
    a, p = cfg.agent, cfg.agent.policy
    simple = {
        "env": ("env", cfg), "out": ("out", cfg), "seeds": ("seeds", cfg),
        "episodes": ("episodes", cfg), "workers": ("workers", cfg),
        "sweep.cap": ("sweep_cap", cfg),
        "network.total_units": ("total_units", cfg),
        "agent.algorithm": ("algorithm", a), "agent.gamma": ("gamma", a),
        "agent.variant": ("variant", a), "agent.hidden": ("hidden", a),
        "policy.kind": ("kind", p), "policy.eps": ("eps", p),
        "policy.eps_start": ("eps_start", p), "policy.eps_end": ("eps_end", p),
        "policy.eps_decay": ("eps_decay", p),
        "optimizer.kind": ("optimizer_kind", cfg),
        "optimizer.alpha": ("alpha", cfg),
        "dsom.n": ("dsom_n", a), "dsom.epsilon": ("dsom_epsilon", a),
        "dsom.eta": ("dsom_eta", a), "dsom.kappa": ("dsom_kappa", a),
        "replay.capacity": ("replay_capacity", a),
        "replay.batch_size": ("batch_size", a),
        "replay.target_mode": ("target_mode", a),
        "replay.target_period": ("target_period", a),
        "replay.tau": ("tau", a),
    }
    if key in simple:
        attr, obj = simple[key]
        setattr(obj, attr, value)
    elif key in ("optimizer.rho", "optimizer.beta1", "optimizer.beta2",
                 "optimizer.eps"):
        cfg.opt_hp[key.split(".", 1)[1]] = value
    else:
        raise ConfigError(f"unknown config key '{key}'")


def from_pairs(pairs):
    """Build a config from (key, raw_value) pairs; repeated keys (except
    seeds) become sweep axes and their first value seeds the base config."""
    cfg = ExperimentConfig()
    seen = {}
    for key, raw in pairs:
        value = _parse_value(key, raw)
        if key == "seeds":
            cfg.seeds = value
            continue
        if key in seen:
            cfg.sweep_axes.setdefault(key, [seen[key]]).append(value)
        else:
            seen[key] = value
            _assign(cfg, key, value)
    return cfg.validate()


def parse_config_file(path):
    pairs = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, raw = line.split("=", 1)
            pairs.append((key.strip(), raw))
    return from_pairs(pairs)


def apply_override(cfg, key, raw_or_value):
    """Copy of cfg with one key replaced (used to expand sweep cells)."""
    out = copy.deepcopy(cfg)
    out.sweep_axes = {}
    value = (raw_or_value if not isinstance(raw_or_value, str)
             else _parse_value(key, raw_or_value))
    _assign(out, key, value)
    return out


def build_agent(config, seed):
    """Deterministically construct (env, agent, rng streams) for one seed.

    All randomness descends from the seed through four named substreams:
    init, env, policy, replay.
    """
    cfg = config.resolved()
    ss = np.random.SeedSequence(seed)
    init_ss, env_ss, policy_ss, replay_ss = ss.spawn(4)
    env = make_env(cfg.env)
    opt = make_optimizer(cfg.optimizer_kind, cfg.alpha, **cfg.opt_hp)
    agent = Agent(env, cfg.agent, opt, np.random.default_rng(init_ss))
    rngs = RngStreams(env=np.random.default_rng(env_ss),
                      policy=np.random.default_rng(policy_ss),
                      replay=np.random.default_rng(replay_ss))
    return env, agent, rngs
