"""Sarsa / Q-learning control agents.

Three variants share one network core:
  online - fully incremental semi-gradient TD, one update per sample
  dsom   - online plus a DSOM-driven hidden-unit mask localizing updates
  replay - experience replay buffer with a target network (the DQN-style
           baseline the masked agent is compared against)
"""

import numpy as np
from dataclasses import dataclass, field

from . import dsom
from .errors import ConfigError, ContractError, NumericalError
from .nncore import ParamGrads, backward, forward, init_network


@dataclass
class Transition:
    s: np.ndarray        # normalized state
    a: int
    r: float
    s_next: np.ndarray
    done: bool
    a_next: int = 0      # action taken at s_next (used by Sarsa with replay)


@dataclass
class PolicyConfig:
    kind: str = "fixed_eps"   # fixed_eps | decaying_eps
    eps: float = 0.1
    eps_start: float = 1.0
    eps_end: float = 0.1
    eps_decay: float = 0.995

    def __post_init__(self):
        for v in (self.eps, self.eps_start, self.eps_end, self.eps_decay):
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"epsilon values must lie in [0,1], got {v}")
        if self.eps_end > self.eps_start:
            raise ConfigError("eps_end must be <= eps_start")

    def fresh(self):
        p = PolicyConfig(self.kind, self.eps, self.eps_start,
                         self.eps_end, self.eps_decay)
        if p.kind == "decaying_eps":
            p.eps = p.eps_start
        return p


@dataclass
class AgentConfig:
    algorithm: str = "sarsa"       # sarsa | qlearning
    gamma: float = 1.0
    variant: str = "online"        # online | dsom | replay
    hidden: int = 400
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    # dsom variant
    dsom_n: int = 400
    dsom_epsilon: float = 0.25
    dsom_eta: float = 1.0
    dsom_kappa: float = 0.5
    # replay variant
    replay_capacity: int = 20000
    batch_size: int = 32
    target_mode: str = "hard"      # hard (period in episodes) | soft (in steps)
    target_period: int = 10
    tau: float = 0.01


@dataclass
class RngStreams:
    env: np.random.Generator
    policy: np.random.Generator
    replay: np.random.Generator


def select_action(q, policy, rng):
    """Epsilon-greedy over q; greedy ties go to the lowest action index."""
    if policy.eps > 0.0 and rng.random() < policy.eps:
        return int(rng.integers(len(q)))
    return int(np.argmax(q))


def decay_policy(policy):
    """Multiplicative epsilon decay with a floor; call once per episode."""
    if policy.kind != "decaying_eps":
        raise ContractError("decay_policy on a fixed-epsilon policy")
    policy.eps = max(policy.eps_end, policy.eps * policy.eps_decay)


def td_target(algorithm, transition, q_next, a_next, gamma=1.0):
    """Bootstrap target for one transition; terminal transitions use the
    bare reward."""
    if transition.done:
        return transition.r
    if algorithm == "sarsa":
        boot = q_next[a_next]
    elif algorithm == "qlearning":
        boot = np.max(q_next)
    else:
        raise ConfigError(f"unknown algorithm '{algorithm}'")
    return transition.r + gamma * float(boot)


def budget_split(total_units):
    """Split a total unit budget evenly between hidden units and DSOM nodes,
    matching the weight-count parity accounting used for baselines."""
    if total_units < 2 or total_units % 2 != 0:
        raise ConfigError(f"total unit budget must be even and >= 2, got {total_units}")
    return total_units // 2, total_units // 2


class ReplayBuffer:
    """Fixed-capacity FIFO ring of transitions with uniform sampling."""

    def __init__(self, capacity, d):
        if capacity < 1:
            raise ConfigError("replay capacity must be >= 1")
        self.capacity = capacity
        self.s = np.empty((capacity, d))
        self.a = np.empty(capacity, dtype=np.int64)
        self.r = np.empty(capacity)
        self.s_next = np.empty((capacity, d))
        self.done = np.empty(capacity, dtype=bool)
        self.a_next = np.empty(capacity, dtype=np.int64)
        self.size = 0
        self.cursor = 0

    def __len__(self):
        return self.size

    def push(self, t):
        i = self.cursor
        self.s[i] = t.s
        self.a[i] = t.a
        self.r[i] = t.r
        self.s_next[i] = t.s_next
        self.done[i] = t.done
        self.a_next[i] = t.a_next
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample_indices(self, rng, batch_size):
        return rng.integers(0, self.size, size=batch_size)


class Agent:
    def __init__(self, env, config, optimizer, rng_init):
        self.config = config
        self.algorithm = config.algorithm
        self.gamma = config.gamma
        self.variant = config.variant
        self.optimizer = optimizer
        self.policy = config.policy.fresh()
        d, n_actions = env.obs_dim, env.n_actions

        if self.variant not in ("online", "dsom", "replay"):
            raise ConfigError(f"unknown agent variant '{config.variant}'")
        if self.algorithm not in ("sarsa", "qlearning"):
            raise ConfigError(f"unknown algorithm '{config.algorithm}'")

        self.params = init_network(d, config.hidden, n_actions, rng_init)
        self.map = None
        self.target = None
        self.buffer = None
        if self.variant == "dsom":
            if config.dsom_n != config.hidden:
                raise ConfigError("dsom variant needs one map node per hidden "
                                  f"unit (N={config.dsom_n}, H={config.hidden})")
            self.map = dsom.init_map(config.dsom_n, d, rng_init,
                                     epsilon=config.dsom_epsilon,
                                     eta=config.dsom_eta,
                                     kappa=config.dsom_kappa)
        elif self.variant == "replay":
            self.target = self.params.copy()
            self.buffer = ReplayBuffer(config.replay_capacity, d)

        self.env_steps = 0
        self.episodes = 0

    def state_mask(self, v):
        return dsom.mask(self.map, v) if self.map is not None else None

    def q_values(self, v, mask=None):
        q, _ = forward(self.params, v, mask)
        return q

    def online_update(self, transition, a_next, mask_s=None, mask_next=None,
                      q_next=None):
        """One semi-gradient TD step on a single transition. Returns the TD
        error. For the dsom variant both masks come from the map as it stood
        before this call; the map itself is updated afterwards with v = s."""
        if self.variant not in ("online", "dsom"):
            raise ContractError("online_update on a replay agent")
        if self.map is not None:
            if mask_s is None:
                mask_s = dsom.mask(self.map, transition.s)
            if mask_next is None and not transition.done:
                mask_next = dsom.mask(self.map, transition.s_next)

        q_s, trace = forward(self.params, transition.s, mask_s)
        if transition.done:
            target = transition.r
        else:
            if q_next is None:
                q_next, _ = forward(self.params, transition.s_next, mask_next)
            if self.algorithm == "sarsa":
                boot = q_next[a_next]
            else:
                boot = np.max(q_next)
            target = transition.r + self.gamma * boot
        delta = float(target - q_s[transition.a])
        if not np.isfinite(delta):
            raise NumericalError("TD error became non-finite")
        if delta != 0.0:
            grads = backward(self.params, trace, transition.a, delta)
            self.optimizer.apply(self.params, grads)
        if self.map is not None:
            dsom.update(self.map, transition.s)
        return delta

    def replay_update(self, rng):
        """One minibatch step against the target network. Returns the mean
        absolute TD error, or None when the buffer is still too small."""
        if self.variant != "replay":
            raise ContractError("replay_update on a non-replay agent")
        batch = self.config.batch_size
        if self.buffer.size < batch:
            return None
        idx = self.buffer.sample_indices(rng, batch)
        s = self.buffer.s[idx]
        a = self.buffer.a[idx]
        r = self.buffer.r[idx]
        s_next = self.buffer.s_next[idx]
        done = self.buffer.done[idx]
        a_next = self.buffer.a_next[idx]

        p = self.params
        pre = s @ p.w1.T + p.b1
        hid = np.maximum(pre, 0.0)
        q = hid @ p.w2.T + p.b2
        rows = np.arange(batch)
        q_taken = q[rows, a]

        t = self.target
        qn = np.maximum(s_next @ t.w1.T + t.b1, 0.0) @ t.w2.T + t.b2
        if self.algorithm == "sarsa":
            boot = qn[rows, a_next]
        else:
            boot = qn.max(axis=1)
        target = r + self.gamma * boot * ~done
        delta = target - q_taken
        if not np.isfinite(delta).all():
            raise NumericalError("TD error became non-finite")

        gq = np.zeros_like(q)
        gq[rows, a] = delta
        g_w2 = gq.T @ hid / batch
        g_b2 = gq.mean(axis=0)
        g_pre = (gq @ p.w2) * (pre > 0.0)
        g_w1 = g_pre.T @ s / batch
        g_b1 = g_pre.mean(axis=0)
        self.optimizer.apply(p, ParamGrads(g_w1, g_b1, g_w2, g_b2))
        return float(np.mean(np.abs(delta)))

    def sync_target(self, soft=False):
        if self.variant != "replay":
            raise ContractError("sync_target on a non-replay agent")
        if soft:
            tau = self.config.tau
            for tp, op in zip(self.target.arrays(), self.params.arrays()):
                tp *= 1.0 - tau
                tp += tau * op
        else:
            self.target = self.params.copy()

    def run_episode(self, env, rngs):
        """Play one episode, learning along the way. Returns (steps, return)."""
        cfg = self.config
        state = env.reset(rngs.env)
        s = env.normalize(state)
        mask_s = self.state_mask(s)
        q_s, _ = forward(self.params, s, mask_s)
        a = select_action(q_s, self.policy, rngs.policy)
        steps = 0
        ret = 0.0
        while True:
            next_state, r, done = env.step(a)
            s_next = env.normalize(next_state)
            steps += 1
            ret += r
            if done:
                mask_next, q_next, a_next = None, None, 0
            else:
                mask_next = self.state_mask(s_next)
                q_next, _ = forward(self.params, s_next, mask_next)
                a_next = select_action(q_next, self.policy, rngs.policy)
            t = Transition(s, a, r, s_next, done, a_next)
            if self.variant == "replay":
                self.buffer.push(t)
                self.replay_update(rngs.replay)
                self.env_steps += 1
                if (cfg.target_mode == "soft"
                        and self.env_steps % cfg.target_period == 0):
                    self.sync_target(soft=True)
            else:
                self.online_update(t, a_next, mask_s=mask_s,
                                   mask_next=mask_next, q_next=q_next)
                self.env_steps += 1
            if done:
                break
            s, a = s_next, a_next
            # recompute: for the dsom variant the map just moved
            mask_s = self.state_mask(s)
        self.episodes += 1
        if self.policy.kind == "decaying_eps":
            decay_policy(self.policy)
        if (self.variant == "replay" and cfg.target_mode == "hard"
                and self.episodes % cfg.target_period == 0):
            self.sync_target(soft=False)
        if not self.params.all_finite():
            raise NumericalError("network parameters became non-finite")
        return steps, ret
