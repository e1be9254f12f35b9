import numpy as np
import pytest

from dsomrl.agents import (Agent, AgentConfig, PolicyConfig, ReplayBuffer,
                           RngStreams, Transition, budget_split, decay_policy,
                           select_action, td_target)
from dsomrl.config import build_agent, ExperimentConfig
from dsomrl.envs import MountainCar
from dsomrl.errors import ConfigError, ContractError
from dsomrl.nncore import forward
from dsomrl.optim import SGD


def make_agent(variant="online", hidden=8, algorithm="sarsa", alpha=0.01,
               seed=0, **kw):
    kw.setdefault("dsom_n", hidden)
    cfg = AgentConfig(algorithm=algorithm, variant=variant, hidden=hidden, **kw)
    return Agent(MountainCar(), cfg, SGD(alpha), np.random.default_rng(seed))


def streams(seed=0):
    ss = np.random.SeedSequence(seed).spawn(3)
    return RngStreams(*[np.random.default_rng(s) for s in ss])


# ---- policies ----

def test_select_action_greedy():
    pol = PolicyConfig(eps=0.0)
    rng = np.random.default_rng(0)
    assert select_action(np.array([-5.0, -3.0, -7.0]), pol, rng) == 1
    # tie goes to the lowest index
    assert select_action(np.array([1.0, 1.0, 0.0]), pol, rng) == 0


def test_select_action_uniform_when_random():
    pol = PolicyConfig(eps=1.0)
    rng = np.random.default_rng(1)
    q = np.array([0.0, 5.0, -1.0])
    counts = np.zeros(3)
    n = 100_000
    for _ in range(n):
        counts[select_action(q, pol, rng)] += 1
    assert np.all(np.abs(counts / n - 1 / 3) < 0.02)


def test_decay_policy():
    pol = PolicyConfig(kind="decaying_eps", eps_start=1.0, eps_end=0.1,
                       eps_decay=0.995).fresh()
    decay_policy(pol)
    assert pol.eps == pytest.approx(0.995)
    for _ in range(458):
        decay_policy(pol)
    assert pol.eps == pytest.approx(0.995 ** 459, rel=1e-12)  # still above floor
    decay_policy(pol)
    assert pol.eps == 0.1  # 0.995^460 < 0.1, clamped
    decay_policy(pol)
    assert pol.eps == 0.1
    with pytest.raises(ContractError):
        decay_policy(PolicyConfig(kind="fixed_eps"))


def test_policy_config_validation():
    with pytest.raises(ConfigError):
        PolicyConfig(eps=1.5)
    with pytest.raises(ConfigError):
        PolicyConfig(kind="decaying_eps", eps_start=0.5, eps_end=0.9)


# ---- targets ----

def test_td_target_examples():
    t_done = Transition(np.zeros(2), 0, -1.0, np.zeros(2), True)
    assert td_target("sarsa", t_done, np.array([9.0, 9.0]), 0) == -1.0
    t = Transition(np.zeros(2), 0, -1.0, np.zeros(2), False)
    assert td_target("sarsa", t, np.array([0.0, -10.0]), 1, gamma=1.0) == -11.0
    q = np.array([-5.0, -3.0, -7.0])
    assert td_target("qlearning", t, q, 0, gamma=1.0) == -4.0


def test_qlearning_target_dominates_sarsa():
    rng = np.random.default_rng(2)
    t = Transition(np.zeros(2), 0, -1.0, np.zeros(2), False)
    for _ in range(50):
        q = rng.normal(size=3)
        for a in range(3):
            assert (td_target("qlearning", t, q, a)
                    >= td_target("sarsa", t, q, a))


def test_budget_split():
    assert budget_split(800) == (400, 400)
    assert budget_split(36) == (18, 18)
    assert budget_split(2) == (1, 1)
    with pytest.raises(ConfigError):
        budget_split(7)


# ---- replay buffer ----

def test_replay_buffer_fifo_overwrites_oldest():
    buf = ReplayBuffer(5, 2)
    for k in range(8):
        buf.push(Transition(np.array([k, k]), 0, -1.0, np.zeros(2), False))
    assert len(buf) == 5
    stored = set(buf.s[:, 0].astype(int))
    assert stored == {3, 4, 5, 6, 7}  # 0..2 overwritten


# ---- online updates ----

def test_online_update_zero_delta_changes_nothing():
    agent = make_agent()
    # identical q at s and s_next with r chosen to zero the TD error
    s = np.array([0.5, 0.5])
    q, _ = forward(agent.params, s)
    t = Transition(s, 0, float(q[0] - 1.0 * q[0]), s, False)
    before = [a.copy() for a in agent.params.arrays()]
    delta = agent.online_update(t, 0)
    assert delta == pytest.approx(0.0)
    assert all(np.array_equal(a, b)
               for a, b in zip(agent.params.arrays(), before))


def test_online_update_reduces_td_error():
    agent = make_agent(alpha=0.01)
    s, s2 = np.array([0.2, 0.8]), np.array([0.7, 0.3])
    t = Transition(s, 1, -1.0, s2, False)
    q2, _ = forward(agent.params, s2)
    target = -1.0 + q2[1]
    before = abs(target - forward(agent.params, s)[0][1])
    agent.online_update(t, 1)
    after = abs(target - forward(agent.params, s)[0][1])
    assert after < before


def test_online_update_is_semi_gradient():
    # only the taken action's output row moves
    agent = make_agent(alpha=0.05)
    t = Transition(np.array([0.2, 0.8]), 1, -1.0, np.array([0.7, 0.3]), False)
    before_w2 = agent.params.w2.copy()
    agent.online_update(t, 2)
    changed = np.any(agent.params.w2 != before_w2, axis=1)
    assert changed[1]
    assert not changed[0] and not changed[2]


def test_online_update_rejected_for_replay_agent():
    agent = make_agent("replay")
    t = Transition(np.zeros(2), 0, -1.0, np.zeros(2), True)
    with pytest.raises(ContractError):
        agent.online_update(t, 0)


def test_dsom_with_huge_kappa_matches_online():
    # mask -> all ones, so the masked agent degenerates to the plain one
    results = []
    for variant in ("online", "dsom"):
        cfg = ExperimentConfig()
        cfg.agent.variant = variant
        cfg.agent.hidden = cfg.agent.dsom_n = 16
        cfg.agent.dsom_kappa = 1e12
        cfg.episodes = 2
        env, agent, rngs = build_agent(cfg, 3)
        stats = [agent.run_episode(env, rngs) for _ in range(2)]
        results.append((stats, agent.params))
    assert results[0][0] == results[1][0]
    for a, b in zip(results[0][1].arrays(), results[1][1].arrays()):
        assert np.allclose(a, b, atol=1e-6)


def test_masked_updates_are_more_local():
    # when mask overlap between two states is near zero, an update at one
    # changes the other's values less than the unmasked update does
    s1, s2 = np.array([0.05, 0.05]), np.array([0.95, 0.95])
    ratios_masked, ratios_plain = [], []
    for trial in range(100):
        masked = make_agent("dsom", hidden=16, alpha=0.1, seed=trial,
                            dsom_kappa=0.05)
        plain = make_agent("online", hidden=16, alpha=0.1, seed=trial)
        g1, g2 = masked.state_mask(s1), masked.state_mask(s2)
        assert float(g1 @ g2) < 0.05
        t = Transition(s1, 0, -1.0, s1, True)
        for agent, out in ((masked, ratios_masked), (plain, ratios_plain)):
            q_before = forward(agent.params, s2, agent.state_mask(s2))[0]
            agent.online_update(t, 0)
            q_after = forward(agent.params, s2, agent.state_mask(s2))[0]
            out.append(np.max(np.abs(q_after - q_before)))
    assert np.median(ratios_masked) < np.median(ratios_plain)


# ---- replay updates ----

def fill_buffer(agent, n, seed=0):
    rng = np.random.default_rng(seed)
    env = MountainCar()
    st = env.reset(rng)
    s = env.normalize(st)
    for _ in range(n):
        a = int(rng.integers(3))
        st, r, done = env.step(a)
        s_next = env.normalize(st)
        a_next = int(rng.integers(3))
        agent.buffer.push(Transition(s, a, r, s_next, done, a_next))
        if done:
            st = env.reset(rng)
        s = env.normalize(st)


def test_replay_update_guard():
    agent = make_agent("replay", batch_size=32)
    fill_buffer(agent, 10)
    before = [a.copy() for a in agent.params.arrays()]
    assert agent.replay_update(np.random.default_rng(0)) is None
    assert all(np.array_equal(a, b)
               for a, b in zip(agent.params.arrays(), before))


def test_replay_batch_of_identical_transitions():
    agent = make_agent("replay", batch_size=4, alpha=0.01)
    t = Transition(np.array([0.4, 0.6]), 1, -1.0, np.array([0.5, 0.5]), False, 2)
    for _ in range(4):
        agent.buffer.push(t)
    twin = make_agent("replay", batch_size=4, alpha=0.01)
    # single-sample semi-gradient update with the same delta, done by hand
    q, trace = forward(twin.params, t.s)
    qn = forward(twin.target, t.s_next)[0]
    delta = t.r + qn[t.a_next] - q[t.a]
    from dsomrl.nncore import backward
    twin.optimizer.apply(twin.params, backward(twin.params, trace, t.a, delta))
    agent.replay_update(np.random.default_rng(0))
    for a, b in zip(agent.params.arrays(), twin.params.arrays()):
        assert np.allclose(a, b, atol=1e-12)


def test_replay_converges_to_frozen_targets():
    agent = make_agent("replay", hidden=16, batch_size=32, alpha=0.05)
    fill_buffer(agent, 500)
    rng = np.random.default_rng(1)
    errs = [agent.replay_update(rng) for _ in range(200)]
    assert np.mean(errs[-20:]) < np.mean(errs[:20])


def test_sync_target_modes():
    agent = make_agent("replay")
    agent.params.w1 += 1.0
    agent.sync_target(soft=False)
    assert np.array_equal(agent.target.w1, agent.params.w1)

    agent.config.tau = 0.0
    agent.params.w1 += 1.0
    before = agent.target.w1.copy()
    agent.sync_target(soft=True)
    assert np.array_equal(agent.target.w1, before)

    agent.config.tau = 1.0
    agent.sync_target(soft=True)
    assert np.allclose(agent.target.w1, agent.params.w1)

    simple = make_agent("replay")
    simple.params.w1[:] = 1.0
    simple.target.w1[:] = 0.0
    simple.config.tau = 0.01
    simple.sync_target(soft=True)
    assert np.allclose(simple.target.w1, 0.01)

    with pytest.raises(ContractError):
        make_agent("online").sync_target()


# ---- episodes ----

def test_run_episode_reward_structure_and_cutoff():
    cfg = ExperimentConfig()
    cfg.agent.hidden = 8
    env, agent, rngs = build_agent(cfg, 0)
    for _ in range(3):
        steps, ret = agent.run_episode(env, rngs)
        assert steps == -ret
        assert steps <= 1000


def test_run_episode_deterministic():
    outs = []
    for _ in range(2):
        cfg = ExperimentConfig()
        cfg.agent.variant = "dsom"
        cfg.agent.hidden = cfg.agent.dsom_n = 16
        env, agent, rngs = build_agent(cfg, 11)
        outs.append([agent.run_episode(env, rngs) for _ in range(3)])
    assert outs[0] == outs[1]


def test_agent_config_validation():
    with pytest.raises(ConfigError):
        make_agent("dsom", hidden=8, dsom_n=4)
    with pytest.raises(ConfigError):
        make_agent("bandit")
