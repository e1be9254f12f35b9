"""Episodic environments. Mountain Car is implemented from scratch with the
classic-control dynamics; states normalize affinely to the unit square."""

import numpy as np
from dataclasses import dataclass

from .errors import ConfigError, ContractError


@dataclass
class EnvState:
    features: np.ndarray
    terminal: bool


class MountainCar:
    """Underpowered car in a valley; reward -1 per step, cutoff 1000 steps."""

    POS_MIN, POS_MAX = -1.2, 0.6
    VEL_MIN, VEL_MAX = -0.07, 0.07
    GOAL_POS = 0.5
    CUTOFF = 1000

    obs_dim = 2
    n_actions = 3  # 0 = full back, 1 = coast, 2 = full forward

    def __init__(self):
        self.position = 0.0
        self.velocity = 0.0
        self.step_count = 0
        self.done = True

    def reset(self, rng):
        self.position = rng.uniform(-0.6, -0.4)
        self.velocity = 0.0
        self.step_count = 0
        self.done = False
        return EnvState(np.array([self.position, self.velocity]), False)

    def step(self, action):
        if self.done:
            raise ContractError("step() called on a finished episode")
        if action not in (0, 1, 2):
            raise ConfigError(f"invalid action {action}")
        vel = self.velocity + 0.001 * (action - 1) - 0.0025 * np.cos(3.0 * self.position)
        vel = min(max(vel, self.VEL_MIN), self.VEL_MAX)
        pos = self.position + vel
        pos = min(max(pos, self.POS_MIN), self.POS_MAX)
        if pos <= self.POS_MIN:
            vel = 0.0  # inelastic collision with the left wall
        self.position, self.velocity = pos, vel
        self.step_count += 1
        self.done = pos > self.GOAL_POS or self.step_count >= self.CUTOFF
        return (EnvState(np.array([pos, vel]), self.done), -1.0, self.done)

    def normalize(self, state):
        f = state.features if isinstance(state, EnvState) else np.asarray(state)
        return np.array([
            (f[0] - self.POS_MIN) / (self.POS_MAX - self.POS_MIN),
            (f[1] - self.VEL_MIN) / (self.VEL_MAX - self.VEL_MIN),
        ])


def make_env(env_id):
    if env_id in ("mountain_car", "mountaincar"):
        return MountainCar()
    raise ConfigError(f"unknown environment '{env_id}'")
