"""Shared fixtures and hand-rolled state builders."""

from __future__ import annotations

import numpy as np
import pytest

from swarmguard.config import EpisodeConfig, SimParams
from swarmguard.world import SwarmState, rebuild_adjacency


def make_params(**overrides) -> SimParams:
    return SimParams(**overrides)


def make_state(coords, seed=0, **param_overrides) -> SwarmState:
    """A SwarmState with drones pinned at explicit positions."""
    overrides = dict(param_overrides)
    overrides.setdefault("n_drones", len(coords))
    state = SwarmState(make_params(**overrides), seed)
    for i, (x, y) in enumerate(coords):
        state.xs[i] = float(x)
        state.ys[i] = float(y)
        state.wp_x[i] = float(x)
        state.wp_y[i] = float(y)
    rebuild_adjacency(state)
    return state


def line_coords(n, gap=25.0):
    """n drones on a horizontal line, consecutive pairs in radio range."""
    return [(10.0 + gap * i, 50.0) for i in range(n)]


def standard_obs(n=18, infected=0, outcome=0, pos=(50, 50), neighbours=(),
                 events=None, blocks=()):
    """Hand-rolled standard observation vector.

    neighbours: iterable of (uid, x, y, sessions) tuples.
    """
    length = 1 + n + 1 + (n + 1) + 2 + 4 * (n - 1)
    obs = np.zeros(length, dtype=np.int32)
    obs[0] = outcome
    for b in blocks:
        obs[1 + b] = 1
    obs[n + 1] = infected
    if events:
        for uid, count in events.items():
            obs[n + 2 + uid] = count
    obs[2 * n + 3], obs[2 * n + 4] = pos
    for k, (uid, x, y, sessions) in enumerate(neighbours):
        base = 2 * n + 5 + 4 * k
        obs[base] = uid
        obs[base + 1] = x
        obs[base + 2] = y
        obs[base + 3] = sessions
    return obs


class ScriptedRng:
    """Deterministic stand-in: pops queued values, falls back to fixed
    defaults (random() high so probability gates stay closed, randrange
    zero so the first option is picked)."""

    def __init__(self, randoms=(), randranges=()):
        self.randoms = list(randoms)
        self.randranges = list(randranges)

    def random(self):
        return self.randoms.pop(0) if self.randoms else 0.99

    def randrange(self, n):
        return self.randranges.pop(0) if self.randranges else 0

    def shuffle(self, xs):
        pass


@pytest.fixture
def base_config():
    return EpisodeConfig(seed=123, team=("sleep",) * 18)
