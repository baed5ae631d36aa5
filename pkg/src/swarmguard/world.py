"""Swarm world state: drones, motion, radio topology, routing, bandwidth.

The state is array-backed for speed; DroneView offers a per-drone
object facade used by tests and non-hot-path code.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from swarmguard import _kernels
from swarmguard.config import SimParams
from swarmguard.rng import make_streams


class Controller(enum.IntEnum):
    """Who is in charge of a drone.

    BLUE: healthy, blue agent in control.
    RED_LOW: blue agent in control, low-privilege red session present.
    RED_HIGH: red agent in control, blue agent removed.
    """

    BLUE = 0
    RED_LOW = 1
    RED_HIGH = 2


class Outcome(enum.IntEnum):
    """Last blue action result, encoded as observed."""

    TRUE = 0
    UNKNOWN = 1
    FALSE = 2


@dataclass(frozen=True)
class Route:
    """A radio route: consecutive hops from source to destination."""

    hops: tuple[int, ...]

    @property
    def hop_count(self) -> int:
        return len(self.hops) - 1


class SwarmState:
    """Mutable simulation state for one episode."""

    def __init__(self, params: SimParams, seed: int):
        params.validate()
        self.params = params
        self.seed = seed
        self.rngs = make_streams(seed)
        n = params.n_drones
        self.n = n
        self.step_index = 0

        self.xs = np.zeros(n, dtype=np.float64)
        self.ys = np.zeros(n, dtype=np.float64)

        self.controller = np.zeros(n, dtype=np.int8)
        self.red_strategy = np.full(n, -1, dtype=np.int8)
        self.red_created = np.full(n, -1, dtype=np.int32)

        self.block_mask = np.zeros(n, dtype=np.uint32)
        self.bandwidth = np.zeros(n, dtype=np.int32)
        self.event_counts = np.zeros((n, n), dtype=np.int8)
        self.last_outcome = np.full(n, Outcome.UNKNOWN, dtype=np.int8)
        self.last_action = np.full(n, 3 * n + 1, dtype=np.int16)  # Sleep
        self.last_target_kind = np.zeros((n, n), dtype=np.int8)

        self.adjacency = np.zeros(n, dtype=np.uint32)
        self.intercepting = 0  # bitmask, rebuilt every step

        # waypoint swarming: every drone loiters at its current spot,
        # then flies straight to a fresh point inside the patrol box
        # (the arena inset by swarm_spread on every edge) and loiters
        # again. Initial pauses are staggered so transits overlap
        # instead of happening in lockstep.
        self.wp_x = np.zeros(n, dtype=np.float64)
        self.wp_y = np.zeros(n, dtype=np.float64)
        self.pause = np.zeros(n, dtype=np.int32)
        rng = self.rngs["motion"]
        lo = params.swarm_spread
        hi = params.arena_size - params.swarm_spread
        for i in range(n):
            self.xs[i] = rng.uniform(lo, hi)
            self.ys[i] = rng.uniform(lo, hi)
            self.wp_x[i] = self.xs[i]
            self.wp_y[i] = self.ys[i]
            if params.pause_max > 0:
                self.pause[i] = rng.randint(0, params.pause_max)
        rebuild_adjacency(self)

    # -- facade ---------------------------------------------------------

    def drone(self, uid: int) -> "DroneView":
        return DroneView(self, uid)

    def neighbours(self, uid: int) -> list[int]:
        m = int(self.adjacency[uid])
        return [j for j in range(self.n) if m >> j & 1]

    def blockers_against(self, src: int) -> int:
        """Bitmask of drones whose block list contains src."""
        out = 0
        for i in range(self.n):
            if int(self.block_mask[i]) >> src & 1:
                out |= 1 << i
        return out

    def red_high_count(self) -> int:
        return int((self.controller == Controller.RED_HIGH).sum())

    def all_compromised(self) -> bool:
        return bool((self.controller == Controller.RED_HIGH).all())


class DroneView:
    """Read/write view of a single drone's fields."""

    __slots__ = ("_s", "uid")

    def __init__(self, state: SwarmState, uid: int):
        self._s = state
        self.uid = uid

    @property
    def position(self) -> tuple[float, float]:
        return (float(self._s.xs[self.uid]), float(self._s.ys[self.uid]))

    @position.setter
    def position(self, xy: tuple[float, float]) -> None:
        self._s.xs[self.uid], self._s.ys[self.uid] = xy

    @property
    def controller(self) -> Controller:
        return Controller(int(self._s.controller[self.uid]))

    @controller.setter
    def controller(self, c: Controller) -> None:
        self._s.controller[self.uid] = int(c)

    @property
    def block_list(self) -> set[int]:
        m = int(self._s.block_mask[self.uid])
        return {j for j in range(self._s.n) if m >> j & 1}

    def block(self, target: int) -> None:
        self._s.block_mask[self.uid] |= np.uint32(1 << target)

    def allow(self, target: int) -> None:
        self._s.block_mask[self.uid] &= np.uint32(~(1 << target) & 0xFFFFFFFF)

    @property
    def bandwidth_used(self) -> int:
        return int(self._s.bandwidth[self.uid])

    @property
    def malicious_process_flag(self) -> bool:
        # a low-privilege red session is what the local scanner reports
        return int(self._s.controller[self.uid]) == Controller.RED_LOW

    @property
    def network_event_counts(self) -> dict[int, int]:
        row = self._s.event_counts[self.uid]
        return {j: int(row[j]) for j in range(self._s.n) if row[j]}

    @property
    def last_action_outcome(self) -> Outcome:
        return Outcome(int(self._s.last_outcome[self.uid]))


# -- topology and routing ----------------------------------------------


def rebuild_adjacency(state: SwarmState) -> None:
    _kernels.adjacency_masks(
        state.xs, state.ys, state.params.radio_radius, state.adjacency
    )


def route_hops(state: SwarmState, src: int, dst: int) -> list[int] | None:
    """Raw hop list for the hot path; None when unreachable."""
    if src == dst:
        raise ValueError("route source equals destination")
    return _kernels.route_lexmin(state.adjacency, state.n, src, dst)


def shortest_route(state: SwarmState, src: int, dst: int) -> Route | None:
    hops = route_hops(state, src, dst)
    return None if hops is None else Route(tuple(hops))


def reachable_from(state: SwarmState, src: int) -> int:
    return _kernels.reachable_mask(state.adjacency, state.n, src)


# -- bandwidth ----------------------------------------------------------


def consume_bandwidth(state: SwarmState, hops: list[int], units: int) -> bool:
    """Atomically charge every hop, or charge nothing and return False."""
    cap = state.params.max_bandwidth
    bw = state.bandwidth
    for h in hops:
        if bw[h] + units > cap:
            return False
    for h in hops:
        bw[h] += units
    return True


# -- motion --------------------------------------------------------------


def step_motion(state: SwarmState) -> None:
    """Waypoint swarming: loiter, fly to a random point, loiter again.

    A drone holding a pause counts it down in place. Once the pause
    expires it flies straight toward its waypoint at the common speed;
    on arrival it draws the next waypoint uniformly inside the patrol
    box and a fresh pause from pause_min..pause_max. Loitering drones
    keep the radio mesh steady while the few in transit churn it. The
    airframes fly the same pattern no matter who controls them, and
    all draws come from the motion stream in ascending drone order.
    """
    p = state.params
    rng = state.rngs["motion"]
    speed = p.motion_speed
    if speed <= 0.0:
        return

    lo = p.swarm_spread
    hi = p.arena_size - p.swarm_spread
    for i in range(state.n):
        if state.pause[i] > 0:
            state.pause[i] -= 1
            continue
        dx = state.wp_x[i] - state.xs[i]
        dy = state.wp_y[i] - state.ys[i]
        dist = (dx * dx + dy * dy) ** 0.5
        if dist <= speed:
            state.xs[i] = state.wp_x[i]
            state.ys[i] = state.wp_y[i]
            state.wp_x[i] = rng.uniform(lo, hi)
            state.wp_y[i] = rng.uniform(lo, hi)
            state.pause[i] = rng.randint(p.pause_min, p.pause_max)
        else:
            state.xs[i] += speed * dx / dist
            state.ys[i] += speed * dy / dist
    rebuild_adjacency(state)
