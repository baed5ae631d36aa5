"""Episode environment: parallel-step multi-agent orchestration.

Phase order within one step: blue decisions on the previous step's
observations, blue actions applied in ascending drone order, red
activation/escalation/switch/actions, green traffic, motion, broadcast
frame delivery, observation building. A frame emitted at step t is
visible only in step t+1 observations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from swarmguard import blueteam, redteam, traffic
from swarmguard.blueteam import (
    BlueAction,
    BluePolicy,
    CanaryWhistlePolicy,
    action_space_size,
    decode_action,
    make_policy,
    pad,
    unpad,
)
from swarmguard.config import EpisodeConfig
from swarmguard.traffic import EventKind, RewardEvent
from swarmguard.world import (
    Controller,
    Outcome,
    SwarmState,
    rebuild_adjacency,
    step_motion,
)


def standard_length(n: int, include_messages: bool) -> int:
    # success, block bits, malicious process, event list (with its
    # trailing pad entry), position, neighbour tuples, message bits
    base = 1 + n + 1 + (n + 1) + 2 + 4 * (n - 1)
    return base + (16 * (n - 1) if include_messages else 0)


def improved_length(n: int, include_messages: bool) -> int:
    base = 3 + n + 1 + n + n
    return base + (16 * (n - 1) if include_messages else 0)


def observation_length(mode: str, n: int = 18, include_messages: bool = False) -> int:
    if mode == "standard":
        return standard_length(n, include_messages)
    if mode == "improved":
        return improved_length(n, include_messages)
    raise ValueError(f"unknown observation mode {mode!r}")


def _write_message_bits(out: np.ndarray, offset: int, frames: list[int], n: int) -> None:
    # ascending sender order, zero-padded to n-1 slots, high bit first
    for k, raw in enumerate(frames[: n - 1]):
        base = offset + 16 * k
        for b in range(16):
            out[base + b] = raw >> (15 - b) & 1


def build_standard_observation(
    state: SwarmState, uid: int, frames: list[int], include_messages: bool
) -> np.ndarray:
    n = state.n
    obs = np.zeros(standard_length(n, include_messages), dtype=np.int32)
    obs[0] = state.last_outcome[uid]
    bm = int(state.block_mask[uid])
    for i in range(n):
        obs[1 + i] = bm >> i & 1
    obs[n + 1] = 1 if state.controller[uid] == Controller.RED_LOW else 0
    counts = state.event_counts[uid]
    for i in range(n):
        obs[n + 2 + i] = counts[i]
    # the event list carries one trailing pad entry, always zero
    obs[2 * n + 3] = int(state.xs[uid] + 0.5)
    obs[2 * n + 4] = int(state.ys[uid] + 0.5)
    base = 2 * n + 5
    adj = int(state.adjacency[uid])
    k = 0
    for j in range(n):
        if adj >> j & 1:
            slot = base + 4 * k
            obs[slot] = j
            obs[slot + 1] = int(state.xs[j] + 0.5)
            obs[slot + 2] = int(state.ys[j] + 0.5)
            sessions = 2 if state.controller[j] == Controller.RED_LOW else 1
            obs[slot + 3] = sessions
            k += 1
    if include_messages:
        _write_message_bits(obs, base + 4 * (n - 1), frames, n)
    return obs


def build_improved_observation(
    state: SwarmState,
    uid: int,
    frames: list[int],
    needs_fix: set[int],
    include_messages: bool,
) -> np.ndarray:
    n = state.n
    obs = np.zeros(improved_length(n, include_messages), dtype=np.int32)
    obs[0] = uid
    obs[1] = 1 if state.last_outcome[uid] == Outcome.TRUE else 0
    obs[2] = state.last_action[uid]
    kinds = state.last_target_kind[uid]
    for i in range(n):
        obs[3 + i] = kinds[i]
    obs[3 + n] = 1 if state.controller[uid] == Controller.RED_LOW else 0
    bm = int(state.block_mask[uid])
    for i in range(n):
        obs[4 + n + i] = bm >> i & 1
    for i in range(n):
        obs[4 + 2 * n + i] = 1 if i in needs_fix else 0
    if include_messages:
        _write_message_bits(obs, 4 + 3 * n, frames, n)
    return obs


class NeedsFixTracker:
    """Background canary listener maintained per drone.

    Duplicates the expert agent's detection rules so learning agents on
    the improved observation see which drones currently look like they
    need fixing without speaking the protocol themselves. A flag clears
    when the suspect's canary is heard again.
    """

    def __init__(self, uid: int, threshold: float):
        self.uid = uid
        self.threshold = threshold
        self.last_seen: dict[int, int] = {}
        self.needs_fix: set[int] = set()
        self.cached_position: tuple[float, float] | None = None

    def update(self, frames: list[int], step: int, pos: tuple[float, float]) -> None:
        if self.cached_position is None:
            self.cached_position = pos
        else:
            dx = pos[0] - self.cached_position[0]
            dy = pos[1] - self.cached_position[1]
            if dx * dx + dy * dy > self.threshold * self.threshold:
                self.cached_position = pos
                self.last_seen.clear()
                return
        heard: set[int] = set()
        whistled: set[int] = set()
        for raw in frames:
            canary, overheard, whistle = unpad(raw)
            self.last_seen[canary] = step
            heard.add(canary)
            if canary != self.uid and overheard == 1 and whistle != self.uid:
                whistled.add(whistle)
        missing = {u for u, seen in self.last_seen.items() if seen == step - 1}
        self.needs_fix -= heard
        self.needs_fix |= whistled | missing


@dataclass
class StepResult:
    observations: dict[str, np.ndarray]
    rewards: dict[str, float]
    team_reward: float
    done: bool
    step: int
    events: list[RewardEvent] = field(default_factory=list)
    invalid_actions: list[str] = field(default_factory=list)
    actions_taken: dict[str, int] = field(default_factory=dict)


class DroneSwarmEnv:
    """Deterministic multi-agent episode runner.

    Slots are named "agent_0" .. "agent_{n-1}"; each is bound to a
    hosting drone at reset (a seeded permutation when hosting is
    randomized). step() takes actions for external slots only; internal
    slots decide for themselves. All agents share the team reward.
    """

    def __init__(self, config: EpisodeConfig):
        config.validate()
        self.config = config
        self.n = config.sim.n_drones
        self.agents = [f"agent_{i}" for i in range(self.n)]
        self.external_agents = [
            self.agents[i] for i, kind in enumerate(config.team) if kind == "external"
        ]
        self.state: SwarmState | None = None
        self._done = True

    # -- spaces ----------------------------------------------------------

    def action_space_size(self) -> int:
        return action_space_size(self.n)

    def observation_size(self) -> int:
        return observation_length(
            self.config.observation_mode, self.n, self.config.include_messages
        )

    def space_descriptor(self) -> dict:
        flat = self.action_space_size()
        return {
            "agents": list(self.agents),
            "external_agents": list(self.external_agents),
            "action_size": flat,
            "message_bits": blueteam.FRAME_BITS if self.config.include_messages else 0,
            "combined_action_size": (
                flat + 2**blueteam.FRAME_BITS if self.config.include_messages else flat
            ),
            "observation_mode": self.config.observation_mode,
            "observation_length": self.observation_size(),
        }

    # -- lifecycle ---------------------------------------------------------

    def reset(self) -> dict[str, np.ndarray]:
        cfg = self.config
        self.state = SwarmState(cfg.sim, cfg.seed)
        st = self.state
        blue_rng = st.rngs["blue-noise"]

        hosting = list(range(self.n))
        if cfg.randomize_hosting:
            blue_rng.shuffle(hosting)
        self.drone_of_slot = hosting
        self.slot_of_drone = [0] * self.n
        for slot, drone in enumerate(hosting):
            self.slot_of_drone[drone] = slot

        self.policies: dict[int, BluePolicy | None] = {}
        for slot, kind in enumerate(cfg.team):
            uid = self.drone_of_slot[slot]
            self.policies[slot] = (
                None if kind == "external" else make_policy(kind, uid, cfg.sim)
            )

        self._delivered: list[list[int]] = [[] for _ in range(self.n)]
        self._trackers = [
            NeedsFixTracker(uid, cfg.sim.cw_position_threshold)
            for uid in range(self.n)
        ]
        self._cached_obs: dict[int, np.ndarray | None] = {
            slot: None for slot in range(self.n)
        }
        self._done = False
        return self._build_observations()

    @property
    def done(self) -> bool:
        return self._done

    def step(self, actions: dict[str, object] | None = None) -> StepResult:
        """Advance one step. `actions` maps external slot labels to an
        action index or an (index, frame) pair."""
        if self.state is None or self._done:
            raise RuntimeError("step() called on a finished or unreset episode")
        st = self.state
        cfg = self.config
        actions = actions or {}
        t = st.step_index
        blue_rng = st.rngs["blue-noise"]

        # start-of-step resets: bandwidth and intercept marks. Event
        # counts are NOT reset: flagged activity accumulates on the
        # observer (saturating at 2) until the drone is restored, so
        # stale accusations linger the way real incident logs do.
        st.bandwidth[:] = 0
        st.intercepting = 0

        invalid: list[str] = []
        max_action = self.action_space_size() - 1

        # decide (simultaneously, on cached observations), then apply
        decisions: list[tuple[int, BlueAction, int]] = []
        taken: dict[str, int] = {}
        for uid in range(self.n):
            if st.controller[uid] == Controller.RED_HIGH:
                continue
            slot = self.slot_of_drone[uid]
            label = self.agents[slot]
            policy = self.policies[slot]
            if policy is None:
                raw = actions.get(label, max_action)
                index, frame = self._coerce_external(raw)
                if not 0 <= index <= max_action:
                    invalid.append(label)
                    index = max_action
                if not cfg.include_messages:
                    frame = pad(uid, 0, 0)
            else:
                index, frame = policy.act(
                    self._cached_obs[slot], self._delivered[uid], t, blue_rng
                )
                if not isinstance(policy, CanaryWhistlePolicy):
                    frame = pad(uid, 0, 0)
            taken[label] = index
            decisions.append((uid, decode_action(index, self.n), frame & 0xFFFF))

        was_high = [st.controller[u] == Controller.RED_HIGH for u in range(self.n)]
        outbox: list[tuple[int, int]] = []
        for uid, action, frame in decisions:
            blueteam.apply_blue_action(st, uid, action)
            outbox.append((uid, frame))
        for uid in range(self.n):
            if was_high[uid] and st.controller[uid] == Controller.BLUE:
                policy = self.policies[self.slot_of_drone[uid]]
                if policy is not None:
                    policy.reset_memory()

        redteam.red_phase(st)

        events = traffic.green_phase(st)

        st.step_index = t + 1
        compromised = st.all_compromised()
        if compromised:
            events.append(
                traffic.compromise_penalty(st.step_index, cfg.horizon, self.n)
            )
        self._done = compromised or st.step_index >= cfg.horizon

        step_motion(st)
        self._deliver_frames(outbox)

        noisy = sum(ev.magnitude for ev in events)
        denoised = sum(
            ev.magnitude for ev in events if ev.kind != EventKind.UNROUTABLE
        )
        team_reward = float(denoised if cfg.reward_mode == "denoised" else noisy)

        observations = self._build_observations()
        return StepResult(
            observations=observations,
            rewards={label: team_reward for label in observations},
            team_reward=team_reward,
            done=self._done,
            step=t,
            events=events,
            invalid_actions=invalid,
            actions_taken=taken,
        )

    # -- internals ----------------------------------------------------------

    @staticmethod
    def _coerce_external(raw: object) -> tuple[int, int]:
        if isinstance(raw, (tuple, list)) and len(raw) == 2:
            return int(raw[0]), int(raw[1]) & 0xFFFF
        return int(raw), 0  # type: ignore[arg-type]

    def _deliver_frames(self, outbox: list[tuple[int, int]]) -> None:
        st = self.state
        assert st is not None
        delivered: list[list[int]] = [[] for _ in range(self.n)]
        for sender, frame in outbox:  # outbox is already in ascending order
            adj = int(st.adjacency[sender])
            for receiver in range(self.n):
                if adj >> receiver & 1:
                    delivered[receiver].append(frame)
        self._delivered = delivered
        if self.config.observation_mode == "improved":
            for uid in range(self.n):
                self._trackers[uid].update(
                    delivered[uid],
                    st.step_index,
                    (float(st.xs[uid]), float(st.ys[uid])),
                )

    def _build_observations(self) -> dict[str, np.ndarray]:
        st = self.state
        assert st is not None
        cfg = self.config
        out: dict[str, np.ndarray] = {}
        for slot, kind in enumerate(cfg.team):
            uid = self.drone_of_slot[slot]
            policy = self.policies[slot]
            if policy is not None and policy.needs_observation:
                self._cached_obs[slot] = build_standard_observation(
                    st, uid, self._delivered[uid], include_messages=False
                )
            if kind == "external" or cfg.observe_all:
                if cfg.observation_mode == "improved":
                    obs = build_improved_observation(
                        st,
                        uid,
                        self._delivered[uid],
                        self._trackers[uid].needs_fix,
                        cfg.include_messages,
                    )
                else:
                    obs = build_standard_observation(
                        st, uid, self._delivered[uid], cfg.include_messages
                    )
                out[self.agents[slot]] = obs
        return out
