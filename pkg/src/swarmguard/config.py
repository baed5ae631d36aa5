"""Scenario parameters and episode configuration.

Defaults reproduce the standard challenge scenario: 18 drones in a
100x100 arena, radio radius 30, 100 bandwidth units per drone per step,
episodes of up to 500 steps.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace

SCRIPTED_KINDS = ("sleep", "remove", "retake", "adv-retake", "adv-block")
SLOT_KINDS = SCRIPTED_KINDS + ("cw", "external", "random")

OBSERVATION_MODES = ("standard", "improved")
REWARD_MODES = ("noisy", "denoised")


@dataclass
class SimParams:
    """World and team mechanics knobs.

    Probability fields exist so tests can force or disable individual
    stochastic mechanics; defaults are the scenario values.
    """

    n_drones: int = 18
    arena_size: float = 100.0
    radio_radius: float = 30.0  # inclusive: distance == radius is an edge
    max_bandwidth: int = 100

    # motion: waypoint swarming. Each drone loiters in place for
    # pause_min..pause_max steps, flies straight to a fresh point drawn
    # uniformly inside the patrol box (the arena inset by swarm_spread
    # on every edge), and loiters again. Staggered pauses keep most of
    # the swarm stationary at any moment while a few drones in transit
    # churn the radio topology.
    motion_speed: float = 2.0
    swarm_spread: float = 10.0  # patrol box inset from the arena edge
    pause_min: int = 20
    pause_max: int = 120

    # red team
    activation_p: float = 0.05
    switch_p: float = 0.10
    exploit_success_p: float = 0.5
    exploit_flag_p: float = 0.5
    exploit_bandwidth: int = 1  # units per route drone
    flood_relay_cost: int = 1  # saturating units per route drone

    # blue team
    remove_success_p: float = 0.9
    retake_success_p: float = 0.75
    retake_false_flag_p: float = 0.15
    retake_bandwidth: int = 10  # units per route drone

    # green team
    green_message_units: int = 1

    # canary/whistle defence protocol
    cw_skip_block_p: float = 0.225
    cw_position_threshold: float = 32.0  # drift before neighbour memory resets
    # relay whistles the first time a suspect is heard of, so alarms
    # spread hop by hop and the whole swarm quarantines the drone
    cw_forward_whistles: bool = True
    # how many steps back the missing-canary scan looks; 1 checks only
    # the previous step and misses silences that fall in a frame gap
    cw_scan_window: int = 3
    # consecutive sightings of a drone that never sang before it is
    # treated as hostile; 0 disables the rule. Off by default: worth
    # switching on when activations come fast enough that a takeover
    # regularly outlives every hearer that knew its canary
    cw_newcomer_patience: int = 0

    def validate(self) -> None:
        if not 2 <= self.n_drones <= 32:
            raise ValueError("n_drones must be in [2, 32]")
        if self.pause_min > self.pause_max or self.pause_min < 0:
            raise ValueError("invalid pause window")
        if not 0 <= self.swarm_spread < self.arena_size / 2:
            raise ValueError("patrol box inset must leave a positive box")


@dataclass
class EpisodeConfig:
    """Everything needed to reproduce an episode or an evaluation run."""

    seed: int = 0
    horizon: int = 500
    observation_mode: str = "standard"
    include_messages: bool = False
    reward_mode: str = "noisy"
    team: tuple[str, ...] = ()
    randomize_hosting: bool = True
    observe_all: bool = False
    sim: SimParams = field(default_factory=SimParams)

    def __post_init__(self) -> None:
        if not self.team:
            self.team = ("cw",) * self.sim.n_drones
        if isinstance(self.team, list):
            self.team = tuple(self.team)

    def validate(self) -> None:
        self.sim.validate()
        if not 1 <= self.horizon <= 500:
            raise ValueError("horizon must be in [1, 500]")
        if self.observation_mode not in OBSERVATION_MODES:
            raise ValueError(f"unknown observation_mode {self.observation_mode!r}")
        if self.reward_mode not in REWARD_MODES:
            raise ValueError(f"unknown reward_mode {self.reward_mode!r}")
        if len(self.team) != self.sim.n_drones:
            raise ValueError(
                f"team has {len(self.team)} slots, scenario has {self.sim.n_drones} drones"
            )
        for kind in self.team:
            if kind not in SLOT_KINDS:
                raise ValueError(f"unknown slot kind {kind!r}")

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        d["team"] = list(self.team)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EpisodeConfig":
        d = dict(d)
        sim = d.pop("sim", {})
        if isinstance(sim, dict):
            sim = SimParams(**sim)
        cfg = cls(sim=sim, **{k: v for k, v in d.items() if k != "team"})
        if "team" in d:
            cfg.team = tuple(d["team"])
        return cfg

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EpisodeConfig":
        return cls.from_dict(json.loads(text))

    def with_seed(self, seed: int) -> "EpisodeConfig":
        return replace(self, seed=seed)

    def fingerprint(self) -> str:
        """Stable hash of the configuration plus the package version."""
        from swarmguard import __version__

        payload = json.dumps(
            {"config": self.to_dict(), "version": __version__}, sort_keys=True
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def parse_team(spec: str, n_drones: int = 18) -> tuple[str, ...]:
    """Parse a team composition string such as "cw:7,external:11".

    Counts must add up to the number of drones. A bare kind with no
    count fills the whole team.
    """
    spec = spec.strip()
    if not spec:
        raise ValueError("empty team spec")
    slots: list[str] = []
    for part in spec.split(","):
        part = part.strip()
        if ":" in part:
            kind, _, count = part.partition(":")
            kind = kind.strip()
            n = int(count)
        else:
            kind, n = part, n_drones - len(slots)
        if kind not in SLOT_KINDS:
            raise ValueError(f"unknown slot kind {kind!r}")
        if n < 0:
            raise ValueError("negative slot count")
        slots.extend([kind] * n)
    if len(slots) != n_drones:
        raise ValueError(
            f"team spec {spec!r} fills {len(slots)} slots, expected {n_drones}"
        )
    return tuple(slots)


def format_team(team: tuple[str, ...]) -> str:
    """Inverse of parse_team, collapsing runs of equal kinds."""
    parts: list[str] = []
    i = 0
    while i < len(team):
        j = i
        while j < len(team) and team[j] == team[i]:
            j += 1
        parts.append(f"{team[i]}:{j - i}")
        i = j
    return ",".join(parts)
