"""Message delivery and reward events.

Only green traffic and the terminal compromise penalty produce score;
blue and red traffic consume bandwidth but never score directly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from swarmguard.world import SwarmState, consume_bandwidth, route_hops


class EventKind(str, enum.Enum):
    BLOCKED = "blocked"
    INTERCEPTED = "intercepted"
    DROPPED_BANDWIDTH = "dropped_bandwidth"
    UNROUTABLE = "unroutable"
    COMPROMISE_PENALTY = "compromise_penalty"


@dataclass(frozen=True)
class RewardEvent:
    kind: EventKind
    step: int
    magnitude: int
    src: int = -1
    dst: int = -1


def compromise_penalty(step: int, horizon: int, n: int = 18) -> RewardEvent:
    """Terminal penalty when every drone is red: one unit per drone for
    every remaining step. `step` counts completed steps at termination.
    """
    return RewardEvent(
        EventKind.COMPROMISE_PENALTY,
        step,
        -n * (horizon - step),
    )


def deliver_message(
    state: SwarmState, src: int, dst: int, units: int = 1
) -> RewardEvent | None:
    """Deliver one message; return a RewardEvent on any failure.

    Resolution order: no route, blocked, insufficient bandwidth,
    intercepted (still delivered), clean delivery (None). Routing never
    routes around blocks; a message is blocked when any hop, endpoints
    included, has the original sender in its block list.
    """
    t = state.step_index
    hops = route_hops(state, src, dst)
    if hops is None:
        return RewardEvent(EventKind.UNROUTABLE, t, -1, src, dst)
    blockers = state.blockers_against(src)
    if blockers:
        for h in hops:
            if blockers >> h & 1:
                return RewardEvent(EventKind.BLOCKED, t, -1, src, dst)
    if not consume_bandwidth(state, hops, units):
        return RewardEvent(EventKind.DROPPED_BANDWIDTH, t, -1, src, dst)
    if state.intercepting:
        for h in hops:
            if state.intercepting >> h & 1:
                return RewardEvent(EventKind.INTERCEPTED, t, -1, src, dst)
    return None


def green_phase(state: SwarmState) -> list[RewardEvent]:
    """Each drone sends one message to a uniformly random other drone.

    Green agents keep transmitting from compromised drones; senders act
    in ascending drone order and recipients come from the green stream.
    """
    rng = state.rngs["green"]
    units = state.params.green_message_units
    events: list[RewardEvent] = []
    n = state.n
    for src in range(n):
        r = rng.randrange(n - 1)
        dst = r if r < src else r + 1
        ev = deliver_message(state, src, dst, units)
        if ev is not None:
            events.append(ev)
    return events
