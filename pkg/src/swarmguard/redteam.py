"""Red team: firmware activation, privilege escalation and six attack
strategies executed by high-privilege agents.

Strategy summary:
    EXPLOIT_RANDOM / EXPLOIT_FARTHEST
        Remote exploits against every direct neighbour with no red
        presence, swept in random or farthest-first order until the
        bandwidth budget drops attempts. Each attempt fails half the
        time; every route drone independently flags it half the time.
        Success plants a low-privilege session that escalates one step
        later if not removed.
    FLOOD_RANDOM / FLOOD_FARTHEST
        Saturate a reachable drone's bandwidth to the maximum. Never
        fails when the target is routable and unblocked; always flagged
        by every route drone.
    BLOCK_RANDOM
        Add a random direct neighbour to the host's block list.
    INTERCEPT
        Silently observe traffic relayed through the host. Never
        flagged, never fails.

All randomness comes from the red stream; hosts act in ascending order.
"""

from __future__ import annotations

import enum

from swarmguard.world import Controller, SwarmState, consume_bandwidth, route_hops


class Strategy(enum.IntEnum):
    EXPLOIT_RANDOM = 0
    EXPLOIT_FARTHEST = 1
    FLOOD_RANDOM = 2
    FLOOD_FARTHEST = 3
    BLOCK_RANDOM = 4
    INTERCEPT = 5


N_STRATEGIES = len(Strategy)


def activation_phase(state: SwarmState) -> None:
    """Independent chance per step that dormant firmware malware strikes.

    One Bernoulli draw per step; on success the malware activates on a
    uniformly random drone. A strike on a drone not fully under blue
    control is wasted (an established agent is already in charge there,
    and a low-privilege session escalates through the usual path
    instead). The new high agent receives a uniformly random strategy
    and acts this same step.
    """
    rng = state.rngs["red"]
    if state.params.activation_p <= 0.0:
        return
    if rng.random() >= state.params.activation_p:
        return
    uid = rng.randrange(state.n)
    if state.controller[uid] != Controller.BLUE:
        return
    state.controller[uid] = Controller.RED_HIGH
    state.red_strategy[uid] = rng.randrange(N_STRATEGIES)
    state.red_created[uid] = -1


def escalate_and_switch(state: SwarmState) -> None:
    """Low sessions surviving a full blue phase escalate; established
    high agents re-roll their strategy with the switch probability."""
    rng = state.rngs["red"]
    t = state.step_index
    for uid in range(state.n):
        if (
            state.controller[uid] == Controller.RED_LOW
            and state.red_created[uid] < t
        ):
            state.controller[uid] = Controller.RED_HIGH
            state.red_strategy[uid] = rng.randrange(N_STRATEGIES)
            state.red_created[uid] = -1
    p = state.params.switch_p
    for uid in range(state.n):
        if state.controller[uid] == Controller.RED_HIGH:
            if rng.random() < p:
                state.red_strategy[uid] = rng.randrange(N_STRATEGIES)


def red_actions(state: SwarmState) -> None:
    for uid in range(state.n):
        if state.controller[uid] == Controller.RED_HIGH:
            _act(state, uid, Strategy(int(state.red_strategy[uid])))


def red_phase(state: SwarmState) -> None:
    activation_phase(state)
    escalate_and_switch(state)
    red_actions(state)


# -- strategy mechanics ---------------------------------------------------


def _flag_route(state: SwarmState, hops: list[int], source: int, p: float) -> None:
    """Each route drone independently logs a malicious network event
    attributed to the acting source, saturating at 2."""
    rng = state.rngs["red"]
    counts = state.event_counts
    for h in hops:
        if p >= 1.0 or rng.random() < p:
            if counts[h][source] < 2:
                counts[h][source] += 1


def _route_clear_of_blocks(state: SwarmState, hops: list[int], source: int) -> bool:
    blockers = state.blockers_against(source)
    if not blockers:
        return True
    return not any(blockers >> h & 1 for h in hops)


def _exploit_targets(state: SwarmState, host: int) -> list[int]:
    # only drones with no red presence at all can be exploited
    m = int(state.adjacency[host])
    return [
        j
        for j in range(state.n)
        if m >> j & 1 and state.controller[j] == Controller.BLUE
    ]


def _act_exploit(state: SwarmState, host: int, farthest: bool) -> None:
    """Sweep every exploitable neighbour this step, planting a low
    session on each successful hit. The variants differ only in sweep
    order (uniform shuffle vs farthest-first), which matters once the
    bandwidth budget starts dropping attempts."""
    targets = _exploit_targets(state, host)
    if not targets:
        return
    rng = state.rngs["red"]
    if farthest:
        targets.sort(
            key=lambda j: (
                -(
                    (state.xs[host] - state.xs[j]) ** 2
                    + (state.ys[host] - state.ys[j]) ** 2
                ),
                j,
            )
        )
    else:
        rng.shuffle(targets)
    p = state.params
    for target in targets:
        hops = route_hops(state, host, target)
        if hops is None or not _route_clear_of_blocks(state, hops, host):
            continue
        if not consume_bandwidth(state, hops, p.exploit_bandwidth):
            continue
        _flag_route(state, hops, host, p.exploit_flag_p)
        if rng.random() < p.exploit_success_p:
            state.controller[target] = Controller.RED_LOW
            state.red_created[target] = state.step_index


def _flood_targets(state: SwarmState, host: int) -> list[int]:
    out = []
    for j in range(state.n):
        if j == host:
            continue
        hops = route_hops(state, host, j)
        if hops is not None and _route_clear_of_blocks(state, hops, host):
            out.append(j)
    return out


def _act_flood(state: SwarmState, host: int, farthest: bool) -> None:
    targets = _flood_targets(state, host)
    if not targets:
        return
    rng = state.rngs["red"]
    if farthest:
        target = max(
            targets,
            key=lambda j: (
                (state.xs[host] - state.xs[j]) ** 2
                + (state.ys[host] - state.ys[j]) ** 2,
                -j,
            ),
        )
    else:
        target = targets[rng.randrange(len(targets))]
    hops = route_hops(state, host, target)
    assert hops is not None
    cap = state.params.max_bandwidth
    relay = state.params.flood_relay_cost
    for h in hops:
        if h != target:
            state.bandwidth[h] = min(cap, int(state.bandwidth[h]) + relay)
    state.bandwidth[target] = cap
    _flag_route(state, hops, host, 1.0)


def _act_block(state: SwarmState, host: int) -> None:
    m = int(state.adjacency[host])
    neighbours = [j for j in range(state.n) if m >> j & 1]
    if not neighbours:
        return
    rng = state.rngs["red"]
    target = neighbours[rng.randrange(len(neighbours))]
    state.block_mask[host] |= 1 << target


def _act(state: SwarmState, host: int, strategy: Strategy) -> None:
    if strategy == Strategy.EXPLOIT_RANDOM:
        _act_exploit(state, host, farthest=False)
    elif strategy == Strategy.EXPLOIT_FARTHEST:
        _act_exploit(state, host, farthest=True)
    elif strategy == Strategy.FLOOD_RANDOM:
        _act_flood(state, host, farthest=False)
    elif strategy == Strategy.FLOOD_FARTHEST:
        _act_flood(state, host, farthest=True)
    elif strategy == Strategy.BLOCK_RANDOM:
        _act_block(state, host)
    else:
        state.intercepting |= 1 << host
