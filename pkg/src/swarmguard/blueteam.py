"""Blue team: action encoding, action mechanics, scripted policies and
the canary/whistle defence agent.

Canonical flat action encoding for n drones (56 actions at n = 18):

    0                  RemoveOtherSessions
    1 .. n             RetakeControl(target)
    n+1 .. 2n          BlockTraffic(target)
    2n+1 .. 3n         AllowTraffic(target)
    3n+1               Sleep
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from swarmguard.config import SimParams
from swarmguard.world import (
    Controller,
    Outcome,
    SwarmState,
    consume_bandwidth,
    route_hops,
)


class ActionKind(enum.IntEnum):
    REMOVE_OTHER_SESSIONS = 0
    RETAKE_CONTROL = 1
    BLOCK_TRAFFIC = 2
    ALLOW_TRAFFIC = 3
    SLEEP = 4


# codes used by the "last action type on neighbour" observation field
TARGETED_ACTION_CODES = {
    ActionKind.RETAKE_CONTROL: 0,
    ActionKind.BLOCK_TRAFFIC: 1,
    ActionKind.ALLOW_TRAFFIC: 2,
}


@dataclass(frozen=True)
class BlueAction:
    kind: ActionKind
    target: int | None = None


def action_space_size(n: int = 18) -> int:
    return 3 * n + 2


def decode_action(index: int, n: int = 18) -> BlueAction:
    if not 0 <= index <= 3 * n + 1:
        raise ValueError(f"action index {index} out of range for {n} drones")
    if index == 0:
        return BlueAction(ActionKind.REMOVE_OTHER_SESSIONS)
    if index <= n:
        return BlueAction(ActionKind.RETAKE_CONTROL, index - 1)
    if index <= 2 * n:
        return BlueAction(ActionKind.BLOCK_TRAFFIC, index - n - 1)
    if index <= 3 * n:
        return BlueAction(ActionKind.ALLOW_TRAFFIC, index - 2 * n - 1)
    return BlueAction(ActionKind.SLEEP)


def encode_action(action: BlueAction, n: int = 18) -> int:
    k, t = action.kind, action.target
    if k == ActionKind.REMOVE_OTHER_SESSIONS:
        return 0
    if k == ActionKind.SLEEP:
        return 3 * n + 1
    if t is None or not 0 <= t < n:
        raise ValueError(f"{k.name} requires a target in [0, {n})")
    if k == ActionKind.RETAKE_CONTROL:
        return 1 + t
    if k == ActionKind.BLOCK_TRAFFIC:
        return n + 1 + t
    return 2 * n + 1 + t


# -- 16-bit broadcast frame codec -----------------------------------------
#
# Layout, low bit first: canary uid in bits 0..5, overheard flag in
# bit 6, whistle uid in bits 11..15. Bits 5 and 7..10 are always zero
# for uids below 32.

FRAME_BITS = 16


def pad(canary: int, overheard: int, whistle: int) -> int:
    if not 0 <= canary < 32 or not 0 <= whistle < 32:
        raise ValueError("uid fields must fit in five bits")
    if overheard not in (0, 1):
        raise ValueError("overheard must be 0 or 1")
    return (whistle << 11) | (overheard << 6) | canary


def unpad(frame: int) -> tuple[int, int, int]:
    canary = frame & 0x3F
    overheard = frame >> 6 & 0x1
    whistle = frame >> 11 & 0x3F
    return canary, overheard, whistle


# -- action mechanics -----------------------------------------------------


def apply_blue_action(state: SwarmState, actor: int, action: BlueAction) -> None:
    """Execute one blue action and record its observable outcome.

    Callers guarantee the actor hosts a live blue agent. RetakeControl
    is the only remote action: it needs a route, charges bandwidth per
    route drone and can false-flag the whole route. Block and Allow
    mutate the actor's own list and always succeed.
    """
    p = state.params
    rng = state.rngs["blue-noise"]
    kind = action.kind
    state.last_action[actor] = encode_action(action, state.n)
    if action.target is not None and kind in TARGETED_ACTION_CODES:
        state.last_target_kind[actor][action.target] = TARGETED_ACTION_CODES[kind]

    if kind == ActionKind.SLEEP:
        state.last_outcome[actor] = Outcome.TRUE
        return

    if kind == ActionKind.REMOVE_OTHER_SESSIONS:
        if state.controller[actor] == Controller.RED_LOW:
            if rng.random() < p.remove_success_p:
                state.controller[actor] = Controller.BLUE
                state.red_created[actor] = -1
                state.last_outcome[actor] = Outcome.TRUE
            else:
                state.last_outcome[actor] = Outcome.FALSE
        else:
            # nothing to remove counts as success
            state.last_outcome[actor] = Outcome.TRUE
        return

    target = action.target
    assert target is not None

    if kind == ActionKind.BLOCK_TRAFFIC:
        state.block_mask[actor] |= 1 << target
        state.last_outcome[actor] = Outcome.TRUE
        return

    if kind == ActionKind.ALLOW_TRAFFIC:
        state.block_mask[actor] &= ~(1 << target) & 0xFFFFFFFF
        state.last_outcome[actor] = Outcome.TRUE
        return

    # RetakeControl
    if target == actor:
        state.last_outcome[actor] = Outcome.FALSE
        return
    hops = route_hops(state, actor, target)
    if hops is None:
        state.last_outcome[actor] = Outcome.FALSE
        return
    # a compromised relay will not carry the defender's control
    # traffic: repairs either go direct or travel blue-held links.
    # Only drones strictly between actor and target can drop the
    # attempt; the target itself being red is the whole point.
    for h in hops[1:-1]:
        if state.controller[h] != Controller.BLUE:
            state.last_outcome[actor] = Outcome.FALSE
            return
    if not consume_bandwidth(state, hops, p.retake_bandwidth):
        state.last_outcome[actor] = Outcome.FALSE
        return
    success = rng.random() < p.retake_success_p
    false_flag = rng.random() < p.retake_false_flag_p
    if false_flag:
        counts = state.event_counts
        for h in hops:
            if counts[h][actor] < 2:
                counts[h][actor] += 1
    if success:
        # the restored agent gets a clean session: red sessions are
        # gone, and the block list and event log the old tenant built
        # up are dropped with them
        state.controller[target] = Controller.BLUE
        state.red_strategy[target] = -1
        state.red_created[target] = -1
        state.block_mask[target] = 0
        state.event_counts[target] = 0
        state.last_outcome[target] = Outcome.UNKNOWN
        state.last_outcome[actor] = Outcome.TRUE
    else:
        state.last_outcome[actor] = Outcome.FALSE


# -- policies --------------------------------------------------------------

SLEEP_FRAME = 0


class BluePolicy:
    """Per-slot decision maker. Policies read only their cached
    observation and inbound frames; they never touch world state."""

    needs_observation = False

    def __init__(self, uid: int, params: SimParams):
        self.uid = uid
        self.params = params

    def reset_memory(self) -> None:
        """Called when the hosting drone is retaken: the replacement
        agent starts fresh."""

    def act(self, obs, frames, step: int, rng) -> tuple[int, int]:
        raise NotImplementedError


class SleepPolicy(BluePolicy):
    def act(self, obs, frames, step, rng):
        return action_space_size(self.params.n_drones) - 1, SLEEP_FRAME


class RemoveSessionsPolicy(BluePolicy):
    """Always runs the local session sweep."""

    def act(self, obs, frames, step, rng):
        return 0, SLEEP_FRAME


class RandomRetakePolicy(BluePolicy):
    """Hammers RetakeControl at one randomly chosen swarm member.

    The victim is drawn once per deployment, so a fresh agent picks a
    fresh drone but an undisturbed agent never lets go of its choice.
    """

    def __init__(self, uid: int, params: SimParams):
        super().__init__(uid, params)
        self._target = -1

    def reset_memory(self) -> None:
        self._target = -1

    def act(self, obs, frames, step, rng):
        if self._target < 0:
            self._target = rng.randrange(self.params.n_drones)
        return 1 + self._target, SLEEP_FRAME


class _AdvancedPolicy(BluePolicy):
    """Reacts to malicious network events reported in the observation;
    sweeps local sessions otherwise."""

    needs_observation = True
    _react_kind: ActionKind

    def act(self, obs, frames, step, rng):
        n = self.params.n_drones
        events = obs[n + 2 : 2 * n + 2]
        flagged = [i for i in range(n) if events[i] > 0 and i != self.uid]
        if not flagged:
            return 0, SLEEP_FRAME
        target = flagged[rng.randrange(len(flagged))]
        index = encode_action(BlueAction(self._react_kind, target), n)
        return index, SLEEP_FRAME


class AdvancedRetakePolicy(_AdvancedPolicy):
    _react_kind = ActionKind.RETAKE_CONTROL


class AdvancedBlockPolicy(_AdvancedPolicy):
    _react_kind = ActionKind.BLOCK_TRAFFIC


class RandomActionPolicy(BluePolicy):
    """Uniform random action, for fuzzing."""

    def act(self, obs, frames, step, rng):
        return rng.randrange(action_space_size(self.params.n_drones)), SLEEP_FRAME


# -- canary/whistle agent ---------------------------------------------------


@dataclass
class CanaryMemory:
    """Per-agent protocol state.

    last_seen maps a neighbour uid to the step its canary was last
    heard; to_fix maps a suspect uid to the next repair stage, one of
    "block", "retake", "allow".
    """

    last_seen: dict[int, int] = field(default_factory=dict)
    to_fix: dict[int, str] = field(default_factory=dict)
    whistle: int = 0
    cached_position: tuple[int, int] | None = None
    present_runs: dict[int, tuple[int, int]] = field(default_factory=dict)


class CanaryWhistlePolicy(BluePolicy):
    """Expert defence agent built on a liveness-beacon protocol.

    Every healthy step the agent broadcasts its own uid as a canary.
    A neighbour whose canary goes silent is queued for repair and its
    uid is whistled to everyone in range; overheard whistles are queued
    too. Queued suspects are repaired one per step through a block,
    retake, allow cycle (a fraction of repairs skip straight to the
    retake). An infected host sweeps its own sessions and blows the
    whistle on itself by sending a canary of zero.
    """

    needs_observation = True

    def __init__(self, uid: int, params: SimParams):
        super().__init__(uid, params)
        self.memory = CanaryMemory()

    def reset_memory(self) -> None:
        self.memory = CanaryMemory()

    def act(self, obs, frames, step, rng):
        n = self.params.n_drones
        mem = self.memory

        if obs[n + 1]:  # malicious process on host
            return 0, pad(0, 0, self.uid)

        pos = (int(obs[2 * n + 3]), int(obs[2 * n + 4]))
        overheard = 0
        moved = False
        if mem.cached_position is None:
            mem.cached_position = pos
        elif step > 1:
            dx = pos[0] - mem.cached_position[0]
            dy = pos[1] - mem.cached_position[1]
            threshold = self.params.cw_position_threshold
            moved = dx * dx + dy * dy > threshold * threshold

        if moved:
            mem.cached_position = pos
            mem.last_seen.clear()
            mem.present_runs.clear()
        else:
            for raw in frames:
                canary, heard, whistle = unpad(raw)
                if canary == 0 and heard == 0:
                    # infected beacon: a neighbour sweeping a low red
                    # session signs the frame with its own uid in the
                    # whistle field. Count the sender as alive so only
                    # a full takeover reads as silence.
                    mem.last_seen[int(whistle)] = step
                    continue
                mem.last_seen[canary] = step
                if canary != self.uid and heard == 1 and whistle != self.uid:
                    if whistle not in mem.to_fix:
                        # a whistled drone goes on the wanted list; it
                        # only gets repair turns once it is close enough
                        # that we can hear its canary and block it
                        mem.to_fix[whistle] = "watch"
                        if self.params.cw_forward_whistles:
                            # relay a first-heard alarm one hop onward;
                            # the enqueue gate keeps echoes from ringing
                            mem.whistle = whistle
                            overheard = 1

        # a neighbour still on the radio whose canary fell silent has
        # been taken over; one that simply flew out of range is
        # forgotten rather than accused. The silence test looks back a
        # few steps, not just one: an agent that spent a round cleaning
        # its own sessions skips a frame batch, and an exact-match scan
        # would sail past anything that vanished during the gap.
        present = set()
        base = 2 * n + 5
        for k in range(n - 1):
            slot = base + 4 * k
            if obs[slot + 3] >= 1:
                present.add(int(obs[slot]))
        window = self.params.cw_scan_window
        for uid in [
            u
            for u, seen in mem.last_seen.items()
            if step - window <= seen <= step - 1
        ]:
            if uid not in present:
                del mem.last_seen[uid]
                continue
            if uid in mem.to_fix:
                continue
            mem.to_fix[uid] = "block"
            mem.whistle = uid
            overheard = 1

        # standing suspicion: anyone who keeps showing up on the radio
        # without ever singing is hostile. A newcomer gets two full
        # steps to land a first canary before the alarm fires; the rule
        # also catches a takeover whose original hearers have all died
        # or drifted off, which the short silence scan above never sees.
        patience = self.params.cw_newcomer_patience
        if patience > 0:
            for uid in [u for u in mem.present_runs if u not in present]:
                del mem.present_runs[uid]
            for uid in present:
                last, run = mem.present_runs.get(uid, (step - 2, 0))
                run = run + 1 if last == step - 1 else 1
                mem.present_runs[uid] = (step, run)
                if (
                    run >= patience
                    and mem.last_seen.get(uid, step - 9) < step - patience
                    and uid not in mem.to_fix
                ):
                    mem.to_fix[uid] = "block"
                    mem.whistle = uid
                    overheard = 1

        # wanted suspects that came into range get repair turns now
        for uid in [u for u, st in mem.to_fix.items() if st == "watch"]:
            if uid in present:
                mem.to_fix[uid] = "block"

        # queue hygiene: a suspect whose canary is back on the air was
        # repaired by another hearer. Drop it if we never acted on it,
        # or fall through to the unblock stage if we placed a block, so
        # service time concentrates on drones that are still silent.
        for uid in [u for u, st in mem.to_fix.items() if st != "allow"]:
            if mem.last_seen.get(uid) == step:
                if mem.to_fix[uid] == "retake":
                    mem.to_fix[uid] = "allow"
                else:
                    del mem.to_fix[uid]

        # receivers ignore the whistle field unless overheard is set,
        # so carrying a stale whistle adds nothing; zeroing it keeps
        # the (0, 0, uid) pattern unambiguous for infected beacons
        frame = pad(self.uid, overheard, mem.whistle if overheard else 0)
        suspects = sorted(u for u, st in mem.to_fix.items() if st != "watch")
        if not suspects:
            return 0, frame

        target = suspects[rng.randrange(len(suspects))]
        stage = mem.to_fix[target]
        if stage == "block":
            if rng.random() <= self.params.cw_skip_block_p:
                mem.to_fix[target] = "allow"
                action = BlueAction(ActionKind.RETAKE_CONTROL, target)
            else:
                mem.to_fix[target] = "retake"
                action = BlueAction(ActionKind.BLOCK_TRAFFIC, target)
        elif stage == "retake":
            mem.to_fix[target] = "allow"
            action = BlueAction(ActionKind.RETAKE_CONTROL, target)
        else:
            del mem.to_fix[target]
            action = BlueAction(ActionKind.ALLOW_TRAFFIC, target)
        return encode_action(action, n), frame


POLICY_CLASSES: dict[str, type[BluePolicy]] = {
    "sleep": SleepPolicy,
    "remove": RemoveSessionsPolicy,
    "retake": RandomRetakePolicy,
    "adv-retake": AdvancedRetakePolicy,
    "adv-block": AdvancedBlockPolicy,
    "random": RandomActionPolicy,
    "cw": CanaryWhistlePolicy,
}


def make_policy(kind: str, uid: int, params: SimParams) -> BluePolicy:
    try:
        cls = POLICY_CLASSES[kind]
    except KeyError:
        raise ValueError(f"no scripted policy for slot kind {kind!r}") from None
    return cls(uid, params)
