"""Red team mechanics: activation, escalation, switching, strategies."""

from __future__ import annotations

import random

from swarmguard.redteam import (
    N_STRATEGIES,
    Strategy,
    activation_phase,
    escalate_and_switch,
    red_actions,
    red_phase,
)
from swarmguard.world import Controller, SwarmState

from conftest import line_coords, make_params, make_state


def all_blue(state):
    return (state.controller == Controller.BLUE).all()


def test_activation_disabled_never_strikes():
    state = SwarmState(make_params(activation_p=0.0), seed=1)
    for _ in range(500):
        activation_phase(state)
    assert all_blue(state)


def test_activation_certain_strikes_exactly_one_drone():
    state = SwarmState(make_params(activation_p=1.0), seed=2)
    activation_phase(state)
    assert state.red_high_count() == 1
    uid = int(state.controller.argmax())
    assert 0 <= state.red_strategy[uid] < N_STRATEGIES
    assert state.red_created[uid] == -1  # acts this same step


def test_activation_strike_on_red_drone_is_wasted():
    state = SwarmState(make_params(activation_p=1.0), seed=3)
    state.controller[:] = Controller.RED_HIGH
    strategies = state.red_strategy.copy()
    activation_phase(state)
    assert (state.controller == Controller.RED_HIGH).all()
    assert (state.red_strategy == strategies).all()


def test_activation_rate_near_five_percent():
    state = SwarmState(make_params(), seed=4)
    hits = 0
    for _ in range(20000):
        state.controller[:] = Controller.BLUE
        activation_phase(state)
        if state.red_high_count():
            hits += 1
    assert 0.042 <= hits / 20000 <= 0.058


def test_low_session_escalates_exactly_one_step_later():
    state = make_state(line_coords(3), switch_p=0.0)
    state.step_index = 10
    state.controller[1] = Controller.RED_LOW
    state.red_created[1] = 10

    escalate_and_switch(state)  # same step: survives as low
    assert state.controller[1] == Controller.RED_LOW

    state.step_index = 11
    escalate_and_switch(state)  # one step later: escalation cannot fail
    assert state.controller[1] == Controller.RED_HIGH
    assert 0 <= state.red_strategy[1] < N_STRATEGIES


def test_switch_disabled_keeps_strategy():
    state = make_state(line_coords(2), switch_p=0.0)
    state.controller[0] = Controller.RED_HIGH
    state.red_strategy[0] = Strategy.INTERCEPT
    for _ in range(200):
        escalate_and_switch(state)
    assert state.red_strategy[0] == Strategy.INTERCEPT


def test_switch_certain_redraws_uniformly():
    state = make_state(line_coords(2), switch_p=1.0)
    state.controller[0] = Controller.RED_HIGH
    state.red_strategy[0] = 0
    seen = [0] * N_STRATEGIES
    for _ in range(6000):
        escalate_and_switch(state)
        seen[int(state.red_strategy[0])] += 1
    # uniform redraw: each strategy lands near 1000 draws
    assert all(800 <= c <= 1200 for c in seen), seen


def test_switch_rate_near_ten_percent():
    class CountingRng(random.Random):
        redraws = 0

        def randrange(self, *a, **k):
            self.redraws += 1
            return super().randrange(*a, **k)

    state = make_state(line_coords(2))
    counter = CountingRng(99)
    state.rngs["red"] = counter
    state.controller[0] = Controller.RED_HIGH
    state.red_strategy[0] = 0
    for _ in range(20000):
        escalate_and_switch(state)
    assert 0.085 <= counter.redraws / 20000 <= 0.115


def test_exploit_sweeps_every_eligible_neighbour():
    # star: host 0 in the middle, five targets in range
    coords = [(50, 50), (50, 70), (50, 30), (70, 50), (30, 50), (65, 65)]
    state = make_state(coords, exploit_success_p=1.0, exploit_flag_p=0.0)
    state.controller[0] = Controller.RED_HIGH
    state.red_strategy[0] = Strategy.EXPLOIT_RANDOM
    red_actions(state)
    assert all(state.controller[j] == Controller.RED_LOW for j in range(1, 6))
    assert all(state.red_created[j] == state.step_index for j in range(1, 6))


def test_exploit_skips_drones_already_hosting_red():
    coords = [(50, 50), (50, 70), (50, 30)]
    state = make_state(coords, exploit_success_p=1.0, exploit_flag_p=0.0)
    state.controller[0] = Controller.RED_HIGH
    state.red_strategy[0] = Strategy.EXPLOIT_RANDOM
    state.controller[1] = Controller.RED_LOW
    state.red_created[1] = -5
    red_actions(state)
    assert state.red_created[1] == -5  # untouched
    assert state.controller[2] == Controller.RED_LOW


def test_exploit_farthest_goes_far_first_under_scarce_bandwidth():
    # two targets; bandwidth budget only affords one attempt
    coords = [(50, 50), (50, 60), (50, 75)]
    state = make_state(
        coords, exploit_success_p=1.0, exploit_flag_p=0.0, exploit_bandwidth=51
    )
    state.controller[0] = Controller.RED_HIGH
    state.red_strategy[0] = Strategy.EXPLOIT_FARTHEST
    red_actions(state)
    assert state.controller[2] == Controller.RED_LOW
    assert state.controller[1] == Controller.BLUE


def test_exploit_respects_blocks():
    state = make_state(line_coords(2), exploit_success_p=1.0, exploit_flag_p=0.0)
    state.controller[0] = Controller.RED_HIGH
    state.red_strategy[0] = Strategy.EXPLOIT_RANDOM
    state.drone(1).block(0)
    red_actions(state)
    assert state.controller[1] == Controller.BLUE


def test_exploit_flags_the_route_when_forced():
    state = make_state(line_coords(2), exploit_success_p=1.0, exploit_flag_p=1.0)
    state.controller[0] = Controller.RED_HIGH
    state.red_strategy[0] = Strategy.EXPLOIT_RANDOM
    red_actions(state)
    assert state.event_counts[0][0] == 1
    assert state.event_counts[1][0] == 1
    assert state.controller[1] == Controller.RED_LOW


def test_event_counts_saturate_at_two():
    state = make_state(line_coords(2), exploit_success_p=0.0, exploit_flag_p=1.0)
    state.controller[0] = Controller.RED_HIGH
    state.red_strategy[0] = Strategy.EXPLOIT_RANDOM
    for _ in range(5):
        state.controller[1] = Controller.BLUE  # keep the target eligible
        state.bandwidth[:] = 0
        red_actions(state)
    assert state.event_counts[1][0] == 2


def test_flood_saturates_target_and_charges_relays():
    state = make_state(line_coords(3))
    state.controller[0] = Controller.RED_HIGH
    state.red_strategy[0] = Strategy.FLOOD_FARTHEST  # farthest is drone 2
    red_actions(state)
    assert state.bandwidth[2] == 100
    assert state.bandwidth[1] == 1  # relay cost
    # flooding is always flagged by every route drone
    assert state.event_counts[0][0] == 1
    assert state.event_counts[1][0] == 1
    assert state.event_counts[2][0] == 1


def test_flood_needs_an_unblocked_route():
    state = make_state(line_coords(2))
    state.controller[0] = Controller.RED_HIGH
    state.red_strategy[0] = Strategy.FLOOD_RANDOM
    state.drone(1).block(0)
    red_actions(state)
    assert state.bandwidth[1] == 0


def test_block_strategy_adds_a_neighbour():
    state = make_state(line_coords(2))
    state.controller[0] = Controller.RED_HIGH
    state.red_strategy[0] = Strategy.BLOCK_RANDOM
    red_actions(state)
    assert state.drone(0).block_list == {1}


def test_intercept_marks_host_and_nothing_else():
    state = make_state(line_coords(3))
    state.controller[1] = Controller.RED_HIGH
    state.red_strategy[1] = Strategy.INTERCEPT
    bw = state.bandwidth.copy()
    blocks = state.block_mask.copy()
    red_actions(state)
    assert state.intercepting == 1 << 1
    assert (state.bandwidth == bw).all()
    assert (state.block_mask == blocks).all()
    assert not state.event_counts.any()


def test_red_phase_never_reduces_high_count():
    rng = random.Random(5)
    for trial in range(30):
        state = SwarmState(make_params(), seed=trial)
        for uid in range(state.n):
            roll = rng.random()
            if roll < 0.2:
                state.controller[uid] = Controller.RED_HIGH
                state.red_strategy[uid] = rng.randrange(N_STRATEGIES)
            elif roll < 0.4:
                state.controller[uid] = Controller.RED_LOW
                state.red_created[uid] = -1
        before = state.red_high_count()
        red_phase(state)
        assert state.red_high_count() >= before
