"""Configuration parsing, validation, serialization."""

import pytest

from swarmguard.config import EpisodeConfig, SimParams, format_team, parse_team


# -- team strings ------------------------------------------------------------


def test_parse_team_counted_segments():
    team = parse_team("cw:7,external:11")
    assert team == ("cw",) * 7 + ("external",) * 11


def test_parse_team_bare_kind_fills_the_rest():
    assert parse_team("sleep") == ("sleep",) * 18
    assert parse_team("external:1,cw") == ("external",) + ("cw",) * 17


def test_parse_team_respects_n_drones():
    assert parse_team("remove", n_drones=4) == ("remove",) * 4


@pytest.mark.parametrize(
    "spec",
    ["", "ninja:18", "cw:4", "cw:20", "cw:-2,sleep:20", "cw:x,sleep:17"],
)
def test_parse_team_rejects_bad_specs(spec):
    with pytest.raises(ValueError):
        parse_team(spec)


def test_format_team_collapses_runs():
    assert format_team(("cw",) * 7 + ("external",) * 11) == "cw:7,external:11"
    assert format_team(("sleep",) * 18) == "sleep:18"


def test_format_team_round_trips():
    for spec in ["cw:18", "external:1,cw:17", "sleep:5,remove:5,retake:8"]:
        assert format_team(parse_team(spec)) == spec


# -- validation --------------------------------------------------------------


def test_default_config_is_valid_and_cw_filled():
    cfg = EpisodeConfig(seed=1)
    cfg.validate()
    assert cfg.team == ("cw",) * 18
    assert cfg.horizon == 500


def test_team_list_is_coerced_to_tuple():
    cfg = EpisodeConfig(team=["sleep"] * 18)
    assert isinstance(cfg.team, tuple)


@pytest.mark.parametrize("horizon", [0, 501, -3])
def test_horizon_bounds(horizon):
    with pytest.raises(ValueError):
        EpisodeConfig(horizon=horizon).validate()


def test_unknown_modes_rejected():
    with pytest.raises(ValueError):
        EpisodeConfig(observation_mode="fancy").validate()
    with pytest.raises(ValueError):
        EpisodeConfig(reward_mode="shaped").validate()


def test_team_length_must_match_scenario():
    with pytest.raises(ValueError):
        EpisodeConfig(team=("cw",) * 5).validate()


def test_unknown_slot_kind_rejected():
    with pytest.raises(ValueError):
        EpisodeConfig(team=("cw",) * 17 + ("red",)).validate()


@pytest.mark.parametrize(
    "kw",
    [
        {"n_drones": 1},
        {"n_drones": 33},
        {"pause_min": 30, "pause_max": 20},
        {"pause_min": -1},
        {"swarm_spread": 50.0},
        {"swarm_spread": -1.0},
    ],
)
def test_sim_params_validation(kw):
    with pytest.raises(ValueError):
        SimParams(**kw).validate()


def test_sim_params_defaults_are_valid():
    SimParams().validate()


# -- serialization -----------------------------------------------------------


def test_dict_round_trip_preserves_everything():
    cfg = EpisodeConfig(
        seed=77,
        horizon=120,
        observation_mode="improved",
        include_messages=True,
        reward_mode="denoised",
        team=("external",) * 2 + ("cw",) * 16,
        randomize_hosting=False,
        sim=SimParams(n_drones=18, activation_p=0.02, cw_scan_window=5),
    )
    clone = EpisodeConfig.from_dict(cfg.to_dict())
    assert clone == cfg
    assert clone.sim.cw_scan_window == 5


def test_json_round_trip():
    cfg = EpisodeConfig(seed=5, team=("sleep",) * 18)
    clone = EpisodeConfig.from_json(cfg.to_json())
    assert clone == cfg


def test_with_seed_changes_only_the_seed():
    cfg = EpisodeConfig(seed=1, horizon=99)
    other = cfg.with_seed(8)
    assert other.seed == 8
    assert other.horizon == 99
    assert cfg.seed == 1


def test_fingerprint_is_stable_and_seed_sensitive():
    a = EpisodeConfig(seed=3).fingerprint()
    b = EpisodeConfig(seed=3).fingerprint()
    c = EpisodeConfig(seed=4).fingerprint()
    assert a == b
    assert a != c
    assert len(a) == 16
    int(a, 16)  # hex digest prefix
