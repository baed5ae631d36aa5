"""Batch evaluation harness: reproducibility, aggregation, report formats."""

import pytest

from swarmguard.config import EpisodeConfig, SimParams
from swarmguard.harness import (
    EvaluationReport,
    InvariantViolation,
    emit_csv,
    emit_histogram_csv,
    emit_sweep_csv,
    emit_table,
    evaluate,
    mean_confidence,
    run_episode,
    substitution_sweep,
)

SLEEP18 = ("sleep",) * 18


def sleep_config(seed=101, **kw):
    return EpisodeConfig(seed=seed, team=SLEEP18, **kw)


# -- single episodes -----------------------------------------------------------


def test_run_episode_is_deterministic():
    a = run_episode(sleep_config(), 2)
    b = run_episode(sleep_config(), 2)
    assert a == b


def test_episode_index_offsets_the_seed():
    cfg = sleep_config(seed=300)
    shifted = run_episode(cfg, 5)
    direct = run_episode(cfg.with_seed(305), 0)
    assert shifted.seed == 305
    assert shifted.score == direct.score
    assert shifted.steps == direct.steps


def test_run_episode_rejects_external_slots():
    cfg = EpisodeConfig(seed=1, team=("external",) + ("cw",) * 17)
    with pytest.raises(ValueError):
        run_episode(cfg)


def test_episode_score_matches_event_sum_sign():
    res = run_episode(sleep_config(), 0)
    assert res.score <= 0
    assert res.steps <= 500
    assert set(res.event_counts) == {
        "blocked",
        "intercepted",
        "dropped_bandwidth",
        "unroutable",
        "compromise_penalty",
    }


def test_quiet_scenario_scores_zero():
    # a 20x20 patrol box keeps every pair inside radio range, so with
    # malware disabled no message can ever be lost
    cfg = EpisodeConfig(
        seed=1,
        team=SLEEP18,
        horizon=30,
        sim=SimParams(activation_p=0.0, swarm_spread=40.0),
    )
    res = run_episode(cfg)
    assert res.score == 0.0
    assert res.steps == 30
    assert all(v == 0 for v in res.event_counts.values())


def test_step_invariants_trip_on_impossible_rewards():
    cfg = sleep_config(horizon=5, sim=SimParams(activation_p=0.0))

    class Res:
        events = ()
        team_reward = 1.0
        step = 0

    from swarmguard.harness import _check_step_invariants

    with pytest.raises(InvariantViolation):
        _check_step_invariants(Res(), cfg)
    Res.team_reward = -19.0  # below the one-unit-per-drone floor
    with pytest.raises(InvariantViolation):
        _check_step_invariants(Res(), cfg)


# -- evaluation runs -----------------------------------------------------------


def test_evaluate_aggregates_in_index_order():
    report = evaluate(sleep_config(), episodes=4)
    assert [e.index for e in report.episodes] == [0, 1, 2, 3]
    assert [e.seed for e in report.episodes] == [101, 102, 103, 104]
    assert report.mean == sum(report.scores) / 4


def test_worker_count_does_not_change_results():
    serial = evaluate(sleep_config(), episodes=6, workers=1)
    pooled = evaluate(sleep_config(), episodes=6, workers=2)
    assert serial.scores == pooled.scores


def test_standin_fills_external_slots():
    cfg = EpisodeConfig(seed=101, team=("external",) * 18)
    report = evaluate(cfg, episodes=2, standin="sleep")
    assert report.config.team == SLEEP18
    baseline = evaluate(sleep_config(), episodes=2)
    assert report.scores == baseline.scores


def test_evaluate_requires_a_standin_for_external_slots():
    cfg = EpisodeConfig(seed=1, team=("external",) * 18)
    with pytest.raises(ValueError):
        evaluate(cfg, episodes=1)


def test_report_json_round_trip():
    report = evaluate(sleep_config(), episodes=3, label="floor")
    clone = EvaluationReport.from_json(report.to_json())
    assert clone.label == "floor"
    assert clone.scores == report.scores
    assert clone.summary() == report.summary()


def test_mean_confidence_shrinks_with_more_episodes():
    small = evaluate(sleep_config(), episodes=4)
    big = evaluate(sleep_config(), episodes=16)
    _, se_small = mean_confidence(small)
    _, se_big = mean_confidence(big)
    assert se_small > 0
    assert se_big < se_small * 1.5  # same spread, quadruple the sample


# -- action histograms -----------------------------------------------------------


def test_histogram_of_a_sleep_team_is_all_sleep():
    report = evaluate(sleep_config(), episodes=3)
    hist = report.action_histogram()
    assert hist["sleep"] > 0
    assert sum(v for k, v in hist.items() if k != "sleep") == 0


def test_histogram_of_a_remove_team_is_all_remove():
    report = evaluate(EpisodeConfig(seed=101, team=("remove",) * 18), episodes=3)
    hist = report.action_histogram()
    assert hist["remove_other_sessions"] > 0
    assert sum(v for k, v in hist.items() if k != "remove_other_sessions") == 0


# -- substitution sweep ------------------------------------------------------------


def test_sweep_endpoints_match_pure_teams():
    base = EpisodeConfig(seed=101, horizon=60)
    sweep = substitution_sweep(base, ks=[0, 18], substitute="sleep", episodes=3)
    assert [k for k, _ in sweep] == [0, 18]
    pure_cw = evaluate(
        EpisodeConfig(seed=101, horizon=60, team=("cw",) * 18), episodes=3
    )
    pure_sleep = evaluate(
        EpisodeConfig(seed=101, horizon=60, team=SLEEP18), episodes=3
    )
    assert sweep[0][1].scores == pure_cw.scores
    assert sweep[1][1].scores == pure_sleep.scores


def test_sweep_rejects_out_of_range_k():
    with pytest.raises(ValueError):
        substitution_sweep(sleep_config(), ks=[19], substitute="sleep", episodes=1)


# -- emitters ---------------------------------------------------------------------


def test_csv_layout_and_determinism():
    report = evaluate(sleep_config(), episodes=3)
    text = emit_csv(report)
    lines = text.split("\n")
    assert lines[0] == (
        "episode,seed,score,steps,blocked,intercepted,dropped_bandwidth,"
        "unroutable,compromise_penalty,fingerprint"
    )
    assert len(lines) == 5  # header + 3 rows + trailing newline
    again = emit_csv(evaluate(sleep_config(), episodes=3))
    assert again == text


def test_histogram_csv_lists_every_action_kind():
    report = evaluate(sleep_config(), episodes=1)
    lines = emit_histogram_csv(report).strip().split("\n")
    assert lines[0] == "action,count"
    names = [line.split(",")[0] for line in lines[1:]]
    assert names == [
        "remove_other_sessions",
        "retake_control",
        "block_traffic",
        "allow_traffic",
        "sleep",
    ]


def test_sweep_csv_has_one_row_per_k():
    base = EpisodeConfig(seed=101, horizon=40)
    sweep = substitution_sweep(base, ks=[0, 9], substitute="sleep", episodes=2)
    lines = emit_sweep_csv(sweep).strip().split("\n")
    assert lines[0] == "k,label,episodes,mean,std,fingerprint"
    assert len(lines) == 3
    assert lines[1].startswith("0,k=0,2,")
    assert lines[2].startswith("9,k=9,2,")


def test_table_mentions_the_label_and_mean():
    report = evaluate(sleep_config(), episodes=2, label="floor")
    table = emit_table(report)
    assert "floor" in table
    assert f"{report.mean:.1f}" in table
