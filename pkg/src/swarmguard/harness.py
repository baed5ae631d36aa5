"""Batch evaluation: run many episodes, aggregate scores, emit reports.

Episode i of a run uses seed (master_seed + i), so results are
reproducible and independent of worker count or completion order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import asdict, dataclass, field
from multiprocessing import get_context

from swarmguard.blueteam import ActionKind, decode_action
from swarmguard.config import EpisodeConfig, format_team
from swarmguard.env import DroneSwarmEnv
from swarmguard.rng import substream
from swarmguard.traffic import EventKind

ACTION_KIND_NAMES = [k.name.lower() for k in ActionKind]


@dataclass
class EpisodeResult:
    index: int
    seed: int
    score: float
    steps: int
    event_counts: dict[str, int]
    sampled_slot: int
    sampled_actions: dict[str, int]

    def row(self) -> dict:
        d = {
            "episode": self.index,
            "seed": self.seed,
            "score": self.score,
            "steps": self.steps,
        }
        for kind in EventKind:
            d[kind.value] = self.event_counts.get(kind.value, 0)
        return d


@dataclass
class EvaluationReport:
    label: str
    config: EpisodeConfig
    episodes: list[EpisodeResult] = field(default_factory=list)

    @property
    def scores(self) -> list[float]:
        return [e.score for e in self.episodes]

    @property
    def mean(self) -> float:
        return statistics.fmean(self.scores)

    @property
    def std(self) -> float:
        if len(self.scores) < 2:
            return 0.0
        return statistics.stdev(self.scores)

    def action_histogram(self) -> dict[str, int]:
        """Action counts of one randomly sampled agent per episode."""
        hist = {name: 0 for name in ACTION_KIND_NAMES}
        for ep in self.episodes:
            for name, count in ep.sampled_actions.items():
                hist[name] += count
        return hist

    def fingerprint(self) -> str:
        return self.config.fingerprint()

    def summary(self) -> dict:
        return {
            "label": self.label,
            "team": format_team(self.config.team),
            "episodes": len(self.episodes),
            "mean": round(self.mean, 4),
            "std": round(self.std, 4),
            "min": min(self.scores),
            "max": max(self.scores),
            "fingerprint": self.fingerprint(),
        }

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "config": self.config.to_dict(),
            "summary": self.summary(),
            "action_histogram": self.action_histogram(),
            "episodes": [asdict(e) for e in self.episodes],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationReport":
        return cls(
            label=d["label"],
            config=EpisodeConfig.from_dict(d["config"]),
            episodes=[EpisodeResult(**e) for e in d["episodes"]],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EvaluationReport":
        return cls.from_dict(json.loads(text))


class InvariantViolation(RuntimeError):
    """A per-step or per-episode scoring invariant failed."""


def run_episode(config: EpisodeConfig, index: int = 0) -> EpisodeResult:
    """Run one fully scripted episode and collect scoring data."""
    seed = config.seed + index
    cfg = config.with_seed(seed)
    if "external" in cfg.team:
        raise ValueError("run_episode cannot drive external slots; use a stand-in")
    env = DroneSwarmEnv(cfg)
    env.reset()
    n = cfg.sim.n_drones

    sampled_slot = substream(config.seed, f"hist:{index}").randrange(n)
    sampled_label = f"agent_{sampled_slot}"
    sampled_actions = {name: 0 for name in ACTION_KIND_NAMES}

    total = 0.0
    steps = 0
    counts: dict[str, int] = {k.value: 0 for k in EventKind}
    while not env.done:
        res = env.step({})
        steps += 1
        total += res.team_reward
        for ev in res.events:
            counts[ev.kind.value] += 1
        index_taken = res.actions_taken.get(sampled_label)
        if index_taken is not None:
            kind = decode_action(index_taken, n).kind
            sampled_actions[kind.name.lower()] += 1
        _check_step_invariants(res, cfg)

    if not -n * cfg.horizon <= total <= 0:
        raise InvariantViolation(f"episode score {total} outside bounds")
    return EpisodeResult(
        index=index,
        seed=seed,
        score=total,
        steps=steps,
        event_counts=counts,
        sampled_slot=sampled_slot,
        sampled_actions=sampled_actions,
    )


def _check_step_invariants(res, cfg: EpisodeConfig) -> None:
    n = cfg.sim.n_drones
    penalty = sum(
        ev.magnitude for ev in res.events if ev.kind == EventKind.COMPROMISE_PENALTY
    )
    # outside the terminal penalty a step can lose at most one unit per message
    if res.team_reward - penalty < -n:
        raise InvariantViolation(
            f"step reward {res.team_reward} below floor at step {res.step}"
        )
    if res.team_reward > 0:
        raise InvariantViolation("positive step reward")


def _substituted(config: EpisodeConfig, kind: str) -> EpisodeConfig:
    team = tuple(kind if k == "external" else k for k in config.team)
    cfg = EpisodeConfig.from_dict(config.to_dict())
    cfg.team = team
    return cfg


def _episode_task(args) -> EpisodeResult:
    config_dict, index = args
    return run_episode(EpisodeConfig.from_dict(config_dict), index)


def evaluate(
    config: EpisodeConfig,
    episodes: int,
    label: str = "",
    standin: str | None = None,
    workers: int = 1,
) -> EvaluationReport:
    """Run `episodes` scripted episodes and aggregate them.

    `standin` substitutes a scripted policy kind into external slots
    (evaluation needs every slot scripted). With workers > 1 episodes
    are distributed across processes; aggregation is order independent.
    """
    config.validate()
    if standin is not None:
        config = _substituted(config, standin)
    elif "external" in config.team:
        raise ValueError("external slots present and no --standin given")
    label = label or format_team(config.team)

    results: list[EpisodeResult]
    if workers > 1 and episodes > 1:
        tasks = [(config.to_dict(), i) for i in range(episodes)]
        with get_context("fork").Pool(workers) as pool:
            results = pool.map(_episode_task, tasks, chunksize=8)
    else:
        results = [run_episode(config, i) for i in range(episodes)]
    results.sort(key=lambda r: r.index)
    return EvaluationReport(label=label, config=config, episodes=results)


def substitution_sweep(
    base_config: EpisodeConfig,
    ks: list[int],
    substitute: str,
    episodes: int,
    workers: int = 1,
) -> list[tuple[int, EvaluationReport]]:
    """Replace k expert slots with `substitute` for each k and evaluate.

    Hosting is randomized so the substituted slots land on random
    drones each episode.
    """
    n = base_config.sim.n_drones
    out = []
    for k in ks:
        if not 0 <= k <= n:
            raise ValueError(f"k={k} out of range")
        cfg = EpisodeConfig.from_dict(base_config.to_dict())
        cfg.team = (substitute,) * k + ("cw",) * (n - k)
        cfg.randomize_hosting = True
        report = evaluate(cfg, episodes, label=f"k={k}", workers=workers)
        out.append((k, report))
    return out


# -- report emission ---------------------------------------------------------


def emit_csv(report: EvaluationReport) -> str:
    """Per-episode rows plus one header; byte-identical across runs."""
    fingerprint = report.fingerprint()
    buf = io.StringIO()
    rows = [ep.row() for ep in report.episodes]
    fields = list(rows[0].keys()) + ["fingerprint"] if rows else ["fingerprint"]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        row["fingerprint"] = fingerprint
        writer.writerow(row)
    return buf.getvalue()


def emit_sweep_csv(sweep: list[tuple[int, EvaluationReport]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "label", "episodes", "mean", "std", "fingerprint"])
    for k, report in sweep:
        s = report.summary()
        writer.writerow(
            [k, s["label"], s["episodes"], s["mean"], s["std"], s["fingerprint"]]
        )
    return buf.getvalue()


def emit_histogram_csv(report: EvaluationReport) -> str:
    hist = report.action_histogram()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["action", "count"])
    for name in ACTION_KIND_NAMES:
        writer.writerow([name, hist[name]])
    return buf.getvalue()


def emit_table(report: EvaluationReport) -> str:
    s = report.summary()
    lines = [
        f"label        {s['label']}",
        f"team         {s['team']}",
        f"episodes     {s['episodes']}",
        f"mean score   {s['mean']:.1f}",
        f"std          {s['std']:.1f}",
        f"min / max    {s['min']:.1f} / {s['max']:.1f}",
        f"fingerprint  {s['fingerprint']}",
    ]
    return "\n".join(lines) + "\n"


def mean_confidence(report: EvaluationReport) -> tuple[float, float]:
    """Mean and its standard error."""
    scores = report.scores
    if len(scores) < 2:
        return (report.mean, 0.0)
    return (report.mean, statistics.stdev(scores) / math.sqrt(len(scores)))
