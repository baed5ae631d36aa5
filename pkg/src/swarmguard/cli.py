"""Command line interface.

Subcommands:
    eval          evaluate a team over many episodes
    sweep         substitution sweep over expert/stand-in mixes
    hist          action histogram of a sampled agent per episode
    trace         dump a native episode stream for bridge parity checks
    bridge-serve  framed JSON protocol server on stdin/stdout
    bench         compare the compiled and pure kernel backends
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from swarmguard import __version__
from swarmguard.config import EpisodeConfig, parse_team
from swarmguard.harness import (
    InvariantViolation,
    emit_csv,
    emit_histogram_csv,
    emit_sweep_csv,
    emit_table,
    evaluate,
    substitution_sweep,
)

EXIT_INVARIANT = 2


def _load_config(args) -> EpisodeConfig:
    if args.config:
        cfg = EpisodeConfig.from_json(Path(args.config).read_text())
    else:
        cfg = EpisodeConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.team:
        cfg.team = parse_team(args.team, cfg.sim.n_drones)
    if args.obs:
        cfg.observation_mode = args.obs
    if args.reward:
        cfg.reward_mode = args.reward
    if args.messages:
        cfg.include_messages = True
    if args.horizon is not None:
        cfg.horizon = args.horizon
    if args.hosting is not None:
        cfg.randomize_hosting = args.hosting == "random"
    if args.malware_off:
        cfg.sim.activation_p = 0.0
    cfg.validate()
    return cfg


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="path to an EpisodeConfig JSON file")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--team", help='composition, e.g. "cw:18" or "cw:7,external:11"')
    p.add_argument("--obs", choices=("standard", "improved"), default=None)
    p.add_argument("--reward", choices=("noisy", "denoised"), default=None)
    p.add_argument("--messages", action="store_true", help="include message bits")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--hosting", choices=("random", "fixed"), default=None)
    p.add_argument("--malware-off", action="store_true", help="disable activation")
    p.add_argument("--episodes", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--standin", help="scripted kind substituted into external slots")
    p.add_argument("--format", choices=("csv", "json", "table"), default="table")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--label", default="")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_eval(args) -> int:
    cfg = _load_config(args)
    report = evaluate(
        cfg, args.episodes, label=args.label, standin=args.standin, workers=args.workers
    )
    if args.format == "csv":
        _emit(emit_csv(report), args.out)
    elif args.format == "json":
        _emit(report.to_json() + "\n", args.out)
    else:
        _emit(emit_table(report), args.out)
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    ks = [int(k) for k in args.ks.split(",")]
    sweep = substitution_sweep(
        cfg, ks, substitute=args.substitute, episodes=args.episodes, workers=args.workers
    )
    if args.format == "json":
        payload = [{"k": k, "report": r.to_dict()} for k, r in sweep]
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        _emit(emit_sweep_csv(sweep), args.out)
    return 0


def _cmd_hist(args) -> int:
    cfg = _load_config(args)
    report = evaluate(
        cfg, args.episodes, label=args.label, standin=args.standin, workers=args.workers
    )
    _emit(emit_histogram_csv(report), args.out)
    return 0


def _cmd_trace(args) -> int:
    # native reference stream for the bridge parity tests
    from swarmguard.env import DroneSwarmEnv

    cfg = _load_config(args)
    standin_action = {"sleep": None, "remove": 0}[args.standin or "sleep"]
    env = DroneSwarmEnv(cfg)
    observations = env.reset()
    if standin_action is None:
        standin_action = env.action_space_size() - 1
    steps = []
    while not env.done and len(steps) < args.max_steps:
        actions = {label: [standin_action, 0] for label in env.external_agents}
        res = env.step(actions)
        steps.append(
            {
                "observations": {
                    label: [int(v) for v in obs]
                    for label, obs in res.observations.items()
                },
                "reward": res.team_reward,
                "done": res.done,
            }
        )
    payload = {
        "config": cfg.to_dict(),
        "spaces": env.space_descriptor(),
        "standin_action": standin_action,
        "initial_observations": {
            label: [int(v) for v in obs] for label, obs in observations.items()
        },
        "steps": steps,
    }
    _emit(json.dumps(payload, sort_keys=True) + "\n", args.out)
    return 0


def _cmd_bridge_serve(_args) -> int:
    from swarmguard.bridge import serve

    serve()
    return 0


def _cmd_bench(args) -> int:
    from swarmguard.bench import run_benchmark

    sys.stdout.write(run_benchmark(episodes=args.episodes, seed=args.seed or 2024))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmguard",
        description="drone swarm network defence simulator and evaluation harness",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a team composition")
    _add_common(p_eval)
    p_eval.set_defaults(fn=_cmd_eval)

    p_sweep = sub.add_parser("sweep", help="expert/stand-in substitution sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--ks", default="0,6,12,18", help="comma separated k values")
    p_sweep.add_argument("--substitute", default="sleep")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_hist = sub.add_parser("hist", help="sampled-agent action histogram")
    _add_common(p_hist)
    p_hist.set_defaults(fn=_cmd_hist)

    p_trace = sub.add_parser("trace", help="dump a native episode stream as JSON")
    _add_common(p_trace)
    p_trace.add_argument("--max-steps", type=int, default=600)
    p_trace.set_defaults(fn=_cmd_trace)

    p_serve = sub.add_parser("bridge-serve", help="serve the subprocess bridge")
    p_serve.set_defaults(fn=_cmd_bridge_serve)

    p_bench = sub.add_parser("bench", help="benchmark kernel backends")
    p_bench.add_argument("--episodes", type=int, default=3)
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.set_defaults(fn=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
