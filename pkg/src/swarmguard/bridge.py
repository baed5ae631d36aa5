"""Subprocess bridge: a framed JSON protocol over stdin/stdout.

Frame format: a 4-byte big-endian payload length followed by that many
bytes of UTF-8 JSON. Protocol version 1 requests:

    {"op": "hello", "version": 1}
    {"op": "reset", "config": {...}}          config mirrors EpisodeConfig
    {"op": "step", "actions": {"agent_3": [55, 0], ...}}
    {"op": "close"}

Every request gets exactly one response frame with the same "op" (or
"error"). Observations are flat integer lists keyed by external slot
labels; rewards are the shared team scalar.
"""

from __future__ import annotations

import json
import struct
import sys
from dataclasses import asdict

from swarmguard.config import EpisodeConfig
from swarmguard.env import DroneSwarmEnv

PROTOCOL_VERSION = 1
_HEADER = struct.Struct(">I")
MAX_FRAME = 1 << 24


def write_frame(stream, payload: dict) -> None:
    data = json.dumps(payload, separators=(",", ":")).encode()
    stream.write(_HEADER.pack(len(data)))
    stream.write(data)
    stream.flush()


def read_frame(stream) -> dict | None:
    header = stream.read(_HEADER.size)
    if len(header) < _HEADER.size:
        return None
    (length,) = _HEADER.unpack(header)
    if length > MAX_FRAME:
        raise ValueError(f"frame of {length} bytes exceeds limit")
    data = stream.read(length)
    if len(data) < length:
        return None
    return json.loads(data)


def _obs_payload(observations) -> dict:
    return {label: [int(v) for v in obs] for label, obs in observations.items()}


def serve(stdin=None, stdout=None) -> None:
    """Run the request loop until close or EOF."""
    stdin = stdin or sys.stdin.buffer
    stdout = stdout or sys.stdout.buffer
    env: DroneSwarmEnv | None = None

    while True:
        try:
            request = read_frame(stdin)
        except (ValueError, json.JSONDecodeError) as exc:
            write_frame(stdout, {"op": "error", "message": str(exc)})
            continue
        if request is None:
            return
        op = request.get("op")
        try:
            if op == "hello":
                version = request.get("version")
                if version != PROTOCOL_VERSION:
                    raise ValueError(
                        f"unsupported protocol version {version!r}"
                    )
                write_frame(
                    stdout,
                    {
                        "op": "hello",
                        "version": PROTOCOL_VERSION,
                        "package": "swarmguard",
                    },
                )
            elif op == "reset":
                config = EpisodeConfig.from_dict(request["config"])
                env = DroneSwarmEnv(config)
                observations = env.reset()
                write_frame(
                    stdout,
                    {
                        "op": "reset",
                        "observations": _obs_payload(observations),
                        "spaces": env.space_descriptor(),
                    },
                )
            elif op == "step":
                if env is None:
                    raise ValueError("step before reset")
                result = env.step(request.get("actions") or {})
                write_frame(
                    stdout,
                    {
                        "op": "step",
                        "observations": _obs_payload(result.observations),
                        "reward": result.team_reward,
                        "rewards": {
                            label: result.team_reward
                            for label in result.observations
                        },
                        "done": result.done,
                        "step": result.step,
                        "events": [
                            {**asdict(ev), "kind": ev.kind.value}
                            for ev in result.events
                        ],
                        "invalid_actions": result.invalid_actions,
                    },
                )
            elif op == "close":
                write_frame(stdout, {"op": "close"})
                return
            else:
                raise ValueError(f"unknown op {op!r}")
        except Exception as exc:  # protocol errors must not kill the server
            write_frame(stdout, {"op": "error", "message": str(exc)})
