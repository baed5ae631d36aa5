"""Named deterministic random substreams.

Each episode owns four independent generators so that changes in one
phase's draw pattern never perturb the others:

    motion      waypoints, dwell times, initial positions
    red         activation, strategy draws, red action randomness
    green       message recipients
    blue-noise  blue action outcome rolls and scripted policy choices

Streams are seeded by hashing (seed, name); string hashing via hash()
is process-randomized and must not be used here.
"""

from __future__ import annotations

import hashlib
import random

STREAM_NAMES = ("motion", "red", "green", "blue-noise")


def substream(seed: int, name: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))


def make_streams(seed: int) -> dict[str, random.Random]:
    return {name: substream(seed, name) for name in STREAM_NAMES}
