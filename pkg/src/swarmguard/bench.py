"""Backend benchmark: compiled kernels against their pure Python twin."""

from __future__ import annotations

import time

import numpy as np

from swarmguard._kernels import backend_name, get_backend
from swarmguard.config import EpisodeConfig, parse_team
from swarmguard.harness import run_episode


def _bench_kernels(backend, n: int = 18, repeats: int = 2000, seed: int = 7) -> dict:
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0, 100, size=n)
    ys = rng.uniform(0, 100, size=n)
    masks = np.zeros(n, dtype=np.uint32)
    t0 = time.perf_counter()
    for _ in range(repeats):
        backend.adjacency_masks(xs, ys, 30.0, masks)
    t1 = time.perf_counter()
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    t2 = time.perf_counter()
    for _ in range(max(1, repeats // 10)):
        for i, j in pairs:
            backend.route_lexmin(masks, n, i, j)
    t3 = time.perf_counter()
    routes = len(pairs) * max(1, repeats // 10)
    return {
        "adjacency_us": (t1 - t0) / repeats * 1e6,
        "route_us": (t3 - t2) / routes * 1e6,
    }


def _bench_episodes(episodes: int, seed: int) -> float:
    cfg = EpisodeConfig(seed=seed, team=parse_team("cw:18"))
    t0 = time.perf_counter()
    steps = 0
    for i in range(episodes):
        steps += run_episode(cfg, i).steps
    return steps / (time.perf_counter() - t0)


def run_benchmark(episodes: int = 3, seed: int = 2024) -> str:
    """Compare both backends; returns a printable report.

    The episode throughput row uses whichever backend is active for
    this process (kernel selection happens at import time), so the
    micro-benchmarks are the cross-backend comparison.
    """
    lines = [f"active backend: {backend_name()}"]
    backends = ["pure"]
    try:
        get_backend("compiled")
        backends.append("compiled")
    except ImportError:
        lines.append("compiled backend not built; showing pure only")

    stats = {}
    for name in backends:
        stats[name] = _bench_kernels(get_backend(name))
        lines.append(
            f"{name:>9}: adjacency {stats[name]['adjacency_us']:8.2f} us   "
            f"route {stats[name]['route_us']:8.2f} us"
        )
    if len(backends) == 2:
        lines.append(
            "  speedup: adjacency x{:.1f}, route x{:.1f}".format(
                stats["pure"]["adjacency_us"] / stats["compiled"]["adjacency_us"],
                stats["pure"]["route_us"] / stats["compiled"]["route_us"],
            )
        )
    sps = _bench_episodes(episodes, seed)
    lines.append(f"episode throughput ({backend_name()}): {sps:,.0f} steps/s")
    return "\n".join(lines) + "\n"
