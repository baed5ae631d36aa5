"""swarmguard: deterministic drone-swarm network defence simulator.

A two-dimensional swarm relays peer-to-peer traffic over a radio mesh
while firmware malware takes drones over; blue agents sweep sessions,
retake drones and manage traffic blocks. The package ships scripted
baseline defenders, a canary/whistle expert agent, a batch evaluation
harness and a subprocess bridge for external learners.
"""

__version__ = "0.1.0"

from swarmguard.config import EpisodeConfig, SimParams, parse_team
from swarmguard.env import DroneSwarmEnv, StepResult
from swarmguard.harness import EvaluationReport, evaluate, run_episode

__all__ = [
    "EpisodeConfig",
    "SimParams",
    "parse_team",
    "DroneSwarmEnv",
    "StepResult",
    "EvaluationReport",
    "evaluate",
    "run_episode",
    "__version__",
]
