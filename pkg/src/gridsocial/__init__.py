"""Multi-agent grid worlds with a goal-inferring prosocial feedback
facilitator."""

__version__ = "0.1.0"

from .core import AgentSpec, EpisodeLog, Observation, ScenarioConfig, ScenarioError

__all__ = [
    "AgentSpec",
    "EpisodeLog",
    "Observation",
    "ScenarioConfig",
    "ScenarioError",
]
