"""Environment-agnostic types shared by both grid worlds.

Coordinates are (x, y) with x the column and y the row; (0, 0) is the
top-left cell of the ASCII layout.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, asdict
from typing import Any, Optional

AgentId = int
Cell = tuple[int, int]

AGENT_NAMES = ("Alice", "Bob")

# Cardinal moves, in the fixed tie-break order used everywhere.
DIRECTIONS: dict[str, tuple[int, int]] = {
    "up": (0, -1),
    "down": (0, 1),
    "left": (-1, 0),
    "right": (1, 0),
}


def fork_rng(seed: int | str, label: str) -> random.Random:
    """Derive an independent, reproducible stream for one consumer."""
    return random.Random(f"{seed}/{label}")


@dataclass(frozen=True)
class Observation:
    """What one agent sees at one tick.

    ``visible`` is an environment-specific value: the full state for the
    fully observable world, a room-limited view for the kitchen.  Feedback
    is attached only on the tick it is delivered.
    """

    agent: AgentId
    visible: Any
    feedback: Optional[Any] = None  # FeedbackMessage, kept loose to avoid cycles


@dataclass
class EpisodeStatus:
    timestep: int
    done_per_agent: list[bool]
    terminated: bool
    reason: Optional[str] = None  # "all-done" | "horizon"


@dataclass
class AgentSpec:
    """Per-agent scenario entry: true goal, goal hypothesis set, policy knobs."""

    goal: str
    goal_set: list[str]
    policy: str = ""  # defaulted per environment
    beta: float = 5.0
    eps_act: float = 0.1

    def to_json(self) -> dict:
        return {
            "goal": self.goal,
            "goal_set": list(self.goal_set),
            "policy": self.policy,
            "beta": self.beta,
            "eps_act": self.eps_act,
        }

    @classmethod
    def from_json(cls, d: dict) -> "AgentSpec":
        return cls(
            goal=d["goal"],
            goal_set=list(d["goal_set"]),
            policy=d.get("policy", ""),
            beta=float(d.get("beta", 5.0)),
            eps_act=float(d.get("eps_act", 0.1)),
        )


@dataclass
class ScenarioConfig:
    scenario_id: str
    env: str  # "mdkg" | "overcooked"
    layout: list[str]
    agents: list[AgentSpec]
    category: str  # "not-needed" | "useful" | "necessary"
    t_max: int
    seed: int = 42

    def to_json(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "env": self.env,
            "layout": list(self.layout),
            "agents": [a.to_json() for a in self.agents],
            "category": self.category,
            "t_max": self.t_max,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ScenarioConfig":
        return cls(
            scenario_id=d["scenario_id"],
            env=d["env"],
            layout=list(d["layout"]),
            agents=[AgentSpec.from_json(a) for a in d["agents"]],
            category=d["category"],
            t_max=int(d["t_max"]),
            seed=int(d.get("seed", 42)),
        )


class ScenarioError(ValueError):
    """Raised when a scenario fails validation before the episode starts."""


@dataclass
class EpisodeLog:
    """Per-tick records plus one terminal metrics record, JSONL-serialisable."""

    scenario_id: str
    seed: int
    records: list[dict] = field(default_factory=list)
    terminal: dict = field(default_factory=dict)

    def add(self, record: dict) -> None:
        self.records.append(record)

    def to_jsonl(self) -> str:
        lines = [json.dumps(r, sort_keys=True) for r in self.records]
        lines.append(json.dumps(self.terminal, sort_keys=True))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str, scenario_id: str = "", seed: int = 0) -> "EpisodeLog":
        rows = [json.loads(line) for line in text.strip().splitlines()]
        terminal = rows[-1] if rows and rows[-1].get("type") == "end" else {}
        records = rows[:-1] if terminal else rows
        return cls(scenario_id=scenario_id, seed=seed, records=records, terminal=terminal)

    @property
    def length(self) -> int:
        return int(self.terminal.get("length", len(self.records)))

    @property
    def success(self) -> bool:
        return bool(self.terminal.get("success", False))

    @property
    def feedback_count(self) -> int:
        return int(self.terminal.get("feedback_count", 0))
