"""Reference facilitators behind the same interface: no-op, random, and a
ground-truth-goal oracle."""

from __future__ import annotations

import random
from typing import Optional

from .core import ScenarioConfig
from .facilitator import ProsocialFacilitator
from .feedback import FeedbackMessage


class NullFacilitator:
    """Never communicates; defines the no-feedback baseline episode length."""

    kind = "none"

    def __init__(self, env_kind: str, rng: random.Random):
        self.decisions: list[dict] = []

    def reset(self, scenario: ScenarioConfig, state0) -> None:
        self.decisions = []

    def update(self, prev_state, joint, new_state, delivered=None) -> None:
        pass

    def decide(self, state, pending_any: bool) -> Optional[FeedbackMessage]:
        return None


class RandomFacilitator(ProsocialFacilitator):
    """Uniform candidate choice, communicated with probability one half.
    Candidates are constructed exactly as for the utility-based facilitator,
    and delivery pauses while a directive is executing."""

    kind = "random"

    def __init__(self, env_kind: str, rng: random.Random, communicate_prob: float = 0.5):
        super().__init__(env_kind, rng)
        self.communicate_prob = communicate_prob

    def update(self, prev_state, joint, new_state, delivered=None) -> None:
        pass  # no inference needed

    def decide(self, state, pending_any: bool) -> Optional[FeedbackMessage]:
        record = {"t": state.timestep, "candidates": [], "selected": None}
        if pending_any:
            self.decisions.append(record)
            return None
        candidates = self.construct_candidates(state)
        record["candidates"] = [m.to_json() for m in candidates]
        chosen = None
        if candidates and self.rng.random() < self.communicate_prob:
            chosen = self.rng.choice(candidates)
            record["selected"] = chosen.message_id
        self.decisions.append(record)
        return chosen


class OracleFacilitator(ProsocialFacilitator):
    """Identical pipeline with the aggregated posteriors replaced by point
    masses on the scenario's true goals."""

    kind = "oracle"

    def reset(self, scenario: ScenarioConfig, state0) -> None:
        self.posterior_override = [
            {g: (1.0 if g == a.goal else 0.0) for g in a.goal_set}
            for a in scenario.agents
        ]
        super().reset(scenario, state0)


FACILITATOR_KINDS = {
    "none": NullFacilitator,
    "random": RandomFacilitator,
    "oracle": OracleFacilitator,
    "prosocial": ProsocialFacilitator,
}


def make_facilitator(kind: str, env_kind: str, rng: random.Random, **kwargs):
    try:
        cls = FACILITATOR_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown facilitator kind {kind!r}") from None
    return cls(env_kind, rng, **kwargs)
