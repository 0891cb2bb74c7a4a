"""Synchronous episode loop shared by the headless harness and the play
service.

Tick ordering: agents act from their observations (which carry any feedback
emitted last tick), the environment steps, then the facilitator sees the
joint action and the post-step state and may emit feedback for delivery at
the next tick.  Everything is deterministic given the scenario seed.
"""

from __future__ import annotations

import random
from typing import Optional

from . import mdkg, overcooked as oc
from .agents import AgentRuntime
from .baselines import NullFacilitator, make_facilitator
from .core import EpisodeLog, Observation, ScenarioConfig, ScenarioError, fork_rng
from .feedback import COMPLETED, EXECUTING, INFEASIBLE, PendingFeedback, make_directive

STATUS_PENDING = "Pending"
STATUS_COMPLETED = "Completed"
STATUS_IGNORED = "Ignored"
STATUS_NOT_EXECUTABLE = "NotExecutable"

_CATEGORIES = ("not-needed", "useful", "necessary")


def validate_scenario(scenario: ScenarioConfig):
    """Parse and cross-check a scenario; returns the initial state."""
    if scenario.env not in ("mdkg", "overcooked"):
        raise ScenarioError(f"unknown env {scenario.env!r}")
    if scenario.category not in _CATEGORIES:
        raise ScenarioError(f"unknown category {scenario.category!r}")
    if scenario.t_max <= 0:
        raise ScenarioError("t_max must be positive")
    if len(scenario.agents) != 2:
        raise ScenarioError("exactly two agents required")
    for i, a in enumerate(scenario.agents):
        if a.goal not in a.goal_set:
            raise ScenarioError(f"agent {i} goal {a.goal!r} not in its goal set")
    env = mdkg if scenario.env == "mdkg" else oc
    goals = tuple(a.goal for a in scenario.agents)
    return env.parse_layout(scenario.layout, goals, scenario.scenario_id)


class EpisodeEngine:
    """One episode as an advanceable state machine.  Seats are scripted
    policies unless listed in `human_seats`, in which case their actions are
    supplied to tick()."""

    def __init__(self, scenario: ScenarioConfig, facilitator=None,
                 human_seats: frozenset[int] = frozenset(), seed: Optional[int] = None):
        self.scenario = scenario
        self.seed = scenario.seed if seed is None else seed
        self.env_kind = scenario.env
        self.env = mdkg if scenario.env == "mdkg" else oc
        self.state = validate_scenario(scenario)
        self.human_seats = frozenset(human_seats)
        self.runtimes: list[Optional[AgentRuntime]] = []
        for i, spec in enumerate(scenario.agents):
            if i in self.human_seats:
                self.runtimes.append(None)
            else:
                rt = AgentRuntime(self.env_kind, i, spec, fork_rng(self.seed, f"agent{i}"))
                rt.reset(self.state)
                self.runtimes.append(rt)
        self.facilitator = facilitator or NullFacilitator(self.env_kind, fork_rng(self.seed, "facilitator"))
        self.facilitator.reset(scenario, self.state)
        self.delivery: list = [None, None]
        self.human_pending: dict[int, PendingFeedback] = {}
        self.feedback_history: list[list[dict]] = [[], []]  # per agent: {message, status}
        self.emitted_count = 0
        self.terminated = False
        self.reason: Optional[str] = None
        self.log = EpisodeLog(scenario_id=scenario.scenario_id, seed=self.seed)

    # -- observations ---------------------------------------------------------

    def observation_for(self, agent: int) -> Observation:
        visible = self.env.observe(self.state, agent)
        return Observation(agent=agent, visible=visible, feedback=self.delivery[agent])

    def pending_any(self) -> bool:
        for i, rt in enumerate(self.runtimes):
            if rt is not None and rt.pending_executing:
                return True
        for pf in self.human_pending.values():
            if pf.phase == EXECUTING:
                return True
        return any(self.delivery)

    def _history_entry(self, agent: int, message_id: str) -> Optional[dict]:
        for entry in self.feedback_history[agent]:
            if entry["message"]["message_id"] == message_id:
                return entry
        return None

    def _set_status(self, agent: int, message_id: str, status: str, events: list) -> None:
        entry = self._history_entry(agent, message_id)
        if entry is not None and entry["status"] != status:
            entry["status"] = status
            events.append({"agent": agent, "message_id": message_id, "status": status})

    def ignore_feedback(self, agent: int, message_id: str) -> bool:
        """A human seat dismisses its pending feedback."""
        pf = self.human_pending.get(agent)
        if pf is None or pf.message.message_id != message_id or pf.phase != EXECUTING:
            return False
        pf.phase = INFEASIBLE  # stops counting as executing
        entry = self._history_entry(agent, message_id)
        if entry is not None:
            entry["status"] = STATUS_IGNORED
        del self.human_pending[agent]
        return True

    # -- tick ------------------------------------------------------------------

    def tick(self, human_actions: Optional[dict[int, str]] = None) -> dict:
        if self.terminated:
            raise RuntimeError("episode already terminated")
        human_actions = human_actions or {}
        missing = [i for i in self.human_seats if i not in human_actions]
        if missing:
            raise ValueError(f"missing actions for human seats {missing}")

        status_events: list[dict] = []
        delivered = list(self.delivery)
        self.delivery = [None, None]

        # observe (delivers feedback) and pick actions
        actions: list[str] = []
        for i in range(2):
            obs = Observation(agent=i, visible=self.env.observe(self.state, i), feedback=delivered[i])
            rt = self.runtimes[i]
            if rt is not None:
                rt.observe(obs)
                if delivered[i] is not None:
                    self.feedback_history[i].append(
                        {"message": delivered[i].to_json(), "status": STATUS_PENDING}
                    )
                    rt.refresh_pending(self.state)  # may complete with zero actions
                    if rt.pending.phase == COMPLETED:
                        self._set_status(i, delivered[i].message_id, STATUS_COMPLETED, status_events)
                    elif rt.pending.phase == INFEASIBLE:
                        self._set_status(i, delivered[i].message_id, STATUS_NOT_EXECUTABLE, status_events)
                actions.append(rt.act())
            else:
                if delivered[i] is not None:
                    pf = PendingFeedback(delivered[i], make_directive(delivered[i]))
                    self.feedback_history[i].append(
                        {"message": delivered[i].to_json(), "status": STATUS_PENDING}
                    )
                    if pf.directive.completed(self.state):
                        pf.phase = COMPLETED
                        self._set_status(i, delivered[i].message_id, STATUS_COMPLETED, status_events)
                    elif not pf.directive.feasible(self.state):
                        pf.phase = INFEASIBLE
                        self._set_status(i, delivered[i].message_id, STATUS_NOT_EXECUTABLE, status_events)
                    else:
                        self.human_pending[i] = pf
                actions.append(human_actions[i])

        prev_state = self.state
        new_state = self.env.transition(prev_state, actions)

        # feedback phase transitions, checked against the true state
        for i in range(2):
            rt = self.runtimes[i]
            if rt is not None and rt.pending is not None and rt.pending.phase == EXECUTING:
                rt.refresh_pending(new_state)
                if rt.pending.phase == COMPLETED:
                    self._set_status(i, rt.pending.message.message_id, STATUS_COMPLETED, status_events)
                elif rt.pending.phase == INFEASIBLE:
                    self._set_status(i, rt.pending.message.message_id, STATUS_NOT_EXECUTABLE, status_events)
            pf = self.human_pending.get(i)
            if pf is not None and pf.phase == EXECUTING:
                if pf.directive.completed(new_state):
                    pf.phase = COMPLETED
                    self._set_status(i, pf.message.message_id, STATUS_COMPLETED, status_events)
                    del self.human_pending[i]
                elif not pf.directive.feasible(new_state):
                    pf.phase = INFEASIBLE
                    self._set_status(i, pf.message.message_id, STATUS_NOT_EXECUTABLE, status_events)
                    del self.human_pending[i]

        self.facilitator.update(prev_state, actions, new_state, delivered)
        self.state = new_state

        if all(new_state.done):
            self.terminated, self.reason = True, "all-done"
        elif new_state.timestep >= self.scenario.t_max:
            self.terminated, self.reason = True, "horizon"

        emitted = None
        if not self.terminated:
            emitted = self.facilitator.decide(new_state, self.pending_any())
            if emitted is not None:
                self.delivery[emitted.actor] = emitted
                self.emitted_count += 1

        record = {
            "t": prev_state.timestep,
            "actions": list(actions),
            "delivered": [m.message_id if m else None for m in delivered],
            "emitted": emitted.to_json() if emitted else None,
            "status_events": status_events,
            "done": list(new_state.done),
        }
        self.log.add(record)
        if self.terminated:
            self.log.terminal = {
                "type": "end",
                "scenario_id": self.scenario.scenario_id,
                "seed": self.seed,
                "facilitator": self.facilitator.kind,
                "length": new_state.timestep,
                "success": all(new_state.done),
                "reason": self.reason,
                "feedback_count": self.emitted_count,
            }
        return record


def run_episode(scenario: ScenarioConfig, facilitator_kind: str = "none",
                seed: Optional[int] = None, facilitator=None, **fac_kwargs) -> EpisodeLog:
    """Run one headless episode to completion and return its log."""
    use_seed = scenario.seed if seed is None else seed
    if facilitator is None:
        facilitator = make_facilitator(
            facilitator_kind, scenario.env, fork_rng(use_seed, "facilitator"), **fac_kwargs
        )
    engine = EpisodeEngine(scenario, facilitator=facilitator, seed=use_seed)
    while not engine.terminated:
        engine.tick()
    return engine.log
