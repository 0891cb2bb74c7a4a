"""Feedback messages and their scripted execution plans.

A directive is the executable side of a feedback message: it yields one
primitive action at a time from the executor's believed state, reports
when its postcondition holds, and detects when it has become impossible.
The facilitator simulates the very same directives when scoring feedback,
so predicted and actual behaviour coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import mdkg, overcooked as oc
from .core import AGENT_NAMES, Cell, DIRECTIONS

EXECUTING = "executing"
COMPLETED = "completed"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class FeedbackMessage:
    message_id: str
    kind: str  # "unlock" | "handover" | "pass" | "pickup"
    actor: int  # recipient/executor
    beneficiary: Optional[int]
    args: dict
    text: str
    explanation: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "message_id": self.message_id,
            "kind": self.kind,
            "actor": self.actor,
            "beneficiary": self.beneficiary,
            "args": dict(sorted(self.args.items())),
            "text": self.text,
            "explanation": self.explanation,
        }


def _argmin_action(q: dict[str, float]) -> Optional[str]:
    if not q:
        return None
    best = min(q.values())
    for a, v in q.items():  # insertion order is the fixed tie-break order
        if v == best:
            return a
    return None


# ---------------------------------------------------------------------------
# mDKG directives
# ---------------------------------------------------------------------------

class UnlockDirective:
    """Unlock a door for the other agent, fetching a matching key first if
    needed."""

    def __init__(self, message: FeedbackMessage):
        self.message = message
        self.actor = message.actor
        self.door_id = message.args["door"]

    def completed(self, state: mdkg.MdkgState) -> bool:
        d = state.door(self.door_id)
        return d is not None and not d.locked

    def feasible(self, state: mdkg.MdkgState) -> bool:
        return mdkg.plan_distance(state, self.actor, ("unlock", self.door_id)) < mdkg.INF

    def next_action(self, belief: mdkg.MdkgState) -> Optional[str]:
        q = mdkg.goal_action_values(belief, self.actor, ("unlock", self.door_id))
        return _argmin_action(q)


class HandoverDirective:
    """Hand a key to the other agent, fetching it first if needed."""

    def __init__(self, message: FeedbackMessage):
        self.message = message
        self.actor = message.actor
        self.item_id = message.args["item"]
        self.beneficiary = message.beneficiary

    def _goal(self, state: mdkg.MdkgState) -> mdkg.GoalKey:
        return ("handover", self.item_id, state.agent_pos[self.beneficiary])

    def completed(self, state: mdkg.MdkgState) -> bool:
        it = state.item(self.item_id)
        return it is not None and it.holder == self.beneficiary

    def feasible(self, state: mdkg.MdkgState) -> bool:
        return mdkg.plan_distance(state, self.actor, self._goal(state)) < mdkg.INF

    def next_action(self, belief: mdkg.MdkgState) -> Optional[str]:
        q = mdkg.goal_action_values(belief, self.actor, self._goal(belief))
        return _argmin_action(q)


# ---------------------------------------------------------------------------
# Overcooked directives
# ---------------------------------------------------------------------------

def _oc_move_or_interact(belief: oc.OcState, agent: int, target: Cell) -> Optional[str]:
    """Step toward `target` (a surface cell) and interact once adjacent."""
    pos = belief.agent_pos[agent]
    for name, (dx, dy) in DIRECTIONS.items():
        if (pos[0] + dx, pos[1] + dy) == target:
            return f"interact:{name}"
    best_action, best_d = None, oc.INF_OC
    cur = oc.access_cost(belief, pos, target)
    for name, (dx, dy) in DIRECTIONS.items():
        nxt = (pos[0] + dx, pos[1] + dy)
        if not belief.layout.walkable(nxt):
            continue
        d = oc.access_cost(belief, nxt, target)
        if d < best_d:
            best_d, best_action = d, name
    if best_action is not None and best_d < cur:
        return best_action
    return "stay" if cur < oc.INF_OC else None


def nearest_free_counter(belief: oc.OcState, agent: int, exclude: frozenset[Cell] = frozenset()) -> Optional[Cell]:
    pos = belief.agent_pos[agent]
    best, best_cost = None, oc.INF_OC
    for cell in sorted(belief.layout.counters, key=lambda c: (c[1], c[0])):
        if cell in exclude or belief.item_at(cell) is not None:
            continue
        cost = oc.access_cost(belief, pos, cell)
        if cost < best_cost:
            best, best_cost = cell, cost
    return best


def shared_counters(state: oc.OcState) -> list[Cell]:
    """Plain counters off the layout border reachable (adjacent floor) by
    both agents; candidates for indirect item transfer."""
    lay = state.layout
    out = []
    for cell in sorted(lay.counters, key=lambda c: (c[1], c[0])):
        if cell in lay.border:
            continue
        costs = [oc.access_cost(state, state.agent_pos[i], cell) for i in range(2)]
        if all(c < oc.INF_OC for c in costs):
            out.append(cell)
    return out


class PassDirective:
    """Move an item onto a shared counter so the other agent can take it.
    A held non-target item is stashed on the nearest free counter first."""

    def __init__(self, message: FeedbackMessage):
        self.message = message
        self.actor = message.actor
        self.beneficiary = message.beneficiary
        self.item_id = message.args["item"]
        self.counter: Cell = tuple(message.args["counter"])

    def completed(self, state: oc.OcState) -> bool:
        it = state.item(self.item_id)
        if it is None:
            return False
        return it.cell == self.counter or it.holder == self.beneficiary

    def _target_counter(self, state: oc.OcState) -> Optional[Cell]:
        if state.item_at(self.counter) is None or state.item_at(self.counter).item_id == self.item_id:
            return self.counter
        for cell in shared_counters(state):
            if state.item_at(cell) is None:
                return cell
        return None

    def feasible(self, state: oc.OcState) -> bool:
        it = state.item(self.item_id)
        if it is None or (it.holder is not None and it.holder != self.actor):
            return False
        if it.holder != self.actor:
            ok, _ = oc.item_access(state, self.actor, self.item_id)
            if not ok:
                return False
        return self._target_counter(state) is not None

    def next_action(self, belief: oc.OcState) -> Optional[str]:
        it = belief.item(self.item_id)
        if it is None:
            return None
        held = belief.held(self.actor)
        if held is not None and held.item_id != self.item_id:
            stash = nearest_free_counter(belief, self.actor, exclude=frozenset({self.counter}))
            return _oc_move_or_interact(belief, self.actor, stash) if stash else None
        if held is not None:
            target = self._target_counter(belief)
            return _oc_move_or_interact(belief, self.actor, target) if target else None
        if it.cell is None:
            return None
        return _oc_move_or_interact(belief, self.actor, it.cell)


class PickupDirective:
    """Pick up a specific (alternative) item to defuse a both-want-it
    conflict."""

    def __init__(self, message: FeedbackMessage):
        self.message = message
        self.actor = message.actor
        self.item_id = message.args["item"]

    def completed(self, state: oc.OcState) -> bool:
        it = state.item(self.item_id)
        return it is not None and it.holder == self.actor

    def feasible(self, state: oc.OcState) -> bool:
        it = state.item(self.item_id)
        if it is None or it.holder is not None:
            return False
        ok, _ = oc.item_access(state, self.actor, self.item_id)
        return ok

    def next_action(self, belief: oc.OcState) -> Optional[str]:
        it = belief.item(self.item_id)
        if it is None:
            return None
        held = belief.held(self.actor)
        if held is not None:
            stash = nearest_free_counter(belief, self.actor)
            return _oc_move_or_interact(belief, self.actor, stash) if stash else None
        if it.cell is None:
            return None
        return _oc_move_or_interact(belief, self.actor, it.cell)


_DIRECTIVES = {
    "unlock": UnlockDirective,
    "handover": HandoverDirective,
    "pass": PassDirective,
    "pickup": PickupDirective,
}


def make_directive(message: FeedbackMessage):
    return _DIRECTIVES[message.kind](message)


@dataclass
class PendingFeedback:
    """One accepted feedback being executed by an agent."""

    message: FeedbackMessage
    directive: object
    phase: str = EXECUTING


# ---------------------------------------------------------------------------
# Message construction helpers
# ---------------------------------------------------------------------------

def _pretty_item(item_id_or_kind: str) -> str:
    return item_id_or_kind.replace("_", " ")


def unlock_message(message_id: str, actor: int, door_id: str, beneficiary: int) -> FeedbackMessage:
    text = (
        f"{AGENT_NAMES[actor]}, please unlock {_pretty_item(door_id)} "
        f"for {AGENT_NAMES[beneficiary]}."
    )
    return FeedbackMessage(message_id, "unlock", actor, beneficiary, {"door": door_id}, text)


def handover_message(message_id: str, actor: int, item_id: str, beneficiary: int) -> FeedbackMessage:
    text = (
        f"{AGENT_NAMES[actor]}, please hand the {_pretty_item(item_id)} "
        f"over to {AGENT_NAMES[beneficiary]}."
    )
    return FeedbackMessage(message_id, "handover", actor, beneficiary, {"item": item_id}, text)


def pass_message(message_id: str, actor: int, item_id: str, item_kind: str,
                 item_cell: Cell, beneficiary: int, counter: Cell) -> FeedbackMessage:
    text = (
        f"{AGENT_NAMES[actor]}, please pass the {_pretty_item(item_kind)} "
        f"to {AGENT_NAMES[beneficiary]} via the counter at {counter[0]},{counter[1]}."
    )
    return FeedbackMessage(
        message_id, "pass", actor, beneficiary,
        {"item": item_id, "item_kind": item_kind, "item_cell": list(item_cell),
         "counter": list(counter)}, text,
    )


def pickup_message(message_id: str, actor: int, item_id: str, item_kind: str, cell: Cell) -> FeedbackMessage:
    text = (
        f"{AGENT_NAMES[actor]}, please pick up the {_pretty_item(item_kind)} "
        f"at {cell[0]},{cell[1]} instead."
    )
    return FeedbackMessage(
        message_id, "pickup", actor, None,
        {"item": item_id, "item_kind": item_kind, "cell": list(cell)}, text,
    )
