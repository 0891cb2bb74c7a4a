"""Simulated agent policies and belief maintenance.

mDKG agents are Boltzmann-rational over planner cost-to-go values;
kitchen agents follow a fixed subgoal pipeline (ingredient, chop, plate,
deliver) with epsilon-uniform exploration.  ``action_distribution`` is the
single source of truth for both sampling and likelihood evaluation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Optional

from . import mdkg, overcooked as oc
from .core import AgentSpec, Cell, DIRECTIONS, Observation
from .feedback import (
    COMPLETED,
    EXECUTING,
    INFEASIBLE,
    FeedbackMessage,
    PendingFeedback,
    make_directive,
)


def _blocked_by_other(belief, agent: int, action: str) -> bool:
    if action not in DIRECTIONS:
        return False
    dx, dy = DIRECTIONS[action]
    pos = belief.agent_pos[agent]
    return (pos[0] + dx, pos[1] + dy) == belief.agent_pos[1 - agent]


def _avoid_collision(belief, agent: int, action: str, ranked: list[str]) -> str:
    """If the chosen move runs into the other agent's (believed) cell,
    fall back to the best non-colliding alternative."""
    if not _blocked_by_other(belief, agent, action):
        return action
    # prefer a sidestep over waiting: the blocker may never move again
    for alt in ranked:
        if alt != "stay" and not _blocked_by_other(belief, agent, alt):
            return alt
    return "stay"


class BoltzmannPolicy:
    """P(a) proportional to exp(-beta * Q(a)) over planner cost-to-go."""

    def __init__(self, beta: float = 5.0):
        self.beta = beta

    def action_distribution(self, belief: mdkg.MdkgState, agent: int, goal: str) -> dict[str, float]:
        q = mdkg.action_values(belief, agent, goal)
        qmin = min(q.values())
        weights = {a: math.exp(-self.beta * min(v - qmin, 700.0 / max(self.beta, 1e-9))) for a, v in q.items()}
        z = sum(weights.values())
        return {a: w / z for a, w in weights.items()}

    def _ranked(self, belief, agent, goal) -> list[str]:
        q = mdkg.action_values(belief, agent, goal)
        return sorted(q, key=lambda a: (q[a], list(q).index(a)))

    def _blocked(self, belief, agent, goal) -> bool:
        # no finite-cost plan: a planner with no plan waits in place
        return min(mdkg.action_values(belief, agent, goal).values()) >= mdkg.INF

    def argmax_action(self, belief: mdkg.MdkgState, agent: int, goal: str) -> str:
        if self._blocked(belief, agent, goal):
            return "stay"
        ranked = self._ranked(belief, agent, goal)
        return _avoid_collision(belief, agent, ranked[0], ranked)

    def sample(self, belief: mdkg.MdkgState, agent: int, goal: str, rng: random.Random) -> str:
        if self._blocked(belief, agent, goal):
            return "stay"
        dist = self.action_distribution(belief, agent, goal)
        actions = list(dist)
        pick = rng.choices(actions, weights=[dist[a] for a in actions])[0]
        return _avoid_collision(belief, agent, pick, self._ranked(belief, agent, goal))

    def likelihood(self, belief: mdkg.MdkgState, agent: int, goal: str, action: str) -> float:
        return self.action_distribution(belief, agent, goal).get(action, 0.0)


class HeuristicKitchenPolicy:
    """Greedy subgoal pipeline with epsilon-uniform exploration."""

    def __init__(self, eps_act: float = 0.1):
        self.eps_act = eps_act

    # -- subgoal resolution -------------------------------------------------

    def _nearest(self, belief: oc.OcState, agent: int, kinds: tuple[str, ...],
                 exclude_held: bool = True) -> Optional[oc.OcItem]:
        pos = belief.agent_pos[agent]
        best, best_key = None, None
        for it in belief.items:
            if it.kind not in kinds:
                continue
            if it.holder is not None:
                continue
            if it.cell is None:
                continue
            cost = oc.access_cost(belief, pos, it.cell)
            if cost >= oc.INF_OC:
                continue
            key = (cost, it.cell[1] * belief.layout.width + it.cell[0])
            if best_key is None or key < best_key:
                best, best_key = it, key
        return best

    def _nearest_surface(self, belief: oc.OcState, agent: int, cells) -> Optional[Cell]:
        pos = belief.agent_pos[agent]
        best, best_key = None, None
        for cell in cells:
            cost = oc.access_cost(belief, pos, cell)
            if cost >= oc.INF_OC:
                continue
            key = (cost, cell[1] * belief.layout.width + cell[0])
            if best_key is None or key < best_key:
                best, best_key = cell, key
        return best

    def _subgoal_cell(self, belief: oc.OcState, agent: int, goal: str) -> Optional[Cell]:
        """The surface cell to interact with next, or None when nothing to do."""
        ing = oc.RECIPES[goal]
        lay = belief.layout
        held = belief.held(agent)
        if held is not None:
            if held.kind == oc.plated(ing):
                return self._nearest_surface(belief, agent, sorted(lay.delivery_stations))
            if held.kind == oc.chopped(ing):
                plate = self._nearest(belief, agent, ("plate",))
                return plate.cell if plate else None
            if held.kind == "plate":
                ch = self._nearest(belief, agent, (oc.chopped(ing),))
                if ch is not None:
                    return ch.cell
            if held.kind == oc.fresh(ing):
                free = [c for c in sorted(lay.chop_stations) if belief.item_at(c) is None]
                return self._nearest_surface(belief, agent, free)
            # wrong item: stash it
            from .feedback import nearest_free_counter
            return nearest_free_counter(belief, agent)
        # empty-handed
        plated_it = self._nearest(belief, agent, (oc.plated(ing),))
        if plated_it is not None:
            return plated_it.cell
        ch = self._nearest(belief, agent, (oc.chopped(ing),))
        if ch is not None:
            if ch.cell in lay.chop_stations or belief.item_at(ch.cell) is ch:
                return ch.cell
        fresh_on_station = next(
            (it for it in belief.items
             if it.kind == oc.fresh(ing) and it.cell in lay.chop_stations),
            None,
        )
        if fresh_on_station is not None:
            return fresh_on_station.cell
        fr = self._nearest(belief, agent, (oc.fresh(ing),))
        if fr is not None:
            return fr.cell
        return None

    def greedy_action(self, belief: oc.OcState, agent: int, goal: str) -> str:
        if goal in belief.delivered_by[agent]:
            return "stay"
        target = self._subgoal_cell(belief, agent, goal)
        if target is None:
            return "stay"
        from .feedback import _oc_move_or_interact
        action = _oc_move_or_interact(belief, agent, target)
        return action or "stay"

    # -- distribution / sampling -------------------------------------------

    def action_distribution(self, belief: oc.OcState, agent: int, goal: str) -> dict[str, float]:
        legal = oc.legal_actions(belief, agent)
        greedy = self.greedy_action(belief, agent, goal)
        eps = self.eps_act
        dist = {a: eps / len(legal) for a in legal}
        if greedy in dist:
            dist[greedy] += 1.0 - eps
        else:
            dist[greedy] = 1.0 - eps
        return dist

    def argmax_action(self, belief: oc.OcState, agent: int, goal: str) -> str:
        a = self.greedy_action(belief, agent, goal)
        ranked = [a] + [x for x in oc.legal_actions(belief, agent) if x != a]
        return _avoid_collision(belief, agent, a, ranked)

    def sample(self, belief: oc.OcState, agent: int, goal: str, rng: random.Random) -> str:
        dist = self.action_distribution(belief, agent, goal)
        actions = list(dist)
        pick = rng.choices(actions, weights=[dist[a] for a in actions])[0]
        ranked = sorted(dist, key=lambda a: -dist[a])
        return _avoid_collision(belief, agent, pick, ranked)

    def likelihood(self, belief: oc.OcState, agent: int, goal: str, action: str) -> float:
        return self.action_distribution(belief, agent, goal).get(action, 0.0)


def make_policy(env_kind: str, spec: AgentSpec):
    name = spec.policy or ("boltzmann" if env_kind == "mdkg" else "heuristic")
    if name == "boltzmann":
        return BoltzmannPolicy(beta=spec.beta)
    if name == "heuristic":
        return HeuristicKitchenPolicy(eps_act=spec.eps_act)
    raise ValueError(f"unknown policy {name!r}")


# ---------------------------------------------------------------------------
# Belief updates
# ---------------------------------------------------------------------------

def update_belief_mdkg(belief: mdkg.MdkgState, obs) -> mdkg.MdkgState:
    """Full observability: the belief is the observed state."""
    return obs


def update_belief_oc(belief: oc.OcState, obs: oc.OcVisible) -> oc.OcState:
    """Observed facts overwrite; unobserved facts persist.  A believed item
    inside the visible region that is no longer there moves to the unknown
    location (cell None, holder None)."""
    items = []
    for it in belief.items:
        obs_item = next((o for o in obs.items if o.item_id == it.item_id), None)
        if obs_item is not None:
            items.append(obs_item)
        elif it.cell is not None and it.cell in obs.cells:
            items.append(replace(it, cell=None, holder=None))
        elif it.holder is not None and belief.agent_pos[it.holder] in obs.cells:
            items.append(replace(it, cell=None, holder=None))
        else:
            items.append(it)
    for o in obs.items:
        if o.item_id not in {i.item_id for i in items}:
            items.append(o)
    pos = list(belief.agent_pos)
    for i, p in obs.agents_seen:
        pos[i] = p
    return replace(
        belief,
        items=tuple(items),
        agent_pos=tuple(pos),
        delivered_by=obs.delivered_by,
        timestep=obs.timestep,
    )


def merge_feedback_info(belief, message: FeedbackMessage):
    """Feedback can reveal facts the recipient cannot see: the referenced
    item's location and the transfer counter."""
    if message.kind in ("pass", "pickup"):
        item_id = message.args["item"]
        cell = message.args.get("cell") or message.args.get("item_cell")
        if cell is not None:
            items = []
            for it in belief.items:
                if it.item_id == item_id and it.holder is None:
                    items.append(replace(it, cell=tuple(cell), holder=None))
                else:
                    items.append(it)
            return replace(belief, items=tuple(items))
    return belief


# ---------------------------------------------------------------------------
# Runtime: one agent in one episode
# ---------------------------------------------------------------------------

class AgentRuntime:
    """Stateful wrapper: belief + pending feedback + policy sampling."""

    def __init__(self, env_kind: str, agent_id: int, spec: AgentSpec, rng: random.Random):
        self.env_kind = env_kind
        self.agent_id = agent_id
        self.spec = spec
        self.policy = make_policy(env_kind, spec)
        self.rng = rng
        self.belief = None
        self.pending: Optional[PendingFeedback] = None

    def reset(self, initial_state) -> None:
        self.belief = initial_state
        self.pending = None

    def observe(self, obs: Observation) -> None:
        if self.env_kind == "mdkg":
            self.belief = update_belief_mdkg(self.belief, obs.visible)
        else:
            self.belief = update_belief_oc(self.belief, obs.visible)
        if obs.feedback is not None:
            self.belief = merge_feedback_info(self.belief, obs.feedback)
            self.pending = PendingFeedback(obs.feedback, make_directive(obs.feedback))

    def refresh_pending(self, true_state) -> None:
        """Phase transitions are checked against the true state: the
        postcondition either holds in the world or it does not."""
        if self.pending is None or self.pending.phase != EXECUTING:
            return
        if self.pending.directive.completed(true_state):
            self.pending.phase = COMPLETED
        elif not self.pending.directive.feasible(true_state):
            self.pending.phase = INFEASIBLE

    def act(self) -> str:
        goal = self.spec.goal
        if self.pending is not None and self.pending.phase == EXECUTING:
            action = self.pending.directive.next_action(self.belief)
            if action is not None:
                ranked = [action] + ["stay"]
                return _avoid_collision(self.belief, self.agent_id, action, ranked)
        return self.policy.sample(self.belief, self.agent_id, goal, self.rng)

    @property
    def pending_executing(self) -> bool:
        return self.pending is not None and self.pending.phase == EXECUTING
