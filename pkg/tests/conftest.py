"""Shared fixtures and independent oracles.

The oracles here re-derive planner and utility numbers from first
principles (plain BFS, exhaustive enumeration) so the package's cached
incremental planners are checked against straight-line reference code.
"""

from __future__ import annotations

from collections import deque
from dataclasses import replace
from itertools import product

import pytest

from gridsocial import mdkg, overcooked as oc
from gridsocial.core import DIRECTIONS


@pytest.fixture(autouse=True)
def fresh_caches():
    mdkg.clear_caches()
    oc.clear_caches()
    yield


# ---------------------------------------------------------------------------
# Independent mDKG planner: BFS over (position, held keys, unlocked doors)
# ---------------------------------------------------------------------------

def bfs_plan_oracle(state: mdkg.MdkgState, agent: int, goal: tuple) -> int:
    """Optimal step count for one agent to achieve `goal`, ignoring the other
    agent's position, INF when impossible.  Mirrors the planner's action
    costs: moves, key pickups, unlocks and the finishing action all cost 1."""
    key_cells = {it.item_id: (it.color, it.cell) for it in state.items
                 if it.kind == "key" and it.cell is not None}
    key_colors = dict({k: c for k, (c, _) in key_cells.items()})
    for it in state.held_by(agent):
        if it.kind == "key":
            key_colors[it.item_id] = it.color
    doors = {d.door_id: (d.color, d.cell) for d in state.doors}
    goal_cell = None
    if goal[0] == "pickup":
        it = state.item(goal[1])
        if it is None:
            return mdkg.INF
        if it.holder == agent:
            return 0
        if it.cell is None:
            return mdkg.INF
        goal_cell = it.cell
    elif goal[0] == "cell":
        goal_cell = goal[1]
    elif goal[0] == "unlock":
        if state.door(goal[1]) is None:
            return mdkg.INF
        if not state.door(goal[1]).locked:
            return 0
    elif goal[0] == "handover":
        goal_cell = goal[2]

    def ok(cell, unlocked):
        x, y = cell
        if not (0 <= x < state.width and 0 <= y < state.height) or cell in state.walls:
            return False
        return all(dcell != cell or did in unlocked for did, (_, dcell) in doors.items())

    start = (
        state.agent_pos[agent],
        frozenset(it.item_id for it in state.held_by(agent) if it.kind == "key"),
        frozenset(d.door_id for d in state.doors if not d.locked),
    )
    if goal[0] == "cell" and start[0] == goal_cell:
        return 0
    seen = {start}
    q = deque([(start, 0)])
    while q:
        (pos, held, unlocked), d = q.popleft()
        if goal[0] == "unlock" and goal[1] in unlocked:
            return d
        if goal[0] == "cell" and pos == goal_cell:
            return d
        if goal[0] == "pickup" and pos == goal_cell:
            return d + 1  # the pickup action itself
        if goal[0] == "handover" and goal[1] in held and mdkg.adjacent(pos, goal_cell):
            return d + 1  # the handover action itself
        succs = []
        for dx, dy in DIRECTIONS.values():
            n = (pos[0] + dx, pos[1] + dy)
            if ok(n, unlocked):
                succs.append((n, held, unlocked))
        for kid, (_, kcell) in key_cells.items():
            if kcell == pos and kid not in held:
                succs.append((pos, held | {kid}, unlocked))
        for did, (dcolor, dcell) in doors.items():
            if did not in unlocked and mdkg.adjacent(pos, dcell):
                if any(key_colors.get(k) == dcolor for k in held):
                    succs.append((pos, held, unlocked | {did}))
        for s in succs:
            if s not in seen:
                seen.add(s)
                q.append((s, d + 1))
    return mdkg.INF


# ---------------------------------------------------------------------------
# Independent Overcooked walking distance
# ---------------------------------------------------------------------------

def bfs_floor_oracle(layout: oc.OcLayout, start, target) -> int:
    if start == target:
        return 0
    seen = {start}
    q = deque([(start, 0)])
    while q:
        cell, d = q.popleft()
        for dx, dy in DIRECTIONS.values():
            n = (cell[0] + dx, cell[1] + dy)
            if n == target:
                return d + 1
            if n in layout.floor and n not in seen:
                seen.add(n)
                q.append((n, d + 1))
    return oc.INF_OC


# ---------------------------------------------------------------------------
# Independent expected-utility enumerator
# ---------------------------------------------------------------------------

def brute_force_rollout(env_kind: str, state, goals, policies, t_max, directive=None) -> int:
    """Steps until both agents finish under argmax policies, the directive's
    actor executing it first; an exhaustive plain loop with no caching."""
    env = mdkg if env_kind == "mdkg" else oc
    if env_kind == "mdkg":
        done = tuple(
            state.item(goals[i]) is not None and state.item(goals[i]).holder == i
            for i in range(2)
        )
    else:
        done = tuple(goals[i] in state.delivered_by[i] for i in range(2))
    s = replace(state, goals=goals, done=done)
    cap = max(t_max - state.timestep, 0)
    pending = directive
    mdkg.simulating.on = True
    try:
        for step in range(cap):
            if all(s.done):
                return step
            actions = []
            for i in range(2):
                a = None
                if pending is not None and pending.message.actor == i:
                    if pending.completed(s) or not pending.feasible(s):
                        pending = None
                    else:
                        a = pending.next_action(s)
                if a is None:
                    a = policies[i].argmax_action(s, i, goals[i])
                actions.append(a)
            s = env.transition(s, actions)
    finally:
        mdkg.simulating.on = False
    return cap


def brute_force_utilities(facilitator, state, candidates, posteriors) -> dict:
    """U(f) = sum over every joint goal of weight * (baseline - directed
    rollout cost), with no pruning."""
    from gridsocial.feedback import make_directive
    out = {}
    for m in candidates:
        total = 0.0
        for g in product(*facilitator.goal_sets):
            w = posteriors[0][g[0]] * posteriors[1][g[1]]
            if w == 0.0:
                continue
            base = brute_force_rollout(
                facilitator.env_kind, state, g, facilitator.policies, facilitator.t_max)
            directed = brute_force_rollout(
                facilitator.env_kind, state, g, facilitator.policies, facilitator.t_max,
                directive=make_directive(m))
            total += w * (base - directed)
        out[m.message_id] = total
    return out
