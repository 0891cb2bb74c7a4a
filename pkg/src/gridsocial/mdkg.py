"""Fully observable doors-keys-gems grid world.

Layout glyphs: ``#`` wall, ``.`` floor, ``R G B Y`` locked doors,
``r g b y`` keys, ``1``-``4`` gems, ``A``/``Z`` the two agents.

Actions are plain strings: ``up down left right stay``,
``pickup:<item_id>``, ``unlock:<door_id>``,
``handover:<item_id>:<recipient>``.
"""

from __future__ import annotations

import logging
import threading
from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .core import Cell, DIRECTIONS, ScenarioError

log = logging.getLogger(__name__)

# set per thread while a facilitator simulates futures, where attempting an
# action that the real world rejects is expected and not worth a warning
simulating = threading.local()


def _warn_illegal(agent: int, action: str) -> None:
    if not getattr(simulating, "on", False):
        log.warning("agent %d illegal %s, treated as stay", agent, action)

INF = 10**6

_DOOR_COLORS = {"R": "red", "G": "green", "B": "blue", "Y": "yellow"}
_KEY_COLORS = {"r": "red", "g": "green", "b": "blue", "y": "yellow"}
_GEM_GLYPHS = "1234"
_AGENT_GLYPHS = "AZ"


@dataclass(frozen=True)
class Door:
    door_id: str
    color: str
    cell: Cell
    locked: bool


@dataclass(frozen=True)
class Item:
    item_id: str
    kind: str  # "key" | "gem"
    color: str
    cell: Optional[Cell]  # None while held
    holder: Optional[int]  # agent id while held


@dataclass(frozen=True)
class MdkgState:
    layout_id: str
    width: int
    height: int
    walls: frozenset[Cell]
    doors: tuple[Door, ...]
    items: tuple[Item, ...]
    agent_pos: tuple[Cell, ...]
    goals: tuple[str, ...]  # gem item ids
    done: tuple[bool, ...]
    timestep: int = 0

    def door(self, door_id: str) -> Optional[Door]:
        for d in self.doors:
            if d.door_id == door_id:
                return d
        return None

    def item(self, item_id: str) -> Optional[Item]:
        for it in self.items:
            if it.item_id == item_id:
                return it
        return None

    def items_at(self, cell: Cell) -> list[Item]:
        return [it for it in self.items if it.cell == cell]

    def held_by(self, agent: int) -> list[Item]:
        return [it for it in self.items if it.holder == agent]

    def locked_door_cells(self) -> frozenset[Cell]:
        return frozenset(d.cell for d in self.doors if d.locked)


def adjacent(a: Cell, b: Cell) -> bool:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


def parse_layout(layout: list[str], goals: tuple[str, ...], layout_id: str) -> MdkgState:
    if not layout:
        raise ScenarioError("empty layout")
    width = max(len(row) for row in layout)
    height = len(layout)
    walls: set[Cell] = set()
    doors: list[Door] = []
    items: list[Item] = []
    agent_pos: dict[int, Cell] = {}
    counts: dict[str, int] = {}

    def uid(base: str) -> str:
        counts[base] = counts.get(base, 0) + 1
        return base if counts[base] == 1 else f"{base}{counts[base]}"

    for y, row in enumerate(layout):
        for x in range(width):
            ch = row[x] if x < len(row) else "#"
            cell = (x, y)
            if ch == "#":
                walls.add(cell)
            elif ch == ".":
                pass
            elif ch in _DOOR_COLORS:
                doors.append(Door(uid(f"door_{_DOOR_COLORS[ch]}"), _DOOR_COLORS[ch], cell, True))
            elif ch in _KEY_COLORS:
                items.append(Item(uid(f"key_{_KEY_COLORS[ch]}"), "key", _KEY_COLORS[ch], cell, None))
            elif ch in _GEM_GLYPHS:
                items.append(Item(f"gem{ch}", "gem", f"gem{ch}", cell, None))
            elif ch in _AGENT_GLYPHS:
                agent_pos[_AGENT_GLYPHS.index(ch)] = cell
            else:
                raise ScenarioError(f"unknown glyph {ch!r} at {cell}")

    if sorted(agent_pos) != [0, 1]:
        raise ScenarioError("layout must place both agents (A and Z)")
    gem_ids = {it.item_id for it in items if it.kind == "gem"}
    for g in goals:
        if g not in gem_ids:
            raise ScenarioError(f"goal gem {g!r} not present in layout")
    return MdkgState(
        layout_id=layout_id,
        width=width,
        height=height,
        walls=frozenset(walls),
        doors=tuple(doors),
        items=tuple(items),
        agent_pos=(agent_pos[0], agent_pos[1]),
        goals=goals,
        done=(False, False),
        timestep=0,
    )


def render(state: MdkgState) -> list[str]:
    grid = [["." for _ in range(state.width)] for _ in range(state.height)]
    for (x, y) in state.walls:
        grid[y][x] = "#"
    for d in state.doors:
        x, y = d.cell
        ch = {v: k for k, v in _DOOR_COLORS.items()}[d.color]
        grid[y][x] = ch if d.locked else ch.lower() + ""
        if not d.locked:
            grid[y][x] = "."
    for it in state.items:
        if it.cell is not None:
            x, y = it.cell
            grid[y][x] = it.item_id[3] if it.kind == "gem" else it.color[0]
    for i, (x, y) in enumerate(state.agent_pos):
        grid[y][x] = _AGENT_GLYPHS[i]
    return ["".join(row) for row in grid]


def walkable(state: MdkgState, cell: Cell, locked_cells: Optional[frozenset[Cell]] = None) -> bool:
    x, y = cell
    if not (0 <= x < state.width and 0 <= y < state.height):
        return False
    if cell in state.walls:
        return False
    if locked_cells is None:
        locked_cells = state.locked_door_cells()
    return cell not in locked_cells


def legal_actions(state: MdkgState, agent: int, goal: Optional[str] = None) -> list[str]:
    """Actions the agent model considers; other agent's position is ignored
    so likelihoods do not depend on unpredictable collisions."""
    if goal is None:
        goal = state.goals[agent]
    pos = state.agent_pos[agent]
    locked = state.locked_door_cells()
    acts: list[str] = []
    for name, (dx, dy) in DIRECTIONS.items():
        if walkable(state, (pos[0] + dx, pos[1] + dy), locked):
            acts.append(name)
    acts.append("stay")
    for it in state.items_at(pos):
        if it.kind == "key" or it.item_id == goal:
            acts.append(f"pickup:{it.item_id}")
    held = state.held_by(agent)
    for d in state.doors:
        if d.locked and adjacent(pos, d.cell) and any(h.kind == "key" and h.color == d.color for h in held):
            acts.append(f"unlock:{d.door_id}")
    other = 1 - agent
    if adjacent(pos, state.agent_pos[other]):
        for h in held:
            acts.append(f"handover:{h.item_id}:{other}")
    return acts


def transition(state: MdkgState, joint: list[str]) -> MdkgState:
    """Apply a joint action; agents are processed in id order so conflicts
    resolve deterministically (agent 0 first).  Illegal actions degrade to
    stay."""
    items = list(state.items)
    doors = list(state.doors)
    pos = list(state.agent_pos)
    done = list(state.done)

    def item_idx(item_id: str) -> Optional[int]:
        for i, it in enumerate(items):
            if it.item_id == item_id:
                return i
        return None

    for agent, action in enumerate(joint):
        locked = frozenset(d.cell for d in doors if d.locked)
        if action in DIRECTIONS:
            dx, dy = DIRECTIONS[action]
            target = (pos[agent][0] + dx, pos[agent][1] + dy)
            if walkable(state, target, locked) and target != pos[1 - agent]:
                pos[agent] = target
        elif action == "stay":
            pass
        elif action.startswith("pickup:"):
            idx = item_idx(action.split(":")[1])
            it = items[idx] if idx is not None else None
            legal = (
                it is not None
                and it.cell == pos[agent]
                and (it.kind == "key" or it.item_id == state.goals[agent])
            )
            if legal:
                items[idx] = replace(it, cell=None, holder=agent)
                if it.item_id == state.goals[agent]:
                    done[agent] = True
            else:
                _warn_illegal(agent, action)
        elif action.startswith("unlock:"):
            door_id = action.split(":")[1]
            didx = next((i for i, d in enumerate(doors) if d.door_id == door_id), None)
            d = doors[didx] if didx is not None else None
            holds_key = any(
                it.holder == agent and it.kind == "key" and d is not None and it.color == d.color
                for it in items
            )
            if d is not None and d.locked and adjacent(pos[agent], d.cell) and holds_key:
                doors[didx] = replace(d, locked=False)
            else:
                _warn_illegal(agent, action)
        elif action.startswith("handover:"):
            _, item_id, recip_s = action.split(":")
            recipient = int(recip_s)
            idx = item_idx(item_id)
            it = items[idx] if idx is not None else None
            legal = (
                it is not None
                and it.holder == agent
                and recipient != agent
                and adjacent(pos[agent], pos[recipient])
            )
            if legal:
                items[idx] = replace(it, holder=recipient)
                if it.item_id == state.goals[recipient]:
                    done[recipient] = True
            else:
                _warn_illegal(agent, action)
        else:
            raise ScenarioError(f"malformed mdkg action {action!r}")

    return replace(
        state,
        items=tuple(items),
        doors=tuple(doors),
        agent_pos=tuple(pos),
        done=tuple(done),
        timestep=state.timestep + 1,
    )


def observe(state: MdkgState, agent: int) -> MdkgState:
    """Fully observable: the observation is the state itself."""
    return state


# ---------------------------------------------------------------------------
# Single-agent planning over the abstract space
# (position, held keys, unlocked doors, finished).
# The other agent is ignored during planning; items it holds are unavailable.
# ---------------------------------------------------------------------------

# goal specs:
#   ("pickup", item_id)            -- stand on the item's cell and pick it up
#   ("cell", cell)                 -- reach the cell
#   ("unlock", door_id)            -- get that door unlocked
#   ("handover", item_id, cell)    -- hold the item adjacent to `cell`, hand over
GoalKey = tuple

_DONE = "!"  # marker node component for completed plans

_dist_tables: dict[tuple, "_DistTable"] = {}


def clear_caches() -> None:
    _dist_tables.clear()


def _plan_context(state: MdkgState, agent: int):
    """Static planning context: floor keys and goal-relevant item cells.
    Keys held by the other agent are unavailable to this planner."""
    floor_keys = tuple(
        sorted((it.item_id, it.color, it.cell) for it in state.items if it.kind == "key" and it.cell is not None)
    )
    doors = tuple(sorted((d.door_id, d.color, d.cell) for d in state.doors))
    return floor_keys, doors


def _node(state: MdkgState, agent: int) -> tuple:
    held = frozenset(it.item_id for it in state.held_by(agent) if it.kind == "key")
    unlocked = frozenset(d.door_id for d in state.doors if not d.locked)
    return (state.agent_pos[agent], held, unlocked, False)


class _DistTable:
    """Distance-to-goal over the abstract planning graph, built lazily by
    forward exploration plus a backward BFS from all goal nodes."""

    def __init__(self, state: MdkgState, agent: int, goal: GoalKey):
        self.walls = state.walls
        self.width = state.width
        self.height = state.height
        floor_keys, doors = _plan_context(state, agent)
        self.floor_keys = floor_keys
        self.doors = {d[0]: (d[1], d[2]) for d in doors}  # id -> (color, cell)
        self.goal = goal
        held_ids = frozenset(it.item_id for it in state.held_by(agent) if it.kind == "key")
        self.key_cells = {k[0]: (k[1], k[2]) for k in floor_keys}  # id -> (color, cell)
        self.key_colors = dict({k[0]: k[1] for k in floor_keys})
        for it in state.held_by(agent):
            if it.kind == "key":
                self.key_colors[it.item_id] = it.color
        # item cell for pickup goals
        self.goal_cell: Optional[Cell] = None
        if goal[0] == "pickup":
            it = state.item(goal[1])
            if it is not None and it.cell is not None:
                self.goal_cell = it.cell
            elif it is not None and it.holder == agent:
                self.goal_cell = state.agent_pos[agent]  # degenerate: already held
        elif goal[0] == "cell":
            self.goal_cell = goal[1]
        elif goal[0] == "handover":
            self.goal_cell = goal[2]
        self.adjacency: dict[tuple, list[tuple]] = {}
        self.dist: dict[tuple, int] = {}
        self.explored: set[tuple] = set()

    def _walkable(self, cell: Cell, unlocked: frozenset[str]) -> bool:
        x, y = cell
        if not (0 <= x < self.width and 0 <= y < self.height) or cell in self.walls:
            return False
        for did, (_, dcell) in self.doors.items():
            if dcell == cell and did not in unlocked:
                return False
        return True

    def _is_goal(self, node: tuple) -> bool:
        return node[3] is True

    def _successors(self, node: tuple) -> list[tuple]:
        pos, held, unlocked, fin = node
        if fin:
            return []
        out = []
        for dx, dy in DIRECTIONS.values():
            nxt = (pos[0] + dx, pos[1] + dy)
            if self._walkable(nxt, unlocked):
                out.append((nxt, held, unlocked, False))
        for kid, (_, kcell) in self.key_cells.items():
            if kcell == pos and kid not in held:
                out.append((pos, held | {kid}, unlocked, False))
        for did, (dcolor, dcell) in self.doors.items():
            if did not in unlocked and adjacent(pos, dcell):
                if any(self.key_colors.get(k) == dcolor for k in held):
                    out.append((pos, held, unlocked | {did}, False))
        g = self.goal
        if g[0] == "pickup" and self.goal_cell is not None and pos == self.goal_cell:
            out.append((pos, held, unlocked, True))
        elif g[0] == "cell" and pos == self.goal_cell:
            # zero-cost arrival is handled in distance(); model as explicit done
            out.append((pos, held, unlocked, True))
        elif g[0] == "unlock" and g[1] in unlocked:
            out.append((pos, held, unlocked, True))
        elif g[0] == "handover" and g[1] in held and self.goal_cell is not None and adjacent(pos, self.goal_cell):
            out.append((pos, held, unlocked, True))
        return out

    def _expand_from(self, start: tuple) -> None:
        frontier = deque([start])
        self.explored.add(start)
        while frontier:
            node = frontier.popleft()
            succs = self._successors(node)
            self.adjacency[node] = succs
            for s in succs:
                if s not in self.explored:
                    self.explored.add(s)
                    frontier.append(s)
        # backward BFS over the reversed graph from all goal nodes
        rev: dict[tuple, list[tuple]] = {}
        for u, vs in self.adjacency.items():
            for v in vs:
                rev.setdefault(v, []).append(u)
        self.dist = {}
        q = deque()
        for node in self.explored:
            if self._is_goal(node):
                self.dist[node] = 0
                q.append(node)
        while q:
            v = q.popleft()
            for u in rev.get(v, []):
                if u not in self.dist:
                    self.dist[u] = self.dist[v] + 1
                    q.append(u)

    def distance(self, node: tuple) -> int:
        if node[3] is False and self.goal[0] == "cell" and node[0] == self.goal_cell:
            return 0
        if node not in self.explored:
            self._expand_from(node)
        d = self.dist.get(node, INF)
        if self.goal[0] in ("cell", "unlock") and d != INF and d > 0:
            # discount the artificial done-transition step; for pickup and
            # handover goals that step is the real finishing action
            d -= 1
        return d


def _table(state: MdkgState, agent: int, goal: GoalKey) -> _DistTable:
    floor_keys, doors = _plan_context(state, agent)
    held_colors = tuple(sorted((it.item_id, it.color) for it in state.held_by(agent) if it.kind == "key"))
    goal_sig = goal
    if goal[0] == "pickup":
        it = state.item(goal[1])
        goal_sig = ("pickup", goal[1], it.cell if it else None, it.holder if it else None)
    key = (state.layout_id, floor_keys, doors, held_colors, goal_sig)
    tbl = _dist_tables.get(key)
    if tbl is None:
        tbl = _DistTable(state, agent, goal)
        _dist_tables[key] = tbl
    return tbl


def plan_distance(state: MdkgState, agent: int, goal: GoalKey) -> int:
    """Optimal single-agent step count to achieve `goal`, INF if impossible."""
    if goal[0] == "pickup":
        it = state.item(goal[1])
        if it is not None and it.holder == agent:
            return 0
        if it is None or (it.cell is None and it.holder != agent):
            return INF
    if goal[0] == "unlock":
        d = state.door(goal[1])
        if d is None:
            return INF
        if not d.locked:
            return 0
    return _table(state, agent, goal).distance(_node(state, agent))


def goal_action_values(state: MdkgState, agent: int, goal: GoalKey) -> dict[str, float]:
    """Cost-to-go Q(a) = 1 + dist(successor) for each legal env action, under
    an arbitrary planning goal, ignoring the other agent."""
    gem_gate = goal[1] if goal[0] == "pickup" else state.goals[agent]
    if plan_distance(state, agent, goal) == 0:
        return {"stay": 0.0}
    tbl = _table(state, agent, goal)
    node = _node(state, agent)
    pos, held, unlocked, _ = node
    q: dict[str, float] = {}
    for action in legal_actions(state, agent, gem_gate):
        if action in DIRECTIONS:
            dx, dy = DIRECTIONS[action]
            nxt = (pos[0] + dx, pos[1] + dy)
            succ = (nxt, held, unlocked, False) if tbl._walkable(nxt, unlocked) else node
        elif action == "stay":
            succ = node
        elif action.startswith("pickup:"):
            iid = action.split(":")[1]
            if goal[0] == "pickup" and iid == goal[1]:
                q[action] = 1.0
                continue
            it = state.item(iid)
            succ = (pos, held | {iid}, unlocked, False) if it and it.kind == "key" else node
        elif action.startswith("unlock:"):
            did = action.split(":")[1]
            if goal[0] == "unlock" and did == goal[1]:
                q[action] = 1.0
                continue
            succ = (pos, held, unlocked | {did}, False)
        elif action.startswith("handover:"):
            iid = action.split(":")[1]
            if goal[0] == "handover" and iid == goal[1] and adjacent(pos, goal[2]):
                q[action] = 1.0
                continue
            succ = (pos, held - {iid}, unlocked, False)
        else:
            continue
        d = tbl.distance(succ)
        q[action] = 1.0 + min(d, INF)
    return q


def action_values(state: MdkgState, agent: int, goal_gem: str) -> dict[str, float]:
    """Q-values for the agent's own objective: collecting its goal gem."""
    return goal_action_values(state, agent, ("pickup", goal_gem))


def reachability(state: MdkgState, agent: int, target_cell: Cell) -> tuple[bool, int]:
    """Path existence and optimal cost to `target_cell`, allowing the agent to
    pick up reachable keys and unlock matching doors along the way."""
    d = plan_distance(state, agent, ("cell", target_cell))
    return (d < INF, d)
