"""Partially observable kitchen grid.

Layout glyphs: ``.`` floor, ``#`` counter, ``X`` chop station,
``S`` delivery station, ``/`` door (walkable, delimits rooms),
``T L O`` fresh tomato/lettuce/onion on a counter, ``P`` plate on a
counter, ``A``/``Z`` the two agents.

Actions: ``up down left right stay`` and ``interact:<dir>``.
Rooms are derived by flood-filling floor cells; door cells separate rooms
and form singleton rooms of their own.  Counters adjacent to a room are
visible from that room, so boundary counters are shared knowledge.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional

from .core import Cell, DIRECTIONS, ScenarioError

log = logging.getLogger(__name__)

INGREDIENTS = ("tomato", "lettuce", "onion")
RECIPES = {"SimpleTomato": "tomato", "SimpleLettuce": "lettuce", "SimpleOnion": "onion"}

_ITEM_GLYPHS = {"T": "fresh_tomato", "L": "fresh_lettuce", "O": "fresh_onion", "P": "plate"}


def fresh(ing: str) -> str:
    return f"fresh_{ing}"


def chopped(ing: str) -> str:
    return f"chopped_{ing}"


def plated(ing: str) -> str:
    return f"plated_{ing}"


@dataclass(frozen=True)
class OcLayout:
    layout_id: str
    width: int
    height: int
    floor: frozenset[Cell]  # walkable incl. doors
    doors: frozenset[Cell]
    counters: frozenset[Cell]  # plain counters
    chop_stations: frozenset[Cell]
    delivery_stations: frozenset[Cell]
    rooms: dict  # cell -> room id, walkable cells only
    border: frozenset[Cell]

    def surface(self, cell: Cell) -> bool:
        """A cell that can hold an item."""
        return cell in self.counters or cell in self.chop_stations or cell in self.delivery_stations

    def walkable(self, cell: Cell) -> bool:
        return cell in self.floor

    def room_cells(self, room: int) -> list[Cell]:
        return [c for c, r in self.rooms.items() if r == room]


@dataclass(frozen=True)
class OcItem:
    item_id: str
    kind: str  # fresh_*/chopped_*/plated_*/plate
    cell: Optional[Cell]
    holder: Optional[int]


@dataclass(frozen=True)
class OcState:
    layout: OcLayout
    items: tuple[OcItem, ...]
    agent_pos: tuple[Cell, ...]
    delivered_by: tuple[frozenset, ...]  # recipes delivered per agent
    goals: tuple[str, ...]  # recipe names
    done: tuple[bool, ...]
    timestep: int = 0

    def item(self, item_id: str) -> Optional[OcItem]:
        for it in self.items:
            if it.item_id == item_id:
                return it
        return None

    def item_at(self, cell: Cell) -> Optional[OcItem]:
        for it in self.items:
            if it.cell == cell:
                return it
        return None

    def held(self, agent: int) -> Optional[OcItem]:
        for it in self.items:
            if it.holder == agent:
                return it
        return None

    def room_of(self, agent: int) -> int:
        return self.layout.rooms[self.agent_pos[agent]]


def parse_layout(layout: list[str], goals: tuple[str, ...], layout_id: str) -> OcState:
    if not layout:
        raise ScenarioError("empty layout")
    width = max(len(r) for r in layout)
    height = len(layout)
    floor: set[Cell] = set()
    doors: set[Cell] = set()
    counters: set[Cell] = set()
    chops: set[Cell] = set()
    delivery: set[Cell] = set()
    items: list[OcItem] = []
    agent_pos: dict[int, Cell] = {}
    counts: dict[str, int] = {}

    def uid(base: str) -> str:
        counts[base] = counts.get(base, 0) + 1
        return f"{base}{counts[base]}"

    for y, row in enumerate(layout):
        for x in range(width):
            ch = row[x] if x < len(row) else "#"
            cell = (x, y)
            if ch == ".":
                floor.add(cell)
            elif ch == "/":
                floor.add(cell)
                doors.add(cell)
            elif ch == "#":
                counters.add(cell)
            elif ch == "X":
                chops.add(cell)
            elif ch == "S":
                delivery.add(cell)
            elif ch in _ITEM_GLYPHS:
                counters.add(cell)
                kind = _ITEM_GLYPHS[ch]
                items.append(OcItem(uid(kind), kind, cell, None))
            elif ch == "A":
                floor.add(cell)
                agent_pos[0] = cell
            elif ch == "Z":
                floor.add(cell)
                agent_pos[1] = cell
            else:
                raise ScenarioError(f"unknown glyph {ch!r} at {cell}")

    if sorted(agent_pos) != [0, 1]:
        raise ScenarioError("layout must place both agents (A and Z)")
    for g in goals:
        if g not in RECIPES:
            raise ScenarioError(f"unknown recipe {g!r}")

    rooms: dict[Cell, int] = {}
    next_room = 0
    for cell in sorted(floor):
        if cell in rooms or cell in doors:
            continue
        q = deque([cell])
        rooms[cell] = next_room
        while q:
            cx, cy = q.popleft()
            for dx, dy in DIRECTIONS.values():
                n = (cx + dx, cy + dy)
                if n in floor and n not in doors and n not in rooms:
                    rooms[n] = next_room
                    q.append(n)
        next_room += 1
    for cell in sorted(doors):
        rooms[cell] = next_room
        next_room += 1

    border = frozenset(
        (x, y)
        for x in range(width)
        for y in range(height)
        if x in (0, width - 1) or y in (0, height - 1)
    )
    lay = OcLayout(
        layout_id=layout_id,
        width=width,
        height=height,
        floor=frozenset(floor),
        doors=frozenset(doors),
        counters=frozenset(counters),
        chop_stations=frozenset(chops),
        delivery_stations=frozenset(delivery),
        rooms=rooms,
        border=border,
    )
    return OcState(
        layout=lay,
        items=tuple(items),
        agent_pos=(agent_pos[0], agent_pos[1]),
        delivered_by=(frozenset(), frozenset()),
        goals=goals,
        done=(False, False),
        timestep=0,
    )


_GLYPH_BY_KIND = {
    "fresh_tomato": "T", "chopped_tomato": "t", "plated_tomato": "m",
    "fresh_lettuce": "L", "chopped_lettuce": "l", "plated_lettuce": "n",
    "fresh_onion": "O", "chopped_onion": "o", "plated_onion": "p",
    "plate": "P",
}


def render(state: OcState) -> list[str]:
    lay = state.layout
    grid = [[" " for _ in range(lay.width)] for _ in range(lay.height)]
    for y in range(lay.height):
        for x in range(lay.width):
            c = (x, y)
            if c in lay.counters:
                grid[y][x] = "#"
            elif c in lay.chop_stations:
                grid[y][x] = "X"
            elif c in lay.delivery_stations:
                grid[y][x] = "S"
            elif c in lay.doors:
                grid[y][x] = "/"
            elif c in lay.floor:
                grid[y][x] = "."
    for it in state.items:
        if it.cell is not None:
            x, y = it.cell
            grid[y][x] = _GLYPH_BY_KIND[it.kind]
    for i, (x, y) in enumerate(state.agent_pos):
        grid[y][x] = "AZ"[i]
    return ["".join(row) for row in grid]


def legal_actions(state: OcState, agent: int) -> list[str]:
    lay = state.layout
    pos = state.agent_pos[agent]
    acts = []
    for name, (dx, dy) in DIRECTIONS.items():
        if lay.walkable((pos[0] + dx, pos[1] + dy)):
            acts.append(name)
    acts.append("stay")
    for name, (dx, dy) in DIRECTIONS.items():
        if lay.surface((pos[0] + dx, pos[1] + dy)):
            acts.append(f"interact:{name}")
    return acts


def _apply_interact(state: OcState, agent: int, target: Cell,
                    items: list[OcItem], delivered: list, done: list) -> None:
    lay = state.layout
    if not lay.surface(target):
        return

    def idx_of(it: OcItem) -> int:
        return next(i for i, x in enumerate(items) if x.item_id == it.item_id)

    held = next((it for it in items if it.holder == agent), None)
    on_cell = next((it for it in items if it.cell == target), None)

    if held is None:
        if on_cell is None:
            return
        if target in lay.chop_stations and on_cell.kind.startswith("fresh_"):
            ing = on_cell.kind.split("_", 1)[1]
            items[idx_of(on_cell)] = replace(on_cell, kind=chopped(ing))
        else:
            items[idx_of(on_cell)] = replace(on_cell, cell=None, holder=agent)
        return

    # holding something
    if target in lay.delivery_stations:
        if held.kind.startswith("plated_"):
            ing = held.kind.split("_", 1)[1]
            recipe = next(r for r, i in RECIPES.items() if i == ing)
            items.remove(held)
            delivered[agent] = delivered[agent] | {recipe}
            if recipe == state.goals[agent]:
                done[agent] = True
        return
    if on_cell is not None:
        pair = {held.kind, on_cell.kind}
        ing = next((i for i in INGREDIENTS if chopped(i) in pair), None)
        if ing is not None and "plate" in pair:
            # merge chopped + plate into a plated meal held by the agent
            items.remove(on_cell)
            held2 = next(it for it in items if it.holder == agent)
            items[idx_of(held2)] = replace(held2, kind=plated(ing))
        return
    if target in lay.chop_stations:
        if held.kind.startswith("fresh_"):
            items[idx_of(held)] = replace(held, cell=target, holder=None)
        return
    # plain counter, empty: put down
    items[idx_of(held)] = replace(held, cell=target, holder=None)


def transition(state: OcState, joint: list[str]) -> OcState:
    lay = state.layout
    items = list(state.items)
    pos = list(state.agent_pos)
    delivered = list(state.delivered_by)
    done = list(state.done)
    for agent, action in enumerate(joint):
        if action in DIRECTIONS:
            dx, dy = DIRECTIONS[action]
            target = (pos[agent][0] + dx, pos[agent][1] + dy)
            if lay.walkable(target) and target != pos[1 - agent]:
                pos[agent] = target
        elif action == "stay":
            pass
        elif action.startswith("interact:"):
            d = action.split(":")[1]
            if d not in DIRECTIONS:
                raise ScenarioError(f"malformed interact direction {action!r}")
            dx, dy = DIRECTIONS[d]
            target = (pos[agent][0] + dx, pos[agent][1] + dy)
            snapshot = replace(state, items=tuple(items), agent_pos=tuple(pos))
            _apply_interact(snapshot, agent, target, items, delivered, done)
        else:
            raise ScenarioError(f"malformed overcooked action {action!r}")
    return replace(
        state,
        items=tuple(items),
        agent_pos=tuple(pos),
        delivered_by=tuple(delivered),
        done=tuple(done),
        timestep=state.timestep + 1,
    )


# ---------------------------------------------------------------------------
# Observation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OcVisible:
    """The room-limited view of one agent: visible cells, items on them,
    visible agents, plus the agent's own position and held item."""

    agent: int
    pos: Cell
    held_kind: Optional[str]
    cells: frozenset[Cell]
    items: tuple[OcItem, ...]
    agents_seen: tuple[tuple[int, Cell], ...]
    delivered_by: tuple[frozenset, ...]
    timestep: int


def visible_cells(layout: OcLayout, room: int) -> frozenset[Cell]:
    cells = set(c for c, r in layout.rooms.items() if r == room)
    for c in list(cells):
        for dx, dy in DIRECTIONS.values():
            n = (c[0] + dx, c[1] + dy)
            if layout.surface(n):
                cells.add(n)
    return frozenset(cells)


def observe(state: OcState, agent: int) -> OcVisible:
    room = state.room_of(agent)
    cells = visible_cells(state.layout, room)
    held = state.held(agent)
    seen = []
    for i, p in enumerate(state.agent_pos):
        if i == agent or p in cells:
            seen.append((i, p))
    items = tuple(
        it for it in state.items
        if (it.cell is not None and it.cell in cells) or it.holder == agent
        or (it.holder is not None and state.agent_pos[it.holder] in cells)
    )
    return OcVisible(
        agent=agent,
        pos=state.agent_pos[agent],
        held_kind=held.kind if held else None,
        cells=cells,
        items=items,
        agents_seen=tuple(seen),
        delivered_by=state.delivered_by,
        timestep=state.timestep,
    )


# ---------------------------------------------------------------------------
# Movement distances (static per layout; agents ignored while planning)
# ---------------------------------------------------------------------------

_move_dist: dict[tuple, dict[Cell, int]] = {}
_layouts: dict[str, OcLayout] = {}


def clear_caches() -> None:
    _move_dist.clear()
    _layouts.clear()


def _dist_map(layout: OcLayout, target: Cell) -> dict[Cell, int]:
    """Steps from every walkable cell to `target` (itself walkable)."""
    key = (layout.layout_id, target)
    cached = _move_dist.get(key)
    if cached is not None:
        return cached
    dist = {target: 0}
    q = deque([target])
    while q:
        c = q.popleft()
        for dx, dy in DIRECTIONS.values():
            n = (c[0] + dx, c[1] + dy)
            if n in layout.floor and n not in dist:
                dist[n] = dist[c] + 1
                q.append(n)
    _move_dist[key] = dist
    return dist


def move_distance(layout: OcLayout, start: Cell, target: Cell) -> int:
    return _dist_map(layout, target).get(start, INF_OC)


INF_OC = 10**6


def access_cost(state_or_layout, agent_pos: Cell, cell: Cell) -> int:
    """Steps to stand adjacent to `cell` plus one interact."""
    layout = state_or_layout.layout if isinstance(state_or_layout, OcState) else state_or_layout
    best = INF_OC
    for dx, dy in DIRECTIONS.values():
        n = (cell[0] + dx, cell[1] + dy)
        if n in layout.floor:
            best = min(best, move_distance(layout, agent_pos, n))
    return best + 1 if best < INF_OC else INF_OC


def item_access(state: OcState, agent: int, item_id: str) -> tuple[bool, int]:
    """Whether the agent can walk adjacent to the item and interact, and the
    optimal cost of doing so."""
    it = state.item(item_id)
    if it is None:
        return (False, INF_OC)
    if it.holder == agent:
        return (True, 0)
    if it.holder is not None:
        return (False, INF_OC)
    cost = access_cost(state, state.agent_pos[agent], it.cell)
    return (cost < INF_OC, cost)
