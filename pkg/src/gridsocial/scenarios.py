"""Authored scenario suites and random scenario generators.

Every suite covers three situations: feedback cannot help (agents are
self-sufficient), feedback helps (both agents could finish alone, but a
well-placed directive shortens the episode), and feedback is essential
(one agent is physically unable to finish without the other's help).
"""

from __future__ import annotations

import random

from .core import AgentSpec, ScenarioConfig, fork_rng

MDKG_T_MAX = 80
OC_T_MAX = 100


def _mdkg(sid: str, layout: list[str], cat: str, goals=("gem1", "gem2"),
          goal_sets=None, t_max: int = MDKG_T_MAX, seed: int = 42) -> ScenarioConfig:
    goal_sets = goal_sets or [("gem1", "gem2"), ("gem1", "gem2")]
    agents = tuple(
        AgentSpec(goal=g, goal_set=tuple(s), policy="boltzmann")
        for g, s in zip(goals, goal_sets)
    )
    return ScenarioConfig(scenario_id=sid, env="mdkg", layout=tuple(layout),
                          agents=agents, category=cat, t_max=t_max, seed=seed)


def _oc(sid: str, layout: list[str], cat: str, goals, goal_sets,
        t_max: int = OC_T_MAX, seed: int = 42) -> ScenarioConfig:
    agents = tuple(
        AgentSpec(goal=g, goal_set=tuple(s), policy="heuristic")
        for g, s in zip(goals, goal_sets)
    )
    return ScenarioConfig(scenario_id=sid, env="overcooked", layout=tuple(layout),
                          agents=agents, category=cat, t_max=t_max, seed=seed)


# ---------------------------------------------------------------------------
# mDKG: feedback not needed (no doors, both gems in the open)
# ---------------------------------------------------------------------------

MDKG_NOT_NEEDED = [
    _mdkg("mdkg-nn-1", [
        "########",
        "#A....1#",
        "#......#",
        "#Z....2#",
        "########",
    ], "not-needed"),
    _mdkg("mdkg-nn-2", [
        "######",
        "#A.1.#",
        "#....#",
        "#.2.Z#",
        "######",
    ], "not-needed"),
    _mdkg("mdkg-nn-3", [
        "##########",
        "#A......2#",
        "#........#",
        "#1......Z#",
        "##########",
    ], "not-needed"),
    _mdkg("mdkg-nn-4", [
        "#######",
        "#A...1#",
        "#..#..#",
        "#..#..#",
        "#Z...2#",
        "#######",
    ], "not-needed"),
    _mdkg("mdkg-nn-5", [
        "#########",
        "#1.A....#",
        "#..###..#",
        "#Z......#",
        "#2......#",
        "#########",
    ], "not-needed"),
    _mdkg("mdkg-nn-6", [
        "######",
        "#A...#",
        "#.12.#",
        "#...Z#",
        "######",
    ], "not-needed"),
]

# ---------------------------------------------------------------------------
# mDKG: feedback useful.  A gem sits in a niche behind a locked door on a
# two-row corridor; the matching key lies at the far end next to the other
# agent, who can fetch and unlock much sooner than the gem's owner.
# ---------------------------------------------------------------------------

MDKG_USEFUL = [
    _mdkg("mdkg-u-1", [
        "###############",
        "#A.........2.r#",
        "#...........Z.#",
        "#######R#######",
        "#######1#######",
        "###############",
    ], "useful"),
    _mdkg("mdkg-u-2", [
        "###############",
        "#b.2.........A#",
        "#.Z...........#",
        "#######B#######",
        "#######1#######",
        "###############",
    ], "useful"),
    _mdkg("mdkg-u-3", [
        "###############",
        "#Z.........1.g#",
        "#...........A.#",
        "#######G#######",
        "#######2#######",
        "###############",
    ], "useful"),
    _mdkg("mdkg-u-4", [
        "#############",
        "#A.......2.y#",
        "#.........Z.#",
        "#####Y#######",
        "#####1#######",
        "#############",
    ], "useful"),
    _mdkg("mdkg-u-5", [
        "#################",
        "#A...........2.g#",
        "#.............Z.#",
        "########G########",
        "########1########",
        "#################",
    ], "useful"),
    _mdkg("mdkg-u-6", [
        "###############",
        "#r.1.........Z#",
        "#.A...........#",
        "#######R#######",
        "#######2#######",
        "###############",
    ], "useful"),
    _mdkg("mdkg-u-7", [
        "###############",
        "#A........b..2#",
        "#..........Z..#",
        "#######B#######",
        "#######1#######",
        "###############",
    ], "useful"),
    _mdkg("mdkg-u-8", [
        "###############",
        "#A..........2.#",
        "#.............#",
        "#...........Zr#",
        "#######R#######",
        "#######1#######",
        "###############",
    ], "useful"),
]

# ---------------------------------------------------------------------------
# mDKG: feedback necessary.  The helper starts sealed in a room that holds
# the only matching key (and usually its own gem); the other agent's gem is
# locked away and unreachable without that key.
# ---------------------------------------------------------------------------

MDKG_NECESSARY = [
    _mdkg("mdkg-n-1", [
        "###########",
        "#A....#..1#",
        "#.....R...#",
        "####R######",
        "#Z.r.2....#",
        "###########",
    ], "necessary"),
    _mdkg("mdkg-n-2", [
        "###########",
        "#1..#....A#",
        "#...B.....#",
        "######B####",
        "#....2.b.Z#",
        "###########",
    ], "necessary"),
    _mdkg("mdkg-n-3", [
        "###########",
        "#Z....#..2#",
        "#.....R...#",
        "####R######",
        "#A.r.1....#",
        "###########",
    ], "necessary"),
    _mdkg("mdkg-n-4", [
        "############",
        "#.......GZg#",
        "#A.......###",
        "##.........#",
        "#1G......2.#",
        "############",
    ], "necessary"),
    _mdkg("mdkg-n-5", [
        "############",
        "#yAY.......#",
        "###......Z.#",
        "#.........##",
        "#.1......Y2#",
        "############",
    ], "necessary"),
    _mdkg("mdkg-n-6", [
        "#############",
        "#A.....#...1#",
        "#......R....#",
        "#####R#######",
        "#Z..r...2...#",
        "#############",
    ], "necessary"),
]

# ---------------------------------------------------------------------------
# Overcooked: feedback not needed (each cook's room is fully stocked)
# ---------------------------------------------------------------------------

OC_NOT_NEEDED = [
    _oc("oc-nn-1", [
        "###X###X###",
        "#TP..#..PL#",
        "#A.../...Z#",
        "#....#....#",
        "##S#####S##",
    ], "not-needed", ("SimpleTomato", "SimpleLettuce"),
        [("SimpleTomato", "SimpleLettuce"), ("SimpleLettuce", "SimpleTomato")]),
    _oc("oc-nn-2", [
        "###X###X###",
        "#LP..#..PO#",
        "#A.../...Z#",
        "#....#....#",
        "##S#####S##",
    ], "not-needed", ("SimpleLettuce", "SimpleOnion"),
        [("SimpleLettuce", "SimpleOnion"), ("SimpleOnion", "SimpleLettuce")]),
    _oc("oc-nn-3", [
        "###X###X###",
        "#OP..#..PT#",
        "#A.../...Z#",
        "#....#....#",
        "##S#####S##",
    ], "not-needed", ("SimpleOnion", "SimpleTomato"),
        [("SimpleOnion", "SimpleTomato"), ("SimpleTomato", "SimpleOnion")]),
    _oc("oc-nn-4", [
        "####X####X####",
        "#T.P...#...PL#",
        "#.A..../....Z#",
        "#......#.....#",
        "###S######S###",
    ], "not-needed", ("SimpleTomato", "SimpleLettuce"),
        [("SimpleTomato", "SimpleLettuce"), ("SimpleLettuce", "SimpleTomato")]),
    _oc("oc-nn-5", [
        "##X#####X##",
        "#T.P.#.P.L#",
        "#....#....#",
        "#A.../...Z#",
        "##S#####S##",
    ], "not-needed", ("SimpleTomato", "SimpleLettuce"),
        [("SimpleTomato", "SimpleLettuce"), ("SimpleLettuce", "SimpleTomato")]),
    _oc("oc-nn-6", [
        "##X#####X##",
        "#O.P.#.P.T#",
        "#....#....#",
        "#A.../...Z#",
        "##S#####S##",
    ], "not-needed", ("SimpleOnion", "SimpleTomato"),
        [("SimpleOnion", "SimpleLettuce"), ("SimpleTomato", "SimpleLettuce")]),
    _oc("oc-nn-7", [
        "###X###X###",
        "#LP..#..PL#",
        "#A.../...Z#",
        "#....#....#",
        "##S#####S##",
    ], "not-needed", ("SimpleLettuce", "SimpleLettuce"),
        [("SimpleLettuce", "SimpleTomato"), ("SimpleLettuce", "SimpleTomato")]),
]

# ---------------------------------------------------------------------------
# Overcooked: feedback useful.  Either the cook's ingredient lies across the
# kitchen next to a mostly idle partner (a pass shortens the fetch), or both
# cooks converge on the same instance and one is redirected to a spare.
# ---------------------------------------------------------------------------

OC_USEFUL = [
    _oc("oc-u-1", [
        "###X######X####",
        "#.............#",
        "#A...#..#..L.T#",
        "#....#..#...Z.#",
        "#P............#",
        "####S#####S##P#",
    ], "useful", ("SimpleTomato", "SimpleLettuce"),
        [("SimpleTomato", "SimpleLettuce"), ("SimpleLettuce", "SimpleTomato")]),
    _oc("oc-u-2", [
        "####X######X###",
        "#.............#",
        "#O.L..#..#...Z#",
        "#.A...#..#....#",
        "#............P#",
        "#P##S#####S####",
    ], "useful", ("SimpleLettuce", "SimpleOnion"),
        [("SimpleLettuce", "SimpleOnion"), ("SimpleOnion", "SimpleLettuce")]),
    _oc("oc-u-3", [
        "###X######X####",
        "#.............#",
        "#A...#..#..T.O#",
        "#....#..#...Z.#",
        "#P............#",
        "####S#####S##P#",
    ], "useful", ("SimpleOnion", "SimpleTomato"),
        [("SimpleOnion", "SimpleTomato"), ("SimpleTomato", "SimpleOnion")]),
    _oc("oc-u-4", [
        "###X########X##",
        "#..........P..#",
        "#A....#.#..L.T#",
        "#.....#.#..Z..#",
        "#P............#",
        "####S######S###",
    ], "useful", ("SimpleTomato", "SimpleLettuce"),
        [("SimpleTomato", "SimpleLettuce"), ("SimpleLettuce", "SimpleTomato")]),
    _oc("oc-u-5", [
        "####X##X####",
        "#..........#",
        "#.A..T..Z..#",
        "#..........#",
        "#..P.....P.#",
        "##S#####S#T#",
    ], "useful", ("SimpleTomato", "SimpleTomato"),
        [("SimpleTomato", "SimpleLettuce"), ("SimpleTomato", "SimpleLettuce")]),
    _oc("oc-u-6", [
        "####X##X####",
        "#..........#",
        "#.A..L..Z..#",
        "#..........#",
        "#..P.....P.#",
        "##S#####S#L#",
    ], "useful", ("SimpleLettuce", "SimpleLettuce"),
        [("SimpleLettuce", "SimpleOnion"), ("SimpleLettuce", "SimpleOnion")]),
    _oc("oc-u-7", [
        "####X##X####",
        "#..........#",
        "#..Z..O..A.#",
        "#..........#",
        "#.P.....P..#",
        "#O#S#####S##",
    ], "useful", ("SimpleOnion", "SimpleOnion"),
        [("SimpleOnion", "SimpleTomato"), ("SimpleOnion", "SimpleTomato")]),
]

# ---------------------------------------------------------------------------
# Overcooked: feedback necessary.  The rooms are disconnected; one cook's
# key ingredient (or only plate) sits in the other room and must be passed
# over a shared counter.
# ---------------------------------------------------------------------------

OC_NECESSARY = [
    _oc("oc-n-1", [
        "###X###X###",
        "#O...#..LT#",
        "#A...#...Z#",
        "#....#....#",
        "#....#....#",
        "#P.S###S.P#",
    ], "necessary", ("SimpleTomato", "SimpleLettuce"),
        [("SimpleTomato", "SimpleOnion"), ("SimpleLettuce", "SimpleTomato")]),
    _oc("oc-n-2", [
        "###X###X###",
        "#TL..#...O#",
        "#A...#...Z#",
        "#....#....#",
        "#....#....#",
        "#P.S###S.P#",
    ], "necessary", ("SimpleTomato", "SimpleLettuce"),
        [("SimpleTomato", "SimpleOnion"), ("SimpleLettuce", "SimpleOnion")]),
    _oc("oc-n-3", [
        "###X###X###",
        "#LO.T#....#",
        "#Z...#...A#",
        "#....#....#",
        "#....#....#",
        "#P.S###S.P#",
    ], "necessary", ("SimpleTomato", "SimpleLettuce"),
        [("SimpleTomato", "SimpleOnion"), ("SimpleLettuce", "SimpleTomato")]),
    _oc("oc-n-4", [
        "###X###X###",
        "#T...#..PL#",
        "#A...#...Z#",
        "#....#....#",
        "#....#....#",
        "#..S###S.P#",
    ], "necessary", ("SimpleTomato", "SimpleLettuce"),
        [("SimpleTomato", "SimpleLettuce"), ("SimpleLettuce", "SimpleTomato")]),
    _oc("oc-n-5", [
        "####X###X####",
        "#O....#...LT#",
        "#A....#....Z#",
        "#.....#.....#",
        "#.....#.....#",
        "#P.S####S..P#",
    ], "necessary", ("SimpleTomato", "SimpleLettuce"),
        [("SimpleTomato", "SimpleOnion"), ("SimpleLettuce", "SimpleTomato")]),
    _oc("oc-n-6", [
        "###X###X###",
        "#L...#..OT#",
        "#A...#...Z#",
        "#....#....#",
        "#....#....#",
        "#P.S###S.P#",
    ], "necessary", ("SimpleOnion", "SimpleTomato"),
        [("SimpleOnion", "SimpleLettuce"), ("SimpleTomato", "SimpleOnion")]),
    _oc("oc-n-7", [
        "###X###X###",
        "#O..T#..L.#",
        "#Z...#...A#",
        "#....#....#",
        "#....#....#",
        "#P.S###S.P#",
    ], "necessary", ("SimpleOnion", "SimpleTomato"),
        [("SimpleOnion", "SimpleLettuce"), ("SimpleTomato", "SimpleOnion")]),
]


def mdkg_scenarios() -> list[ScenarioConfig]:
    return MDKG_NOT_NEEDED + MDKG_USEFUL + MDKG_NECESSARY


def overcooked_scenarios() -> list[ScenarioConfig]:
    return OC_NOT_NEEDED + OC_USEFUL + OC_NECESSARY


# ---------------------------------------------------------------------------
# Random scenario generators (used by tests and the validator)
# ---------------------------------------------------------------------------

def random_mdkg_scenario(seed: int, scenario_id: str = "", max_size: int = 6,
                         with_door: bool = True) -> ScenarioConfig:
    """A small random layout: open interior, both gems, optionally one
    locked door plus matching key dropped on free floor."""
    rng = fork_rng(seed, "random-mdkg")
    w = rng.randint(5, max_size)
    h = rng.randint(5, max_size)
    cells = [(x, y) for x in range(1, w - 1) for y in range(1, h - 1)]
    rng.shuffle(cells)
    glyphs = dict.fromkeys(cells, ".")
    spots = iter(cells)
    glyphs[next(spots)] = "A"
    glyphs[next(spots)] = "Z"
    glyphs[next(spots)] = "1"
    glyphs[next(spots)] = "2"
    if with_door and rng.random() < 0.7:
        try:
            glyphs[next(spots)] = "R"
            glyphs[next(spots)] = "r"
        except StopIteration:
            pass
    rows = []
    for y in range(h):
        row = ""
        for x in range(w):
            if x in (0, w - 1) or y in (0, h - 1):
                row += "#"
            else:
                row += glyphs[(x, y)]
        rows.append(row)
    sid = scenario_id or f"mdkg-rand-{seed}"
    return _mdkg(sid, rows, "useful", seed=seed)


def random_overcooked_scenario(seed: int, scenario_id: str = "") -> ScenarioConfig:
    """A single random kitchen room with the fixtures for two simple
    recipes."""
    rng = fork_rng(seed, "random-oc")
    w = rng.randint(7, 10)
    h = rng.randint(6, 8)
    interior = [(x, y) for x in range(1, w - 1) for y in range(1, h - 1)]
    rng.shuffle(interior)
    glyphs = dict.fromkeys(interior, ".")
    spots = iter(interior)
    ings = rng.sample(["T", "L", "O"], 2)
    for g in ("A", "Z", ings[0], ings[1], "P", "P"):
        glyphs[next(spots)] = g
    border = [(x, 0) for x in range(2, w - 2)] + [(x, h - 1) for x in range(2, w - 2)]
    rng.shuffle(border)
    fixtures = dict.fromkeys(border)
    fixtures[border[0]] = "X"
    fixtures[border[1]] = "X"
    fixtures[border[2]] = "S"
    fixtures[border[3]] = "S"
    rows = []
    for y in range(h):
        row = ""
        for x in range(w):
            if (x, y) in glyphs:
                row += glyphs[(x, y)]
            elif fixtures.get((x, y)):
                row += fixtures[(x, y)]
            else:
                row += "#"
        rows.append(row)
    kinds = {"T": "SimpleTomato", "L": "SimpleLettuce", "O": "SimpleOnion"}
    goals = (kinds[ings[0]], kinds[ings[1]])
    goal_sets = [tuple(sorted({kinds[ings[0]], kinds[ings[1]]}))] * 2
    sid = scenario_id or f"oc-rand-{seed}"
    return _oc(sid, rows, "useful", goals, goal_sets, seed=seed)
