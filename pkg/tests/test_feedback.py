"""Feedback messages and directive execution."""

import pytest

from gridsocial import mdkg, overcooked as oc
from gridsocial.feedback import (
    FeedbackMessage,
    HandoverDirective,
    PassDirective,
    PickupDirective,
    UnlockDirective,
    handover_message,
    make_directive,
    nearest_free_counter,
    pass_message,
    pickup_message,
    shared_counters,
    unlock_message,
)

MDKG = [
    "#######",
    "#A.r.1#",
    "#..R..#",
    "#Z...2#",
    "#######",
]

TWO_ROOMS = [
    "###X###X###",
    "#T...#...L#",
    "#A...#...Z#",
    "#....#....#",
    "#P.S###S.P#",
]


def mstate():
    return mdkg.parse_layout(list(MDKG), ("gem1", "gem2"), "fb")


def ostate():
    return oc.parse_layout(list(TWO_ROOMS), ("SimpleTomato", "SimpleLettuce"), "fb-oc")


def test_message_texts_name_agents():
    m = unlock_message("m1", 0, "door_red", 1)
    assert m.text == "Alice, please unlock door red for Bob."
    m = handover_message("m2", 1, "key_red", 0)
    assert m.text == "Bob, please hand the key red over to Alice."
    m = pass_message("m3", 1, "fresh_lettuce1", "fresh_lettuce", (9, 1), 0, (4, 2))
    assert "pass the fresh lettuce" in m.text and "via the counter at 4,2" in m.text
    m = pickup_message("m4", 0, "fresh_tomato2", "fresh_tomato", (2, 2))
    assert "pick up the fresh tomato at 2,2 instead" in m.text


def test_message_json_round_trip_fields():
    m = pass_message("m3", 1, "i1", "plate", (9, 1), 0, (4, 2))
    back = FeedbackMessage(**m.to_json())
    assert back == m


def test_make_directive_dispatch():
    assert isinstance(make_directive(unlock_message("a", 0, "d", 1)), UnlockDirective)
    assert isinstance(make_directive(handover_message("b", 0, "k", 1)), HandoverDirective)
    assert isinstance(make_directive(pass_message("c", 0, "i", "plate", (1, 1), 1, (2, 2))), PassDirective)
    assert isinstance(make_directive(pickup_message("d", 0, "i", "plate", (1, 1))), PickupDirective)


def test_unlock_directive_executes_to_completion():
    s = mstate()
    d = make_directive(unlock_message("m", 0, "door_red", 1))
    assert d.feasible(s) and not d.completed(s)
    for _ in range(10):
        if d.completed(s):
            break
        a = d.next_action(s)
        s = mdkg.transition(s, [a, "stay"])
    assert d.completed(s)
    assert not s.door("door_red").locked
    assert s.timestep == 4  # matches the optimal plan length


def test_unlock_directive_infeasible_without_key_access():
    s = mdkg.parse_layout(
        ["#######", "#A#r.1#", "#Z#.R2#", "#######"], ("gem1", "gem2"), "fb2")
    d = make_directive(unlock_message("m", 0, "door_red", 1))
    assert not d.feasible(s)


def test_handover_directive_executes_to_completion():
    s = mstate()
    d = make_directive(handover_message("m", 0, "key_red", 1))
    for _ in range(15):
        if d.completed(s):
            break
        a = d.next_action(s)
        s = mdkg.transition(s, [a, "stay"])
    assert d.completed(s)
    assert s.item("key_red").holder == 1


def test_shared_counters_excludes_border():
    s = ostate()
    cells = shared_counters(s)
    assert cells, "separator counters should be shared"
    assert all(c not in s.layout.border for c in cells)
    assert all(c[0] == 5 for c in cells)  # the separating column


def test_nearest_free_counter_skips_occupied():
    s = ostate()
    c = nearest_free_counter(s, 0)
    assert s.item_at(c) is None
    assert c not in (it.cell for it in s.items)


def test_pass_directive_executes_to_completion():
    s = ostate()
    lettuce = next(it for it in s.items if it.kind == "fresh_lettuce")
    counter = shared_counters(s)[0]
    d = make_directive(pass_message("m", 1, lettuce.item_id, lettuce.kind,
                                    lettuce.cell, 0, counter))
    assert d.feasible(s)
    for _ in range(30):
        if d.completed(s):
            break
        a = d.next_action(s)
        s = oc.transition(s, ["stay", a])
    assert d.completed(s)
    assert s.item(lettuce.item_id).cell == counter


def test_pass_directive_stashes_wrong_held_item_first():
    s = ostate()
    s = oc.transition(s, ["stay", "interact:up"])  # Z grabs its lettuce
    tomato = next(it for it in s.items if it.kind == "fresh_tomato")
    counter = shared_counters(s)[0]
    d = make_directive(pass_message("m", 0, tomato.item_id, tomato.kind,
                                    tomato.cell, 1, counter))
    s2 = oc.transition(s, ["interact:up", "stay"])  # A holds its tomato already
    a = d.next_action(s2)
    # holding the right item: head for the counter, not a stash
    assert a in ("right", "down", "up", "left") or a.startswith("interact")
    plate = next(it for it in s2.items if it.kind == "plate" and it.cell[0] < 5)
    d2 = make_directive(pass_message("m2", 0, plate.item_id, "plate",
                                     plate.cell, 1, counter))
    # holding the wrong item for this directive: must stash it first
    steps = 0
    sx = s2
    while sx.held(0) is not None and steps < 10:
        ax = d2.next_action(sx)
        sx = oc.transition(sx, [ax, "stay"])
        steps += 1
    assert sx.held(0) is None


def test_pass_directive_infeasible_when_item_held_by_beneficiary():
    s = ostate()
    s = oc.transition(s, ["stay", "interact:up"])
    lettuce = next(it for it in s.items if it.kind == "fresh_lettuce")
    d = make_directive(pass_message("m", 0, lettuce.item_id, lettuce.kind,
                                    (9, 1), 1, shared_counters(s)[0]))
    # the actor cannot pass an item the other agent is holding
    assert not d.feasible(s)
    # but completion by possession counts
    d2 = make_directive(pass_message("m2", 0, lettuce.item_id, lettuce.kind,
                                     (9, 1), 1, shared_counters(s)[0]))
    assert d2.completed(s)


def test_pickup_directive_executes_to_completion():
    s = oc.parse_layout([
        "#X#####",
        "#A.T.P#",
        "#..T..#",
        "#S...Z#",
        "#######",
    ], ("SimpleTomato", "SimpleTomato"), "fb3")
    far = next(it for it in s.items if it.cell == (3, 2))
    d = make_directive(pickup_message("m", 1, far.item_id, far.kind, far.cell))
    assert d.feasible(s)
    for _ in range(15):
        if d.completed(s):
            break
        a = d.next_action(s)
        s = oc.transition(s, ["stay", a])
    assert d.completed(s)
    assert s.item(far.item_id).holder == 1


def test_pickup_directive_infeasible_when_taken():
    s = ostate()
    s = oc.transition(s, ["interact:up", "stay"])
    tomato = next(it for it in s.items if it.kind == "fresh_tomato")
    d = make_directive(pickup_message("m", 1, tomato.item_id, tomato.kind, (1, 1)))
    assert not d.feasible(s)
