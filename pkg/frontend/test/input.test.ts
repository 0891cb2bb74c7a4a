import { describe, expect, it } from "vitest";

import { InputState, KEY_ACTIONS } from "../src/input.js";
import type { Observation } from "../src/protocol.js";

function obs(tick: number, feedback: Observation["feedback"] = null): Observation {
  return {
    protocol: 1, type: "observation", tick, seat: 0,
    render: ["###"], legend: { "#": "wall" }, own_goal: "gem1", feedback,
  };
}

describe("key to message mapping", () => {
  it("maps arrows to moves", () => {
    const input = new InputState();
    expect(input.message("ArrowUp", obs(0)))
      .toEqual({ type: "action", tick: 0, action: "up" });
    expect(new InputState().message("ArrowLeft", obs(4)))
      .toEqual({ type: "action", tick: 4, action: "left" });
  });

  it("maps space to interact", () => {
    expect(new InputState().message(" ", obs(2)))
      .toEqual({ type: "action", tick: 2, action: "interact" });
  });

  it("maps the ignore key to an ignore message for the pending feedback", () => {
    const fb = {
      message_id: "m9", kind: "unlock", actor: 0, beneficiary: 1, args: {},
      text: "", explanation: "",
    };
    expect(new InputState().message("x", obs(1, fb)))
      .toEqual({ type: "ignore_feedback", id: "m9" });
    expect(new InputState().message("x", obs(1))).toBeNull();
  });

  it("ignores unbound keys", () => {
    expect(new InputState().message("q", obs(0))).toBeNull();
    expect(KEY_ACTIONS.q).toBeUndefined();
  });
});

describe("one submission per tick", () => {
  it("suppresses a second action for the same tick", () => {
    const input = new InputState();
    expect(input.message("ArrowUp", obs(5))).not.toBeNull();
    expect(input.message("ArrowDown", obs(5))).toBeNull();
    expect(input.message("ArrowDown", obs(6))).not.toBeNull();
  });

  it("ignore is not throttled by the action lock", () => {
    const fb = {
      message_id: "m1", kind: "pass", actor: 0, beneficiary: 1, args: {},
      text: "", explanation: "",
    };
    const input = new InputState();
    expect(input.message("ArrowUp", obs(5, fb))).not.toBeNull();
    expect(input.message("x", obs(5, fb))).toEqual(
      { type: "ignore_feedback", id: "m1" });
  });

  it("resyncs to the server tick after a stale rejection", () => {
    const input = new InputState();
    input.message("ArrowUp", obs(5));
    input.resync(7); // server says we are actually at tick 7
    expect(input.message("ArrowUp", obs(7))).not.toBeNull();
  });
});
