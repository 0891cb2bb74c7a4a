// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from "vitest";

import type { EpisodeEnd, Observation } from "../src/protocol.js";
import { renderEndScreen, renderErrorBanner, renderObservation } from "../src/view.js";

function observation(overrides: Partial<Observation> = {}): Observation {
  return {
    protocol: 1,
    type: "observation",
    tick: 3,
    seat: 0,
    render: ["#####", "#A.t#", "#???#", "#####"],
    legend: { "#": "wall", A: "you (Alice)", t: "tomato", "?": "not visible" },
    own_goal: "SimpleTomato",
    feedback: null,
    ...overrides,
  };
}

let root: HTMLElement;
beforeEach(() => {
  document.body.innerHTML = "<div id='app'></div>";
  root = document.getElementById("app") as HTMLElement;
});

describe("renderObservation", () => {
  it("draws fogged cells as fog and adds nothing behind them", () => {
    renderObservation(root, observation());
    const fog = root.querySelectorAll(".cell.fog");
    expect(fog.length).toBe(3);
    for (const cell of fog) expect(cell.textContent).toBe("?");
    // the grid holds exactly the payload characters, no extra glyphs
    const drawn = Array.from(root.querySelectorAll(".grid-row"))
      .map((r) => r.textContent).join("");
    expect(drawn).toBe("######A.t##???######");
  });

  it("lists every glyph present on the grid in the legend", () => {
    renderObservation(root, observation());
    const entries = Array.from(root.querySelectorAll(".legend-entry"))
      .map((e) => (e.textContent ?? "")[0]);
    for (const glyph of ["#", "A", "t", "?"]) {
      expect(entries).toContain(glyph);
    }
  });

  it("highlights the seat's own agent", () => {
    renderObservation(root, observation());
    const self = root.querySelector(".cell.self");
    expect(self?.textContent).toBe("A");
  });

  it("shows the feedback card in the same render as its arrival", () => {
    const fb = {
      message_id: "m1", kind: "pass", actor: 0, beneficiary: 1, args: {},
      text: "Alice, please pass the tomato to Bob.",
      explanation: "I believe Bob is trying to prepare SimpleTomato.",
    };
    renderObservation(root, observation({ feedback: fb }));
    const card = root.querySelector<HTMLElement>(".feedback-card");
    expect(card).not.toBeNull();
    expect(card?.dataset.messageId).toBe("m1");
    expect(card?.textContent).toContain("pass the tomato");
    expect(card?.textContent).toContain("I believe Bob");
    expect(card?.querySelector(".feedback-ignore")).not.toBeNull();
  });

  it("shows no card when no feedback is pending", () => {
    renderObservation(root, observation());
    expect(root.querySelector(".feedback-card")).toBeNull();
  });

  it("never leaks the partner goal before the end screen", () => {
    renderObservation(root, observation());
    expect(root.innerHTML).not.toContain("SimpleLettuce");
    expect(root.innerHTML).toContain("SimpleTomato"); // own goal card
  });
});

describe("renderEndScreen", () => {
  const end: EpisodeEnd = {
    type: "episode_end",
    other_goal: "SimpleLettuce",
    other_name: "Bob",
    completion: { success: true, length: 31 },
    feedback_history: [
      [{
        message: {
          message_id: "m1", kind: "pass", actor: 0, beneficiary: 1, args: {},
          text: "Alice, please pass the lettuce to Bob.", explanation: "",
        },
        status: "Completed",
      }],
      [],
    ],
  };

  it("reveals the partner recipe and completion outcome", () => {
    renderEndScreen(root, end);
    expect(root.textContent).toContain("Success");
    expect(root.textContent).toContain("Bob's goal was: SimpleLettuce");
  });

  it("tables the feedback history with statuses", () => {
    renderEndScreen(root, end);
    const row = root.querySelector(".feedback-history-row");
    expect(row?.textContent).toContain("pass the lettuce");
    expect(row?.querySelector(".status-completed")?.textContent).toBe("Completed");
  });

  it("replaces the live view entirely", () => {
    renderObservation(root, observation());
    renderEndScreen(root, end);
    expect(root.querySelector(".grid")).toBeNull();
  });
});

describe("renderErrorBanner", () => {
  it("shows one banner and updates it in place", () => {
    renderErrorBanner(root, "protocol mismatch: client 1, server 2");
    renderErrorBanner(root, "connection lost");
    const banners = root.querySelectorAll(".error-banner");
    expect(banners.length).toBe(1);
    expect(banners[0].textContent).toBe("connection lost");
  });
});
