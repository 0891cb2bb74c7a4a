/** DOM rendering. Every function draws only what its payload contains:
 * fog cells arrive as "?" from the server, the own goal is the only goal
 * in any observation, and the partner's goal exists solely in the
 * episode_end payload. */

import type { EpisodeEnd, FeedbackPayload, Observation } from "./protocol.js";

function el(tag: string, cls: string, text = ""): HTMLElement {
  const node = document.createElement(tag);
  node.className = cls;
  if (text) node.textContent = text;
  return node;
}

function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** Agent glyphs by seat, mirroring the server legend ordering. */
const SEAT_GLYPHS = ["A", "Z"];

export function renderObservation(root: HTMLElement, obs: Observation): void {
  clear(root);
  const header = el("div", "status-bar");
  header.appendChild(el("span", "tick", `tick ${obs.tick}`));
  header.appendChild(el("span", "goal-card", `your goal: ${obs.own_goal}`));
  root.appendChild(header);

  const grid = el("div", "grid");
  const ownGlyph = SEAT_GLYPHS[obs.seat];
  for (const row of obs.render) {
    const rowNode = el("div", "grid-row");
    for (const ch of row) {
      const cls = ch === "?" ? "cell fog" : ch === ownGlyph ? "cell self" : "cell";
      rowNode.appendChild(el("span", cls, ch));
    }
    grid.appendChild(rowNode);
  }
  root.appendChild(grid);

  const legend = el("ul", "legend");
  const present = new Set(obs.render.join(""));
  for (const [glyph, name] of Object.entries(obs.legend)) {
    if (present.has(glyph)) {
      legend.appendChild(el("li", "legend-entry", `${glyph}: ${name}`));
    }
  }
  root.appendChild(legend);

  if (obs.feedback !== null) {
    root.appendChild(feedbackCard(obs.feedback));
  }
}

function feedbackCard(fb: FeedbackPayload): HTMLElement {
  const card = el("div", "feedback-card");
  card.dataset.messageId = fb.message_id;
  card.appendChild(el("p", "feedback-text", fb.text));
  card.appendChild(el("p", "feedback-explanation", fb.explanation));
  card.appendChild(el("button", "feedback-follow", "Follow"));
  const ignore = el("button", "feedback-ignore", "Ignore (x)");
  card.appendChild(ignore);
  return card;
}

export function renderEndScreen(root: HTMLElement, end: EpisodeEnd): void {
  clear(root);
  const screen = el("div", "end-screen");
  const outcome = end.completion.success ? "Success" : "Out of time";
  screen.appendChild(el("h2", "end-outcome", outcome));
  screen.appendChild(el("p", "end-length", `episode length: ${end.completion.length}`));
  screen.appendChild(
    el("p", "end-partner-goal", `${end.other_name}'s goal was: ${end.other_goal}`));

  const table = el("table", "feedback-history");
  for (const seatHistory of end.feedback_history) {
    for (const entry of seatHistory) {
      const row = el("tr", "feedback-history-row");
      row.appendChild(el("td", "", entry.message.text));
      row.appendChild(el("td", `status-${entry.status.toLowerCase()}`, entry.status));
      table.appendChild(row);
    }
  }
  screen.appendChild(table);
  root.appendChild(screen);
}

export function renderErrorBanner(root: HTMLElement, text: string): void {
  let banner = root.querySelector<HTMLElement>(".error-banner");
  if (banner === null) {
    banner = el("div", "error-banner");
    root.prepend(banner);
  }
  banner.textContent = text;
}
