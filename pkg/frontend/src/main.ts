/** Entry point: join the session named in the query string and run the
 * keyboard-driven lockstep loop. */

import { InputState } from "./input.js";
import { SessionConnection, wsUrl } from "./net.js";
import type { Observation, ServerMessage } from "./protocol.js";
import { renderEndScreen, renderErrorBanner, renderObservation } from "./view.js";

export function start(root: HTMLElement): void {
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get("session");
  const seat = Number(params.get("seat") ?? "0");
  if (!sessionId) {
    renderErrorBanner(root, "missing ?session= query parameter");
    return;
  }

  const input = new InputState();
  let current: Observation | null = null;

  const handleMessage = (msg: ServerMessage): void => {
    switch (msg.type) {
      case "lobby_state":
        return;
      case "observation":
        current = msg;
        renderObservation(root, msg);
        return;
      case "tick_result":
        return;
      case "feedback_status":
        return;
      case "episode_end":
        current = null;
        renderEndScreen(root, msg);
        return;
      case "error":
        if (msg.error === "stale tick") {
          input.resync(msg.tick);
        } else {
          renderErrorBanner(root, msg.error);
        }
        return;
    }
  };

  const open = (): void => {
    const socket = new WebSocket(wsUrl(window.location.origin, sessionId));
    const conn = new SessionConnection(socket as never, {
      onMessage: handleMessage,
      onSchemaError: (reason) => renderErrorBanner(root, reason),
      onClose: () => renderErrorBanner(root, "connection lost, reloading"),
    });
    socket.addEventListener("open", () => {
      conn.send({ type: "join", seat });
      conn.send({ type: "ready" });
    });
    window.addEventListener("keydown", (ev) => {
      if (current === null) return;
      const msg = input.message(ev.key, current);
      if (msg !== null) conn.send(msg);
    });
  };

  open();
}
