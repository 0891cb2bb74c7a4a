/** Keyboard handling: a plain mapping table plus one-shot submission per
 * tick. The resolved action string is sent verbatim; the server decides
 * what "interact" means in context. */

import type { ClientMessage, Observation } from "./protocol.js";

export const KEY_ACTIONS: Record<string, string> = {
  ArrowUp: "up",
  ArrowDown: "down",
  ArrowLeft: "left",
  ArrowRight: "right",
  " ": "interact",
  s: "stay",
};

export const IGNORE_KEY = "x";

export class InputState {
  private submittedTick: number | null = null;

  /** Translate a key press into the client message to send, or null if the
   * key is unbound or this tick's action already went out. */
  message(key: string, obs: Observation): ClientMessage | null {
    if (key === IGNORE_KEY) {
      if (obs.feedback === null) return null;
      return { type: "ignore_feedback", id: obs.feedback.message_id };
    }
    const action = KEY_ACTIONS[key];
    if (action === undefined) return null;
    if (this.submittedTick === obs.tick) return null;
    this.submittedTick = obs.tick;
    return { type: "action", tick: obs.tick, action };
  }

  /** The server rejected our tick number; trust its counter again. */
  resync(serverTick: number | undefined): void {
    if (serverTick !== undefined && this.submittedTick !== serverTick) {
      this.submittedTick = null;
    }
  }
}
