/** Wire types for the play service. The client renders exactly what the
 * server sends and adds no world knowledge of its own. */

export const PROTOCOL_VERSION = 1;

export interface FeedbackPayload {
  message_id: string;
  kind: string;
  actor: number;
  beneficiary: number | null;
  args: Record<string, unknown>;
  text: string;
  explanation: string;
}

export interface Observation {
  protocol: number;
  type: "observation";
  tick: number;
  seat: number;
  render: string[];
  legend: Record<string, string>;
  own_goal: string;
  feedback: FeedbackPayload | null;
}

export interface TickResult {
  type: "tick_result";
  tick: number;
  actions: Record<string, string>;
  status_events: { agent: number; message_id: string; status: string }[];
  done: boolean;
}

export interface EpisodeEnd {
  type: "episode_end";
  other_goal: string;
  other_name: string;
  completion: { success: boolean; length: number };
  feedback_history: { message: FeedbackPayload; status: string }[][];
}

export interface FeedbackStatus {
  type: "feedback_status";
  id: string;
  status: string;
}

export interface LobbyState {
  type: "lobby_state";
  protocol: number;
  phase: string;
  joined: number[];
  ready: number[];
}

export interface ServerError {
  type: "error";
  error: string;
  tick?: number;
}

export type ServerMessage =
  | Observation
  | TickResult
  | EpisodeEnd
  | FeedbackStatus
  | LobbyState
  | ServerError;

export type ClientMessage =
  | { type: "join"; seat: number }
  | { type: "ready" }
  | { type: "action"; tick: number; action: string }
  | { type: "ignore_feedback"; id: string };

/** Null when the payload is usable, otherwise a human-readable reason
 * including both protocol versions so the error banner can show them. */
export function schemaProblem(msg: unknown): string | null {
  if (typeof msg !== "object" || msg === null) return "payload is not an object";
  const m = msg as Record<string, unknown>;
  if (typeof m.type !== "string") return "payload has no type";
  if (m.type === "observation" || m.type === "lobby_state") {
    if (m.protocol !== PROTOCOL_VERSION) {
      return `protocol mismatch: client ${PROTOCOL_VERSION}, server ${m.protocol}`;
    }
  }
  if (m.type === "observation") {
    if (!Array.isArray(m.render)) return "observation without render rows";
    if (typeof m.legend !== "object" || m.legend === null) return "observation without legend";
    if (typeof m.tick !== "number") return "observation without tick";
  }
  return null;
}
