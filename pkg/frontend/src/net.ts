/** Session connection: one WebSocket per seat, server-message dispatch,
 * and reconnect that rebuilds the view purely from the next server
 * observation (the client keeps no authoritative state). */

import type { ClientMessage, ServerMessage } from "./protocol.js";
import { schemaProblem } from "./protocol.js";

export interface SessionHandlers {
  onMessage(msg: ServerMessage): void;
  onSchemaError(reason: string): void;
  onClose(): void;
}

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev: unknown) => void) | null;
}

export class SessionConnection {
  private socket: SocketLike;

  constructor(socket: SocketLike, private handlers: SessionHandlers) {
    this.socket = socket;
    this.attach(socket);
  }

  private attach(socket: SocketLike): void {
    socket.onmessage = (ev) => {
      let parsed: unknown;
      try {
        parsed = JSON.parse(ev.data);
      } catch {
        this.handlers.onSchemaError("payload is not JSON");
        return;
      }
      const problem = schemaProblem(parsed);
      if (problem !== null) {
        this.handlers.onSchemaError(problem);
        return;
      }
      this.handlers.onMessage(parsed as ServerMessage);
    };
    socket.onclose = () => this.handlers.onClose();
  }

  send(msg: ClientMessage): void {
    this.socket.send(JSON.stringify(msg));
  }

  /** Swap in a fresh socket after a drop; the server re-sends the current
   * observation so the view is restored without client-side replay. */
  reconnect(socket: SocketLike, seat: number): void {
    this.socket.close();
    this.socket = socket;
    this.attach(socket);
    this.send({ type: "join", seat });
    this.send({ type: "ready" });
  }
}

export function wsUrl(base: string, sessionId: string): string {
  return `${base.replace(/^http/, "ws")}/sessions/${sessionId}/ws`;
}
