import { describe, expect, it } from "vitest";

import { SessionConnection, wsUrl } from "../src/net.js";
import type { SocketLike } from "../src/net.js";
import type { ServerMessage } from "../src/protocol.js";
import { schemaProblem } from "../src/protocol.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: ((ev: unknown) => void) | null = null;
  send(data: string): void { this.sent.push(data); }
  close(): void { this.closed = true; }
  push(payload: unknown): void { this.onmessage?.({ data: JSON.stringify(payload) }); }
}

function connect(socket: FakeSocket) {
  const seen: ServerMessage[] = [];
  const errors: string[] = [];
  const conn = new SessionConnection(socket, {
    onMessage: (m) => seen.push(m),
    onSchemaError: (r) => errors.push(r),
    onClose: () => errors.push("closed"),
  });
  return { conn, seen, errors };
}

describe("schemaProblem", () => {
  it("accepts a well-formed observation", () => {
    expect(schemaProblem({
      protocol: 1, type: "observation", tick: 0, seat: 0,
      render: ["#"], legend: {}, own_goal: "gem1", feedback: null,
    })).toBeNull();
  });

  it("names both protocol versions on a mismatch", () => {
    const reason = schemaProblem({ protocol: 2, type: "observation" });
    expect(reason).toContain("client 1");
    expect(reason).toContain("server 2");
  });

  it("rejects shapeless payloads", () => {
    expect(schemaProblem(null)).not.toBeNull();
    expect(schemaProblem({})).not.toBeNull();
    expect(schemaProblem({ type: "observation", protocol: 1 })).not.toBeNull();
  });
});

describe("SessionConnection", () => {
  it("dispatches valid messages and surfaces schema errors", () => {
    const socket = new FakeSocket();
    const { seen, errors } = connect(socket);
    socket.push({ type: "tick_result", tick: 1, actions: {}, status_events: [], done: false });
    socket.onmessage?.({ data: "not json{" });
    socket.push({ protocol: 9, type: "observation" });
    expect(seen.map((m) => m.type)).toEqual(["tick_result"]);
    expect(errors.length).toBe(2);
  });

  it("serialises outbound messages as JSON", () => {
    const socket = new FakeSocket();
    const { conn } = connect(socket);
    conn.send({ type: "action", tick: 4, action: "up" });
    expect(JSON.parse(socket.sent[0])).toEqual({ type: "action", tick: 4, action: "up" });
  });

  it("reconnect closes the old socket and rejoins the seat", () => {
    const first = new FakeSocket();
    const { conn, seen } = connect(first);
    const second = new FakeSocket();
    conn.reconnect(second, 1);
    expect(first.closed).toBe(true);
    expect(second.sent.map((s) => JSON.parse(s).type)).toEqual(["join", "ready"]);
    // the replacement socket now feeds the same handler chain
    second.push({ type: "feedback_status", id: "m1", status: "Ignored" });
    expect(seen.at(-1)?.type).toBe("feedback_status");
  });
});

describe("wsUrl", () => {
  it("derives the socket endpoint from the http origin", () => {
    expect(wsUrl("http://localhost:8000", "abc")).toBe("ws://localhost:8000/sessions/abc/ws");
    expect(wsUrl("https://host", "abc")).toBe("wss://host/sessions/abc/ws");
  });
});
