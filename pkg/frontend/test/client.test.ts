import { describe, expect, it } from "vitest";

import { ClientSession } from "../src/client.js";
import { validFrame } from "./protocol.test.js";

function makeSession() {
  const sent: Array<Record<string, unknown>> = [];
  const session = new ClientSession((msg) => {
    sent.push(JSON.parse(JSON.stringify(msg)) as Record<string, unknown>);
  });
  return { session, sent };
}

function handshake(session: ClientSession) {
  session.hello();
  session.handleMessage(
    JSON.stringify({ type: "ack", seq: 1, payload: { protocol: 1, session: "s" } }),
  );
}

describe("handshake", () => {
  it("moves to ready after the hello ack", () => {
    const { session } = makeSession();
    expect(session.phase).toBe("connecting");
    handshake(session);
    expect(session.phase).toBe("ready");
  });

  it("fails when the server rejects the protocol version", () => {
    const { session } = makeSession();
    session.hello();
    session.handleMessage(
      JSON.stringify({
        type: "error",
        seq: 1,
        payload: { error: "unsupported protocol", supported: [1] },
      }),
    );
    expect(session.phase).toBe("failed");
    expect(session.errors.length).toBe(1);
  });
});

describe("frame handling", () => {
  it("replaces the mirrored frame on each valid frame", () => {
    const { session } = makeSession();
    handshake(session);
    session.handleMessage(JSON.stringify(validFrame()));
    expect(session.frame?.tick).toBe(7);
  });

  it("rejects an invalid frame without touching the mirror", () => {
    const { session } = makeSession();
    handshake(session);
    session.handleMessage(JSON.stringify(validFrame()));
    const bad = validFrame({ flags: { pursuer: 0, evader: 1 } });
    session.handleMessage(JSON.stringify(bad));
    expect(session.frame?.tick).toBe(7);
    expect(session.errors.length).toBe(1);
  });
});

describe("action gating", () => {
  it("sends at most one action per server tick", () => {
    const { session, sent } = makeSession();
    handshake(session);
    session.handleMessage(JSON.stringify(validFrame()));
    expect(session.sendAction(0.5, 0)).toBe(true);
    expect(session.sendAction(0.5, 0)).toBe(false);
    const frame = validFrame();
    (frame.payload as Record<string, unknown>).tick = 8;
    session.handleMessage(JSON.stringify(frame));
    expect(session.sendAction(0.5, 0)).toBe(true);
    const actions = sent.filter((m) => m.type === "action");
    expect(actions.length).toBe(2);
  });

  it("never sends before the first frame arrives", () => {
    const { session, sent } = makeSession();
    handshake(session);
    expect(session.sendAction(1, 1)).toBe(false);
    expect(sent.filter((m) => m.type === "action")).toHaveLength(0);
  });

  it("a terminal frame disables input", () => {
    const { session } = makeSession();
    handshake(session);
    session.handleMessage(JSON.stringify(validFrame({ terminal: "capture" })));
    expect(session.inputEnabled).toBe(false);
    expect(session.sendAction(1, 0)).toBe(false);
  });

  it("reset clears the per-tick action latch", () => {
    const { session } = makeSession();
    handshake(session);
    session.handleMessage(JSON.stringify(validFrame()));
    session.sendAction(1, 0);
    session.reset(42);
    const frame = validFrame();
    (frame.payload as Record<string, unknown>).tick = 7;
    session.handleMessage(JSON.stringify(frame));
    expect(session.sendAction(1, 0)).toBe(true);
  });

  it("outgoing actions stay inside [-1, 1]", () => {
    const { session, sent } = makeSession();
    handshake(session);
    session.handleMessage(JSON.stringify(validFrame()));
    session.sendAction(9, -9);
    const action = sent.find((m) => m.type === "action") as {
      payload: { u1: number; u2: number };
    };
    expect(action.payload.u1).toBe(1);
    expect(action.payload.u2).toBe(-1);
  });
});

describe("malformed server input", () => {
  it("records a parse error and keeps running", () => {
    const { session } = makeSession();
    handshake(session);
    session.handleMessage("not json");
    expect(session.phase).toBe("ready");
    expect(session.errors.length).toBe(1);
  });
});
