import { describe, expect, it } from "vitest";

import {
  PROTOCOL_VERSION,
  actionMessage,
  configureMessage,
  helloMessage,
  parseServerMessage,
} from "../src/protocol.js";

export function validFrame(overrides: Record<string, unknown> = {}) {
  return {
    type: "frame",
    seq: 3,
    payload: {
      tick: 7,
      pursuer: { kind: "car", state: [0, 0, 0, 1, 0.5] },
      evader: { kind: "pointmass", state: [2, 2, 0.1, -0.2] },
      flags: { pursuer: 1, evader: -1 },
      sensors: {
        pursuer: { fov_angle: 2.0944, range: 6 },
        evader: { fov_angle: 6.2832, range: 6 },
      },
      rewards: { pursuer: -3.5, evader: 3.5 },
      terminal: null,
      paused: false,
      workspace: { x_low: -8, x_high: 8, y_low: -8, y_high: 8 },
      ...overrides,
    },
  };
}

describe("frame parsing", () => {
  it("accepts a well-formed frame", () => {
    const result = parseServerMessage(JSON.stringify(validFrame()));
    expect(result.ok).toBe(true);
    if (result.ok && result.message.type === "frame") {
      expect(result.message.payload.tick).toBe(7);
    }
  });

  it("accepts an optional belief block", () => {
    const frame = validFrame({
      belief: {
        weights: [0.6, 0.4],
        means: [[1, 2], [3, 4]],
        stddevs: [[0.1, 0.2], [0.3, 0.4]],
      },
    });
    expect(parseServerMessage(JSON.stringify(frame)).ok).toBe(true);
  });

  it("rejects non-JSON input", () => {
    const result = parseServerMessage("{nope");
    expect(result.ok).toBe(false);
  });

  it("rejects a frame with a missing required field", () => {
    const frame = validFrame();
    delete (frame.payload as Record<string, unknown>).flags;
    const result = parseServerMessage(JSON.stringify(frame));
    expect(result.ok).toBe(false);
    if (!result.ok) expect(result.error).toContain("flags");
  });

  it("rejects unexpected extra fields", () => {
    const result = parseServerMessage(
      JSON.stringify(validFrame({ surprise: true })),
    );
    expect(result.ok).toBe(false);
  });

  it("rejects out-of-domain visibility flags", () => {
    const frame = validFrame({ flags: { pursuer: 0, evader: 1 } });
    expect(parseServerMessage(JSON.stringify(frame)).ok).toBe(false);
  });

  it("rejects a negative mixture stddev", () => {
    const frame = validFrame({
      belief: { weights: [1], means: [[0, 0]], stddevs: [[-0.1, 0.2]] },
    });
    expect(parseServerMessage(JSON.stringify(frame)).ok).toBe(false);
  });

  it("parses ack and error messages", () => {
    const ack = parseServerMessage(
      JSON.stringify({ type: "ack", seq: 1, payload: { configured: true } }),
    );
    expect(ack.ok && ack.message.type === "ack").toBe(true);
    const err = parseServerMessage(
      JSON.stringify({ type: "error", seq: 1, payload: { error: "nope" } }),
    );
    expect(err.ok && err.message.type === "error").toBe(true);
  });
});

describe("client message builders", () => {
  it("hello carries the protocol version", () => {
    expect(helloMessage(1).payload.protocol).toBe(PROTOCOL_VERSION);
  });

  it("configure forwards arena and overlay flag", () => {
    const msg = configureMessage(2, { timeout: 100 }, { beliefOverlay: true });
    expect(msg.payload.arena).toEqual({ timeout: 100 });
    expect(msg.payload.belief_overlay).toBe(true);
  });

  it("actions are clamped into [-1, 1]", () => {
    const msg = actionMessage(5, 3.2, -7);
    expect(msg.payload.u1).toBe(1);
    expect(msg.payload.u2).toBe(-1);
  });

  it("in-range actions pass through unchanged", () => {
    const msg = actionMessage(5, 0.25, -0.5);
    expect(msg.payload.u1).toBeCloseTo(0.25);
    expect(msg.payload.u2).toBeCloseTo(-0.5);
  });
});
