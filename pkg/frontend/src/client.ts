/**
 * Session state machine over the arena protocol.
 *
 * Transport-agnostic: messages go out through an injected sender and come
 * back through handleMessage, so the logic runs identically under a real
 * WebSocket and in tests. The session renders only server-authoritative
 * frames — there is no client-side prediction — and sends at most one
 * action per server tick.
 */

import {
  ClientMessage,
  FramePayload,
  PROTOCOL_VERSION,
  actionMessage,
  configureMessage,
  helloMessage,
  parseServerMessage,
  resetMessage,
} from "./protocol.js";

export type Sender = (message: ClientMessage) => void;

export type SessionPhase = "connecting" | "ready" | "failed";

export class ClientSession {
  phase: SessionPhase = "connecting";
  /** latest validated frame payload; the renderer's single source of truth */
  frame: FramePayload | null = null;
  lastAckedSeq = 0;
  errors: string[] = [];

  private seq = 0;
  private lastActionTick = -1;

  constructor(private readonly send: Sender) {}

  private nextSeq(): number {
    this.seq += 1;
    return this.seq;
  }

  hello(): void {
    this.send(helloMessage(this.nextSeq()));
  }

  configure(arena: Record<string, unknown>,
            options: { policy?: Record<string, unknown>; beliefOverlay?: boolean } = {}): void {
    this.send(configureMessage(this.nextSeq(), arena, options));
  }

  reset(seed: number): void {
    this.send(resetMessage(this.nextSeq(), seed));
    this.lastActionTick = -1;
  }

  /** True while the session accepts evader input. */
  get inputEnabled(): boolean {
    return this.phase === "ready" && this.frame !== null &&
      this.frame.terminal === null;
  }

  /**
   * Send the human action, at most once per server tick. Returns whether
   * the action actually went out.
   */
  sendAction(u1: number, u2: number): boolean {
    if (!this.inputEnabled) return false;
    const tick = this.frame!.tick;
    if (tick === this.lastActionTick) return false;
    this.lastActionTick = tick;
    this.send(actionMessage(this.nextSeq(), u1, u2));
    return true;
  }

  /** Feed one raw server message; invalid frames are surfaced, never drawn. */
  handleMessage(text: string): void {
    const parsed = parseServerMessage(text);
    if (!parsed.ok) {
      this.errors.push(parsed.error);
      return;
    }
    const msg = parsed.message;
    if (msg.type === "error") {
      this.errors.push(msg.payload.error);
      if (this.phase === "connecting") this.phase = "failed";
      return;
    }
    if (msg.type === "ack") {
      this.lastAckedSeq = Math.max(this.lastAckedSeq, msg.seq);
      if (this.phase === "connecting" && "protocol" in msg.payload) {
        this.phase = msg.payload.protocol === PROTOCOL_VERSION ? "ready" : "failed";
        if (this.phase === "failed") {
          this.errors.push(`server speaks protocol ${String(msg.payload.protocol)}, ` +
            `client needs ${PROTOCOL_VERSION}`);
        }
      }
      return;
    }
    this.frame = msg.payload;
  }
}
