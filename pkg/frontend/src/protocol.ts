/**
 * Arena wire protocol: zod schemas mirroring the server's published frame
 * schema, plus builders for the client-side messages.
 *
 * Every inbound frame is validated structurally before it reaches the
 * renderer; a frame that fails validation is rejected whole.
 */

import { z } from "zod";

export const PROTOCOL_VERSION = 1;

const visibilityFlag = z.union([z.literal(-1), z.literal(1)]);

const agentSchema = z
  .object({
    kind: z.enum(["car", "pointmass"]),
    state: z.array(z.number()).min(4).max(5),
  })
  .strict();

const sensorSchema = z
  .object({
    fov_angle: z.number().positive(),
    range: z.number().positive(),
  })
  .strict();

const beliefSchema = z
  .object({
    weights: z.array(z.number().nonnegative()),
    means: z.array(z.tuple([z.number(), z.number()])),
    stddevs: z.array(z.tuple([z.number().positive(), z.number().positive()])),
  })
  .strict();

const workspaceSchema = z
  .object({
    x_low: z.number(),
    x_high: z.number(),
    y_low: z.number(),
    y_high: z.number(),
  })
  .strict();

export const framePayloadSchema = z
  .object({
    tick: z.number().int().nonnegative(),
    pursuer: agentSchema,
    evader: agentSchema,
    flags: z.object({ pursuer: visibilityFlag, evader: visibilityFlag }).strict(),
    sensors: z.object({ pursuer: sensorSchema, evader: sensorSchema }).strict(),
    rewards: z.object({ pursuer: z.number(), evader: z.number() }).strict(),
    terminal: z.union([z.literal("capture"), z.literal("timeout"), z.null()]),
    paused: z.boolean(),
    belief: beliefSchema.optional(),
    workspace: workspaceSchema.optional(),
  })
  .strict();

export const frameSchema = z
  .object({
    type: z.literal("frame"),
    seq: z.number().int().nonnegative(),
    payload: framePayloadSchema,
  })
  .strict();

const ackSchema = z.object({
  type: z.literal("ack"),
  seq: z.number().int(),
  payload: z.record(z.unknown()),
});

const errorSchema = z.object({
  type: z.literal("error"),
  seq: z.number().int(),
  payload: z.object({ error: z.string() }).passthrough(),
});

export const serverMessageSchema = z.discriminatedUnion("type", [
  frameSchema,
  ackSchema,
  errorSchema,
]);

export type Frame = z.infer<typeof frameSchema>;
export type FramePayload = z.infer<typeof framePayloadSchema>;
export type AgentView = z.infer<typeof agentSchema>;
export type BeliefView = z.infer<typeof beliefSchema>;
export type Workspace = z.infer<typeof workspaceSchema>;
export type ServerMessage = z.infer<typeof serverMessageSchema>;

export type ParseResult =
  | { ok: true; message: ServerMessage }
  | { ok: false; error: string };

export function parseServerMessage(text: string): ParseResult {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (e) {
    return { ok: false, error: `invalid JSON: ${String(e)}` };
  }
  const result = serverMessageSchema.safeParse(raw);
  if (!result.success) {
    return { ok: false, error: result.error.issues.map(formatIssue).join("; ") };
  }
  return { ok: true, message: result.data };
}

function formatIssue(issue: z.ZodIssue): string {
  return `${issue.path.join(".") || "(root)"}: ${issue.message}`;
}

export interface ClientMessage {
  type: string;
  seq: number;
  payload: Record<string, unknown>;
}

const clamp = (v: number) => Math.max(-1, Math.min(1, v));

export function helloMessage(seq: number): ClientMessage {
  return { type: "hello", seq, payload: { protocol: PROTOCOL_VERSION } };
}

export function configureMessage(
  seq: number,
  arena: Record<string, unknown>,
  options: { policy?: Record<string, unknown>; beliefOverlay?: boolean } = {},
): ClientMessage {
  const payload: Record<string, unknown> = { arena };
  if (options.policy) payload.policy = options.policy;
  if (options.beliefOverlay !== undefined) payload.belief_overlay = options.beliefOverlay;
  return { type: "configure", seq, payload };
}

export function resetMessage(seq: number, seed: number): ClientMessage {
  return { type: "reset", seq, payload: { seed } };
}

/** Action components are always clamped: the client never sends values
 * outside [-1, 1], whatever the input device reports. */
export function actionMessage(seq: number, u1: number, u2: number): ClientMessage {
  return { type: "action", seq, payload: { u1: clamp(u1), u2: clamp(u2) } };
}
