/**
 * Pure scene geometry: letterboxed world-to-canvas mapping and the shapes
 * derived from a frame (agent glyphs, sensor wedges, belief ellipses).
 * Everything here is deterministic math so it can be unit tested; the
 * actual canvas painting lives in main.ts.
 */

import type { AgentView, BeliefView, FramePayload, Workspace } from "./protocol.js";

export interface Viewport {
  /** canvas pixels per world meter (uniform in x and y) */
  scale: number;
  /** canvas position of the workspace's lower-left corner */
  offsetX: number;
  offsetY: number;
  workspace: Workspace;
}

/** Fit the workspace into the canvas, preserving aspect ratio (letterbox). */
export function fitWorkspace(
  workspace: Workspace,
  canvasWidth: number,
  canvasHeight: number,
  margin = 16,
): Viewport {
  const worldW = workspace.x_high - workspace.x_low;
  const worldH = workspace.y_high - workspace.y_low;
  const scale = Math.min(
    (canvasWidth - 2 * margin) / worldW,
    (canvasHeight - 2 * margin) / worldH,
  );
  return {
    scale,
    offsetX: (canvasWidth - worldW * scale) / 2,
    offsetY: (canvasHeight - worldH * scale) / 2,
    workspace,
  };
}

/** World point to canvas pixels; the canvas y axis grows downward. */
export function worldToCanvas(vp: Viewport, x: number, y: number): [number, number] {
  const ws = vp.workspace;
  return [
    vp.offsetX + (x - ws.x_low) * vp.scale,
    vp.offsetY + (ws.y_high - y) * vp.scale,
  ];
}

/** Heading in radians: cars carry yaw in the state vector, point masses
 * face their velocity (or 0 at rest). */
export function headingOf(agent: AgentView): number {
  if (agent.kind === "car") return agent.state[4] ?? 0;
  const vx = agent.state[2] ?? 0;
  const vy = agent.state[3] ?? 0;
  return vx === 0 && vy === 0 ? 0 : Math.atan2(vy, vx);
}

export interface WedgeShape {
  cx: number;
  cy: number;
  radius: number; // world meters
  startAngle: number;
  endAngle: number;
  /** true when the opponent is currently inside this wedge */
  highlighted: boolean;
}

export function sensorWedge(
  agent: AgentView,
  sensor: { fov_angle: number; range: number },
  visible: boolean,
): WedgeShape {
  const heading = headingOf(agent);
  return {
    cx: agent.state[0] ?? 0,
    cy: agent.state[1] ?? 0,
    radius: sensor.range,
    startAngle: heading - sensor.fov_angle / 2,
    endAngle: heading + sensor.fov_angle / 2,
    highlighted: visible,
  };
}

export interface EllipseShape {
  cx: number;
  cy: number;
  /** semi-axes at two standard deviations, world meters */
  rx: number;
  ry: number;
  /** component weight normalized so the heaviest renders fully opaque */
  opacity: number;
}

export function beliefEllipses(belief: BeliefView): EllipseShape[] {
  const heaviest = Math.max(...belief.weights, 1e-12);
  return belief.means.map((mean, k) => ({
    cx: mean[0],
    cy: mean[1],
    rx: 2 * (belief.stddevs[k]?.[0] ?? 0),
    ry: 2 * (belief.stddevs[k]?.[1] ?? 0),
    opacity: (belief.weights[k] ?? 0) / heaviest,
  }));
}

export interface Scene {
  wedges: { pursuer: WedgeShape; evader: WedgeShape };
  ellipses: EllipseShape[];
  overlay: "CAPTURE" | "TIMEOUT" | null;
}

/** Everything drawable derived from one frame payload. */
export function buildScene(payload: FramePayload): Scene {
  return {
    wedges: {
      pursuer: sensorWedge(payload.pursuer, payload.sensors.pursuer,
        payload.flags.pursuer === 1),
      evader: sensorWedge(payload.evader, payload.sensors.evader,
        payload.flags.evader === 1),
    },
    ellipses: payload.belief ? beliefEllipses(payload.belief) : [],
    overlay: payload.terminal === "capture" ? "CAPTURE"
      : payload.terminal === "timeout" ? "TIMEOUT" : null,
  };
}
