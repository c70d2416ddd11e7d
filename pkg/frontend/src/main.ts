/**
 * Browser entry point: WebSocket wiring, canvas painting at the server's
 * 10 Hz cadence, keyboard/gamepad capture. All geometry comes from
 * render.ts; all protocol state lives in client.ts.
 */

import { ClientSession } from "./client.js";
import { InputState, type ActionPair } from "./input.js";
import {
  Scene,
  Viewport,
  buildScene,
  fitWorkspace,
  headingOf,
  worldToCanvas,
} from "./render.js";
import type { AgentView, FramePayload, Workspace } from "./protocol.js";

const DEFAULT_WORKSPACE: Workspace = { x_low: -8, x_high: 8, y_low: -8, y_high: 8 };
const DEFAULT_ARENA = { ...DEFAULT_WORKSPACE, timeout: 400 };

function gamepadAxes(): ActionPair | null {
  const pad = navigator.getGamepads?.()[0];
  if (!pad) return null;
  return [pad.axes[0] ?? 0, pad.axes[1] ?? 0];
}

function drawAgent(ctx: CanvasRenderingContext2D, vp: Viewport,
                   agent: AgentView, color: string): void {
  const [cx, cy] = worldToCanvas(vp, agent.state[0] ?? 0, agent.state[1] ?? 0);
  const heading = headingOf(agent);
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(cx, cy, 6, 0, 2 * Math.PI);
  ctx.fill();
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(cx, cy);
  ctx.lineTo(cx + 14 * Math.cos(heading), cy - 14 * Math.sin(heading));
  ctx.stroke();
}

function drawScene(ctx: CanvasRenderingContext2D, payload: FramePayload): void {
  const canvas = ctx.canvas;
  const vp = fitWorkspace(payload.workspace ?? DEFAULT_WORKSPACE,
    canvas.width, canvas.height);
  const scene: Scene = buildScene(payload);
  const ws = vp.workspace;

  ctx.clearRect(0, 0, canvas.width, canvas.height);

  // arena rectangle
  const [left, top] = worldToCanvas(vp, ws.x_low, ws.y_high);
  ctx.strokeStyle = "#444";
  ctx.strokeRect(left, top, (ws.x_high - ws.x_low) * vp.scale,
    (ws.y_high - ws.y_low) * vp.scale);

  // sensor wedges (canvas arcs run clockwise in screen space, so angles flip)
  for (const [name, wedge] of Object.entries(scene.wedges)) {
    const [cx, cy] = worldToCanvas(vp, wedge.cx, wedge.cy);
    ctx.fillStyle = wedge.highlighted
      ? "rgba(255, 200, 40, 0.30)"
      : name === "pursuer" ? "rgba(220, 60, 60, 0.12)" : "rgba(60, 120, 220, 0.12)";
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    ctx.arc(cx, cy, wedge.radius * vp.scale, -wedge.endAngle, -wedge.startAngle);
    ctx.closePath();
    ctx.fill();
  }

  // belief mixture ellipses
  for (const el of scene.ellipses) {
    const [cx, cy] = worldToCanvas(vp, el.cx, el.cy);
    ctx.strokeStyle = `rgba(40, 160, 90, ${(0.25 + 0.75 * el.opacity).toFixed(3)})`;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.ellipse(cx, cy, el.rx * vp.scale, el.ry * vp.scale, 0, 0, 2 * Math.PI);
    ctx.stroke();
  }

  drawAgent(ctx, vp, payload.pursuer, "#dc3c3c");
  drawAgent(ctx, vp, payload.evader, "#3c78dc");

  if (scene.overlay) {
    ctx.fillStyle = "rgba(0, 0, 0, 0.55)";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    ctx.fillStyle = "#fff";
    ctx.font = "bold 48px system-ui, sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(scene.overlay, canvas.width / 2, canvas.height / 2);
  }
}

function start(): void {
  const canvas = document.getElementById("arena") as HTMLCanvasElement;
  const status = document.getElementById("status") as HTMLElement;
  const ctx = canvas.getContext("2d")!;
  const input = new InputState();

  const url = `ws://${location.hostname || "127.0.0.1"}:8765/ws`;
  const socket = new WebSocket(url);
  const session = new ClientSession((msg) => socket.send(JSON.stringify(msg)));

  socket.onopen = () => {
    session.hello();
    session.configure(DEFAULT_ARENA, { beliefOverlay: true });
    session.reset(Math.floor(Math.random() * 1e6));
  };
  socket.onmessage = (event) => {
    session.handleMessage(String(event.data));
    if (session.frame) {
      drawScene(ctx, session.frame);
      status.textContent = session.frame.terminal
        ? `${session.frame.terminal} — press R to restart`
        : `tick ${session.frame.tick}`;
    }
    if (session.errors.length) {
      status.textContent = session.errors[session.errors.length - 1] ?? "";
    }
  };
  socket.onclose = () => {
    status.textContent = "disconnected";
  };

  window.addEventListener("keydown", (ev) => {
    if (ev.code === "KeyR") {
      input.clear();
      session.reset(Math.floor(Math.random() * 1e6));
      return;
    }
    if (input.keyDown(ev.code)) ev.preventDefault();
  });
  window.addEventListener("keyup", (ev) => input.keyUp(ev.code));
  window.addEventListener("blur", () => input.clear());

  // one action per frame tick; the session drops duplicates within a tick
  setInterval(() => {
    const [u1, u2] = input.action(gamepadAxes());
    session.sendAction(u1, u2);
  }, 50);
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", start);
}
