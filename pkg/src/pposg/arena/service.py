"""Real-time arena: one live episode per session at a 10 Hz tick.

The session logic is pure and synchronous (tick in, frame out) so recorded
action traces replay deterministically; the WebSocket layer on top handles
pacing, per-session mailboxes (latest human action wins) and broadcast.
"""

from __future__ import annotations

import asyncio
import importlib.resources
import json
import math
import time

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from ..config import EnvConfig, env_config_from_dict
from ..policies import (GreedyEvaderPolicy, LearnedPolicy, Policy,
                        PurePursuitPolicy, RandomWalkEvaderPolicy)
from ..sim import Action, PursuitEvasionEnv
from ..sim.sensing import visibility

PROTOCOL_VERSION = 1
TICK_HZ = 10.0


def frame_schema() -> dict:
    ref = importlib.resources.files("pposg.arena.schema") / "frame.schema.json"
    return json.loads(ref.read_text())


class SessionError(Exception):
    pass


def _scripted_pursuer(name: str, config: EnvConfig) -> Policy:
    if name == "pure_pursuit":
        return PurePursuitPolicy(config)
    raise SessionError(f"unknown scripted pursuer {name!r}")


def load_pursuer_policy(spec: dict, config: EnvConfig) -> Policy:
    """Policy from {"scripted": name} or {"checkpoint": path, "variant": v}."""
    if "scripted" in spec:
        return _scripted_pursuer(spec["scripted"], config)
    if "checkpoint" in spec:
        from ..marl import load_trained_ensemble
        try:
            ensemble, train_cfg, _ = load_trained_ensemble(spec["checkpoint"])
        except Exception as e:
            raise SessionError(f"checkpoint load failed: {e}") from e
        variant = spec.get("variant", train_cfg.belief_variant)
        nets = ensemble.agents["pursuer"]
        return LearnedPolicy(nets.actor, config, "pursuer", variant=variant,
                             bimdn=nets.bimdn,
                             history_length=train_cfg.history_length,
                             history_downsample=train_cfg.history_downsample)
    raise SessionError("policy spec needs 'scripted' or 'checkpoint'")


class ArenaSession:
    """Single-owner session state: the world, the pursuer policy, mailbox."""

    def __init__(self, session_id: str):
        self.session_id = session_id
        self.config: EnvConfig | None = None
        self.env: PursuitEvasionEnv | None = None
        self.pursuer: Policy | None = None
        self.belief_overlay = False
        self.tick_count = 0
        self.seq = 0
        self.paused = True
        self.human_action = Action(0.0, 0.0)
        self.last_result = None
        self.last_rewards = (0.0, 0.0)

    def _next_seq(self) -> int:
        self.seq += 1
        return self.seq

    # -- message handling -------------------------------------------------------

    def handle_message(self, msg: dict) -> dict:
        """Apply one client message and return the acknowledgement."""
        if not isinstance(msg, dict) or "type" not in msg:
            return self._error(msg, "malformed message: missing type")
        kind = msg["type"]
        seq = msg.get("seq", 0)
        payload = msg.get("payload") or {}
        try:
            if kind == "hello":
                version = payload.get("protocol")
                if version != PROTOCOL_VERSION:
                    return self._error(msg, "unsupported protocol version",
                                       supported=[PROTOCOL_VERSION])
                return self._ack(seq, session=self.session_id,
                                 protocol=PROTOCOL_VERSION)
            if kind == "configure":
                return self._configure(seq, payload)
            if kind == "reset":
                return self._reset(seq, payload.get("seed", 0))
            if kind == "action":
                return self._action(seq, payload)
            if kind == "pause":
                self.paused = True
                return self._ack(seq, paused=True)
            if kind == "resume":
                if self.env is None or self.env.terminal:
                    return self._error(msg, "nothing to resume")
                self.paused = False
                return self._ack(seq, paused=False)
            if kind == "bye":
                return self._ack(seq, bye=True)
            return self._error(msg, f"unknown message type {kind!r}")
        except SessionError as e:
            return self._error(msg, str(e))

    def _configure(self, seq: int, payload: dict) -> dict:
        config = env_config_from_dict(payload.get("arena", {}))
        self.pursuer = load_pursuer_policy(payload.get("policy", {"scripted": "pure_pursuit"}),
                                           config)
        self.config = config
        self.env = PursuitEvasionEnv(config)
        self.belief_overlay = bool(payload.get("belief_overlay", False))
        return self._ack(seq, configured=True)

    def _reset(self, seq: int, seed: int) -> dict:
        if self.env is None:
            raise SessionError("configure before reset")
        self.pursuer.reset(seed)
        self.last_result = self.env.reset(np.random.default_rng(seed))
        self.tick_count = 0
        self.paused = False
        self.human_action = Action(0.0, 0.0)
        self.last_rewards = (0.0, 0.0)
        return self._ack(seq, reset=True, seed=seed)

    def _action(self, seq: int, payload: dict) -> dict:
        u1 = float(payload.get("u1", 0.0))
        u2 = float(payload.get("u2", 0.0))
        clamped = not (-1.0 <= u1 <= 1.0 and -1.0 <= u2 <= 1.0)
        self.human_action = Action(u1, u2).clamped()
        ack = self._ack(seq, action=[self.human_action.u1, self.human_action.u2])
        if clamped:
            ack["payload"]["warning"] = "action clamped to [-1, 1]"
        return ack

    def _ack(self, seq: int, **payload) -> dict:
        return {"type": "ack", "seq": seq, "payload": payload}

    def _error(self, msg, text: str, **extra) -> dict:
        payload = {"error": text, **extra}
        seq = msg.get("seq", 0) if isinstance(msg, dict) else 0
        return {"type": "error", "seq": seq, "payload": payload}

    # -- ticking -----------------------------------------------------------------

    def tick(self) -> dict | None:
        """Advance one decision step and return the broadcast frame."""
        if self.env is None or self.last_result is None:
            return None
        if not self.paused and not self.env.terminal:
            a_p = self.pursuer.act(self.last_result.obs_p)
            self.last_result = self.env.step(a_p, self.human_action)
            self.last_rewards = (self.last_result.r_p, self.last_result.r_e)
            self.tick_count += 1
            if self.last_result.terminal:
                self.paused = True  # auto-pause on capture/timeout
        return self.frame()

    def frame(self) -> dict:
        cfg = self.config
        state = self.last_result.state
        p, e = state.pursuer, state.evader
        flag_p = visibility(p.position(), p.heading(), self.env._sensor("pursuer"),
                            e.position())
        flag_e = visibility(e.position(), e.heading(), self.env._sensor("evader"),
                            p.position())
        payload = {
            "tick": self.tick_count,
            "pursuer": {"kind": cfg.pursuer.kind, "state": p.as_vector().tolist()},
            "evader": {"kind": cfg.evader.kind, "state": e.as_vector().tolist()},
            "flags": {"pursuer": flag_p, "evader": flag_e},
            "sensors": {
                "pursuer": {"fov_angle": cfg.pursuer.sensor.fov_angle,
                            "range": cfg.pursuer.sensor.range},
                "evader": {"fov_angle": (2.0 * math.pi if cfg.evader.kind == "pointmass"
                                         else cfg.evader.sensor.fov_angle),
                           "range": cfg.evader.sensor.range},
            },
            "rewards": {"pursuer": self.last_rewards[0], "evader": self.last_rewards[1]},
            "terminal": self.env.cause,
            "paused": self.paused,
            "workspace": {"x_low": cfg.x_low, "x_high": cfg.x_high,
                          "y_low": cfg.y_low, "y_high": cfg.y_high},
        }
        if self.belief_overlay and isinstance(self.pursuer, LearnedPolicy) and \
                self.pursuer.bimdn is not None and len(self.pursuer.history):
            mix = self.pursuer.bimdn.predict(*self.pursuer.history.window(),
                                             cfg.center, cfg.half_extents)
            payload["belief"] = {"weights": mix.weights.tolist(),
                                 "means": mix.means.tolist(),
                                 "stddevs": mix.stddevs.tolist()}
        return {"type": "frame", "seq": self._next_seq(), "payload": payload}


def create_app(lockstep: bool = False):
    """FastAPI app exposing the arena protocol at /ws.

    lockstep=True ticks once per received action message instead of on the
    wall clock; used by headless clients and deterministic replay tests.
    """
    app = FastAPI()
    app.state.sessions = {}

    @app.get("/schema/frame")
    def get_schema():
        return frame_schema()

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        session = ArenaSession(session_id=f"s{id(ws) & 0xffff:04x}")
        app.state.sessions[session.session_id] = session
        ticker: asyncio.Task | None = None

        async def tick_loop():
            # absolute-deadline pacing; simulation dt is unaffected by jitter
            deadline = time.monotonic()
            while True:
                deadline += 1.0 / TICK_HZ
                delay = deadline - time.monotonic()
                if delay > 0:
                    await asyncio.sleep(delay)
                frame = session.tick()
                if frame is not None:
                    try:
                        await ws.send_text(json.dumps(frame))
                    except Exception:
                        return

        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_text(json.dumps(
                        {"type": "error", "seq": 0,
                         "payload": {"error": "invalid JSON"}}))
                    continue
                reply = session.handle_message(msg if isinstance(msg, dict) else {})
                await ws.send_text(json.dumps(reply))
                if reply["type"] == "ack" and msg.get("type") == "bye":
                    break
                if reply["type"] == "error":
                    continue
                if msg.get("type") == "reset" and reply["type"] == "ack":
                    frame = session.frame()
                    await ws.send_text(json.dumps(frame))
                    if not lockstep and ticker is None:
                        ticker = asyncio.create_task(tick_loop())
                if lockstep and msg.get("type") == "action":
                    frame = session.tick()
                    if frame is not None:
                        await ws.send_text(json.dumps(frame))
        except WebSocketDisconnect:
            pass
        finally:
            if ticker is not None:
                ticker.cancel()
            app.state.sessions.pop(session.session_id, None)

    return app


def serve(bind: str = "127.0.0.1:8765", lockstep: bool = False) -> None:
    """Run the arena service until interrupted."""
    import uvicorn

    host, _, port = bind.partition(":")
    uvicorn.run(create_app(lockstep=lockstep), host=host or "127.0.0.1",
                port=int(port or 8765), log_level="warning")
