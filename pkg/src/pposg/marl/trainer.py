"""Training loop: vectorized self-play, replay updates, belief co-training,
curriculum, metrics CSV and periodic checkpoints."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from ..belief import (ObservationHistory, UkfBelief, initial_belief, ukf_step,
                      belief_features)
from ..config import (TrainConfig, train_config_from_dict, train_config_to_dict,
                      config_hash)
from ..nn import Adam, Tensor, load_checkpoint, save_checkpoint
from ..nn.checkpoint import CheckpointFormatError
from ..sim import Action, VectorEnv, curriculum
from ..sim.types import CarState, JointState, PointMassState
from .buffers import ReplayBuffer, Transition
from .maddpg import AGENTS, MaddpgEnsemble

CHECKPOINT_VERSION = 1


def _normalized_position(state, config) -> np.ndarray:
    cx, cy = config.center
    hx, hy = config.half_extents
    return np.array([(state.sx - cx) / hx, (state.sy - cy) / hy], dtype=np.float32)


def _ukf_measurement(obs: np.ndarray, agent: str, config) -> np.ndarray | None:
    """Opponent position+velocity in meters from a visible observation."""
    if obs[-2] < 0:
        return None
    own_cfg = config.pursuer if agent == "pursuer" else config.evader
    opp_cfg = config.evader if agent == "pursuer" else config.pursuer
    own_w = own_cfg.state_width
    block = obs[own_w:own_w + opp_cfg.state_width]
    cx, cy = config.center
    hx, hy = config.half_extents
    pos = np.array([cx + block[0] * hx, cy + block[1] * hy])
    if opp_cfg.kind == "pointmass":
        vel = block[2:4] * opp_cfg.pointmass.v_max
    else:
        speed = block[3] * max(abs(opp_cfg.car.v_min), opp_cfg.car.v_max)
        psi = block[4] * math.pi
        vel = np.array([speed * math.cos(psi), speed * math.sin(psi)])
    return np.concatenate([pos, vel])


@dataclass
class _EnvSlot:
    prev_obs: dict
    obs: dict
    histories: dict
    ukf: dict


class Trainer:
    def __init__(self, config: TrainConfig, seed: int, out_dir: str,
                 include_buffers_in_checkpoints: bool = False):
        self.config = config
        self.seed = seed
        self.out_dir = out_dir
        self.include_buffers = include_buffers_in_checkpoints
        os.makedirs(out_dir, exist_ok=True)
        self.rng = np.random.default_rng(seed)
        self.obs_widths = {a: config.env.observation_width(a) for a in AGENTS}
        self.ensemble = MaddpgEnsemble(config, self.obs_widths, self.rng)
        self.replay = ReplayBuffer(config.replay_capacity)
        self.envs = VectorEnv(config.env, config.num_envs)
        self.episodes_done = 0
        self.global_step = 0
        self.metrics_rows: list[str] = []
        self._acc_r = {"pursuer": 0.0, "evader": 0.0}
        self._acc_captures = 0
        self._acc_timeouts = 0
        self.checkpoint_paths: list[str] = []
        self._slots: list[_EnvSlot] | None = None
        self._restored = False
        self._pending_checkpoints: list[int] = []

    # -- per-env bookkeeping ---------------------------------------------------

    def _new_slot(self, result) -> _EnvSlot:
        cfg = self.config
        slot = _EnvSlot(prev_obs={}, obs={}, histories={}, ukf={})
        obs = {"pursuer": result.obs_p, "evader": result.obs_e}
        for a in AGENTS:
            slot.obs[a] = obs[a]
            slot.prev_obs[a] = obs[a]
            slot.histories[a] = ObservationHistory(
                self.obs_widths[a], cfg.history_length, cfg.history_downsample)
            slot.histories[a].push(obs[a])
            slot.ukf[a] = initial_belief()
        return slot

    def _stacked(self, slot: _EnvSlot, agent: str) -> np.ndarray:
        return np.concatenate([slot.prev_obs[agent], slot.obs[agent]]).astype(np.float32)

    def _set_curriculum(self) -> None:
        fov, vmax = curriculum(self.episodes_done, self.config.episodes,
                               self.config.env, self.config.env.curriculum_fraction)
        self.envs.set_curriculum(fov, vmax)

    # -- belief features during rollout -----------------------------------------

    def _rollout_features(self, slots: list[_EnvSlot], agent: str) -> np.ndarray | None:
        cfg = self.config
        variant = cfg.belief_variant
        if variant == "none":
            return None
        if variant in ("ours", "ours_mixed"):
            windows, valids = zip(*(s.histories[agent].window() for s in slots))
            return self.ensemble._mixture_mean_features(
                agent, np.stack(windows), np.array(valids)).astype(np.float32)
        # ukf: advance each env's filter with the newest observation
        env_cfg = cfg.env
        opp_cfg = env_cfg.evader if agent == "pursuer" else env_cfg.pursuer
        v_norm = (opp_cfg.pointmass.v_max if opp_cfg.kind == "pointmass"
                  else max(abs(opp_cfg.car.v_min), opp_cfg.car.v_max))
        rows = []
        for s in slots:
            m = _ukf_measurement(s.obs[agent], agent, env_cfg)
            s.ukf[agent] = ukf_step(s.ukf[agent], m, env_cfg.dt * env_cfg.frame_skip)
            rows.append(belief_features("ukf", s.ukf[agent], env_cfg.center,
                                        env_cfg.half_extents, velocity_norm=v_norm))
        return np.stack(rows).astype(np.float32)

    # -- main loop ---------------------------------------------------------------

    def run(self) -> dict:
        cfg = self.config
        self._set_curriculum()
        if self._restored:
            slots = self._slots
        else:
            results = self.envs.reset_all(self.rng)
            slots = [self._new_slot(r) for r in results]
            self._slots = slots
            self._maybe_checkpoint(initial=True)

        while self.episodes_done < cfg.episodes:
            variant = cfg.belief_variant
            feats = {a: self._rollout_features(slots, a) for a in AGENTS}
            actions: list[tuple[Action, Action]] = []
            inputs = {}
            for a in AGENTS:
                stacked = np.stack([self._stacked(s, a) for s in slots])
                x = stacked if feats[a] is None else np.concatenate([stacked, feats[a]], axis=1)
                inputs[a] = x
            outs = {}
            for a in AGENTS:
                raw = self.ensemble.agents[a].actor(Tensor(inputs[a])).data.astype(np.float64)
                noise = self.rng.normal(0.0, cfg.exploration_sigma, size=raw.shape)
                outs[a] = np.clip(raw + noise, -1.0, 1.0)
            for i in range(len(slots)):
                actions.append((Action(*outs["pursuer"][i]), Action(*outs["evader"][i])))

            step_results = self.envs.step_all(actions)
            self.global_step += 1

            for i, (slot, res) in enumerate(zip(slots, step_results)):
                new_obs = {"pursuer": res.obs_p, "evader": res.obs_e}
                tr_kwargs = {}
                if variant in ("ours", "ours_mixed"):
                    for a, key in (("pursuer", "p"), ("evader", "e")):
                        w, v = slot.histories[a].window()
                        tr_kwargs[f"window_{key}"] = w
                        tr_kwargs[f"valid_{key}"] = v
                elif variant == "ukf":
                    tr_kwargs["feat_p"] = feats["pursuer"][i]
                    tr_kwargs["feat_e"] = feats["evader"][i]

                # push belief training samples (privileged targets)
                if variant in ("ours", "ours_mixed"):
                    opp_state = {"pursuer": res.state.evader, "evader": res.state.pursuer}
                    for a, key in (("pursuer", "p"), ("evader", "e")):
                        self.ensemble.agents[a].belief_buffer.push(
                            tr_kwargs[f"window_{key}"], tr_kwargs[f"valid_{key}"],
                            _normalized_position(opp_state[a], cfg.env))

                stacked_before = {a: self._stacked(slot, a) for a in AGENTS}
                slot.prev_obs = dict(slot.obs)
                slot.obs = new_obs
                for a in AGENTS:
                    slot.histories[a].push(new_obs[a])
                if variant in ("ours", "ours_mixed"):
                    for a, key in (("pursuer", "p"), ("evader", "e")):
                        w, v = slot.histories[a].window()
                        tr_kwargs[f"next_window_{key}"] = w
                        tr_kwargs[f"next_valid_{key}"] = v
                elif variant == "ukf":
                    # next-step features use a lookahead filter copy
                    env_cfg = cfg.env
                    for a, key in (("pursuer", "p"), ("evader", "e")):
                        opp_cfg = env_cfg.evader if a == "pursuer" else env_cfg.pursuer
                        v_norm = (opp_cfg.pointmass.v_max if opp_cfg.kind == "pointmass"
                                  else max(abs(opp_cfg.car.v_min), opp_cfg.car.v_max))
                        m = _ukf_measurement(new_obs[a], a, env_cfg)
                        nxt = ukf_step(slot.ukf[a], m, env_cfg.dt * env_cfg.frame_skip)
                        tr_kwargs[f"next_feat_{key}"] = belief_features(
                            "ukf", nxt, env_cfg.center, env_cfg.half_extents,
                            velocity_norm=v_norm).astype(np.float32)

                self.replay.push(Transition(
                    obs_p=stacked_before["pursuer"], obs_e=stacked_before["evader"],
                    action_p=outs["pursuer"][i].astype(np.float32),
                    action_e=outs["evader"][i].astype(np.float32),
                    reward_p=res.r_p, reward_e=res.r_e,
                    next_obs_p=self._stacked(slot, "pursuer"),
                    next_obs_e=self._stacked(slot, "evader"),
                    terminal=res.terminal, **tr_kwargs))

                self._acc_r["pursuer"] += res.r_p
                self._acc_r["evader"] += res.r_e

                if res.terminal:
                    if res.cause == "capture":
                        self._acc_captures += 1
                    else:
                        self._acc_timeouts += 1
                    self.episodes_done += 1
                    # deferred to the end of the step so the saved state sits
                    # on a clean loop boundary and resuming is bit-exact
                    if self.episodes_done % cfg.checkpoint_every == 0:
                        self._pending_checkpoints.append(self.episodes_done)
                    if self.episodes_done >= cfg.episodes:
                        continue
                    self._set_curriculum()
                    slots[i] = self._new_slot(self.envs.envs[i].reset(self.rng))

            # network updates
            if len(self.replay) >= max(cfg.update_warmup, cfg.batch_size) and \
                    self.global_step % cfg.update_every == 0:
                batch = self.replay.sample(cfg.batch_size, self.rng)
                losses = self.ensemble.update(batch)
                if any(not np.isfinite(v) for v in losses.values()):
                    self._dump_diagnostics(batch, losses)
                    raise FloatingPointError(f"non-finite loss: {losses}")
            if variant in ("ours", "ours_mixed") and \
                    self.global_step % cfg.bimdn_update_every == 0:
                for a in AGENTS:
                    self.ensemble.bimdn_update(a, self.rng)

            if self.global_step % cfg.metrics_every_steps == 0:
                self._flush_metrics()
            self._write_pending_checkpoints()

        self._write_pending_checkpoints()
        self._flush_metrics()
        metrics_path = os.path.join(self.out_dir, "metrics.csv")
        with open(metrics_path, "w") as fh:
            fh.write("episode,step,cum_reward_pursuer,cum_reward_evader,captures,timeouts\n")
            fh.writelines(self.metrics_rows)
        return {"metrics": metrics_path, "checkpoints": list(self.checkpoint_paths),
                "episodes": self.episodes_done}

    def _flush_metrics(self) -> None:
        self.metrics_rows.append(
            f"{self.episodes_done},{self.global_step},"
            f"{self._acc_r['pursuer']:.6f},{self._acc_r['evader']:.6f},"
            f"{self._acc_captures},{self._acc_timeouts}\n")
        self._acc_r = {"pursuer": 0.0, "evader": 0.0}
        self._acc_captures = 0
        self._acc_timeouts = 0

    def _dump_diagnostics(self, batch, losses) -> None:
        path = os.path.join(self.out_dir, "diverged_batch.npz")
        np.savez(path,
                 obs_p=np.stack([t.obs_p for t in batch]),
                 obs_e=np.stack([t.obs_e for t in batch]),
                 rewards=np.array([t.reward_p for t in batch]),
                 losses=json.dumps(losses))

    # -- checkpointing -----------------------------------------------------------

    def _maybe_checkpoint(self, initial: bool = False) -> None:
        if initial or self.episodes_done % self.config.checkpoint_every == 0:
            path = os.path.join(self.out_dir, f"ckpt_ep{self.episodes_done:06d}.pposg")
            self.save_checkpoint(path)
            if path not in self.checkpoint_paths:
                self.checkpoint_paths.append(path)

    def _write_pending_checkpoints(self) -> None:
        for n in self._pending_checkpoints:
            path = os.path.join(self.out_dir, f"ckpt_ep{n:06d}.pposg")
            self.save_checkpoint(path)
            if path not in self.checkpoint_paths:
                self.checkpoint_paths.append(path)
        self._pending_checkpoints.clear()

    def save_checkpoint(self, path: str, include_buffers: bool | None = None) -> None:
        include_buffers = self.include_buffers if include_buffers is None else include_buffers
        tensors: dict[str, np.ndarray] = {}
        for name in AGENTS:
            nets = self.ensemble.agents[name]
            for net_name, net in (("actor", nets.actor), ("critic", nets.critic),
                                  ("target_actor", nets.target_actor),
                                  ("target_critic", nets.target_critic)):
                for k, v in net.state().items():
                    tensors[f"{name}.{net_name}.{k}"] = v
            for opt_name, opt in (("actor_opt", nets.actor_opt),
                                  ("critic_opt", nets.critic_opt)):
                st = opt.state()
                for k in st["m"]:
                    tensors[f"{name}.{opt_name}.m.{k}"] = st["m"][k]
                    tensors[f"{name}.{opt_name}.v.{k}"] = st["v"][k]
            if nets.bimdn is not None:
                for k, v in nets.bimdn.state().items():
                    tensors[f"{name}.bimdn.{k}"] = v
                st = nets.bimdn_opt.state()
                for k in st["m"]:
                    tensors[f"{name}.bimdn_opt.m.{k}"] = st["m"][k]
                    tensors[f"{name}.bimdn_opt.v.{k}"] = st["v"][k]
        cfg_dict = train_config_to_dict(self.config)
        meta = {
            "version": CHECKPOINT_VERSION,
            "config": cfg_dict,
            "config_hash": config_hash(cfg_dict),
            "seed": self.seed,
            "episodes_done": self.episodes_done,
            "global_step": self.global_step,
            "opt_steps": {f"{a}.{o}": getattr(self.ensemble.agents[a], o).step_count
                          for a in AGENTS for o in ("actor_opt", "critic_opt")
                          if getattr(self.ensemble.agents[a], o) is not None} | {
                          f"{a}.bimdn_opt": self.ensemble.agents[a].bimdn_opt.step_count
                          for a in AGENTS if self.ensemble.agents[a].bimdn_opt is not None},
            "rng_state": json.loads(json.dumps(self.rng.bit_generator.state)),
            "replay_cursor": self.replay.cursor,
            "replay_size": len(self.replay),
            "buffers_included": bool(include_buffers),
        }
        meta["acc_reward_pursuer"] = self._acc_r["pursuer"]
        meta["acc_reward_evader"] = self._acc_r["evader"]
        meta["acc_captures"] = self._acc_captures
        meta["acc_timeouts"] = self._acc_timeouts
        if include_buffers:
            self._pack_buffers(tensors, meta)
            self._pack_sim_state(tensors, meta)
        save_checkpoint(path, tensors, meta)

    def _pack_buffers(self, tensors: dict, meta: dict) -> None:
        items = [self.replay._items[i] for i in range(len(self.replay))]
        if not items:
            return
        fields = ["obs_p", "obs_e", "action_p", "action_e", "next_obs_p", "next_obs_e"]
        for f in fields:
            tensors[f"replay.{f}"] = np.stack([getattr(t, f) for t in items]).astype(np.float32)
        tensors["replay.reward_p"] = np.array([t.reward_p for t in items], dtype=np.float64)
        tensors["replay.terminal"] = np.array([float(t.terminal) for t in items], dtype=np.float32)
        variant = self.config.belief_variant
        if variant in ("ours", "ours_mixed"):
            for f in ("window_p", "window_e", "next_window_p", "next_window_e"):
                tensors[f"replay.{f}"] = np.stack([getattr(t, f) for t in items]).astype(np.float32)
            for f in ("valid_p", "valid_e", "next_valid_p", "next_valid_e"):
                tensors[f"replay.{f}"] = np.array([getattr(t, f) for t in items], dtype=np.int64)
            for a in AGENTS:
                bb = self.ensemble.agents[a].belief_buffer
                if len(bb):
                    tensors[f"belief.{a}.windows"] = np.stack([w for w, _, _ in bb._windows])
                    tensors[f"belief.{a}.valids"] = np.array([v for _, v, _ in bb._windows], dtype=np.int64)
                    tensors[f"belief.{a}.targets"] = np.stack([t for _, _, t in bb._windows])
                meta[f"belief_{a}_cursor"] = bb._cursor
                meta[f"belief_{a}_total"] = bb.total_pushed
        elif variant == "ukf":
            for f in ("feat_p", "feat_e", "next_feat_p", "next_feat_e"):
                tensors[f"replay.{f}"] = np.stack([getattr(t, f) for t in items]).astype(np.float32)

    def _pack_sim_state(self, tensors: dict, meta: dict) -> None:
        """Live environment and per-slot rollout state, for exact resume."""
        if self._slots is None:
            return
        meta["sim_state_included"] = True
        for i, (env, slot) in enumerate(zip(self.envs.envs, self._slots)):
            tensors[f"sim.{i}.pursuer"] = env.state.pursuer.as_vector()
            tensors[f"sim.{i}.evader"] = env.state.evader.as_vector()
            meta[f"sim_{i}_t"] = env.state.t
            meta[f"sim_{i}_terminal"] = env.terminal
            meta[f"sim_{i}_cause"] = env.cause
            for a in AGENTS:
                tensors[f"slot.{i}.{a}.prev_obs"] = slot.prev_obs[a].astype(np.float32)
                tensors[f"slot.{i}.{a}.obs"] = slot.obs[a].astype(np.float32)
                hist = slot.histories[a]
                if len(hist):
                    tensors[f"slot.{i}.{a}.history"] = np.stack(list(hist._buf))
                tensors[f"slot.{i}.{a}.ukf_mean"] = slot.ukf[a].mean
                tensors[f"slot.{i}.{a}.ukf_cov"] = slot.ukf[a].covariance
                meta[f"slot_{i}_{a}_ukf_reinit"] = slot.ukf[a].reinitialized

    def _restore_sim_state(self, tensors: dict, meta: dict) -> None:
        cfg = self.config
        kinds = {"pursuer": cfg.env.pursuer.kind, "evader": cfg.env.evader.kind}

        def from_vector(kind: str, v: np.ndarray):
            return CarState(*v) if kind == "car" else PointMassState(*v)

        slots = []
        for i, env in enumerate(self.envs.envs):
            env.state = JointState(
                pursuer=from_vector(kinds["pursuer"], tensors[f"sim.{i}.pursuer"]),
                evader=from_vector(kinds["evader"], tensors[f"sim.{i}.evader"]),
                t=meta[f"sim_{i}_t"])
            env.terminal = meta[f"sim_{i}_terminal"]
            env.cause = meta[f"sim_{i}_cause"]
            slot = _EnvSlot(prev_obs={}, obs={}, histories={}, ukf={})
            for a in AGENTS:
                slot.prev_obs[a] = tensors[f"slot.{i}.{a}.prev_obs"]
                slot.obs[a] = tensors[f"slot.{i}.{a}.obs"]
                hist = ObservationHistory(self.obs_widths[a], cfg.history_length,
                                          cfg.history_downsample)
                for row in tensors.get(f"slot.{i}.{a}.history", ()):
                    hist.push(row)
                slot.histories[a] = hist
                slot.ukf[a] = UkfBelief(
                    mean=tensors[f"slot.{i}.{a}.ukf_mean"],
                    covariance=tensors[f"slot.{i}.{a}.ukf_cov"],
                    reinitialized=meta[f"slot_{i}_{a}_ukf_reinit"])
            slots.append(slot)
        self._slots = slots
        self._restored = True

    def load_checkpoint_state(self, path: str) -> None:
        tensors, meta = load_checkpoint(path)
        if meta.get("version") != CHECKPOINT_VERSION:
            raise CheckpointFormatError(
                f"checkpoint version {meta.get('version')} unsupported")
        for name in AGENTS:
            nets = self.ensemble.agents[name]
            for net_name, net in (("actor", nets.actor), ("critic", nets.critic),
                                  ("target_actor", nets.target_actor),
                                  ("target_critic", nets.target_critic)):
                prefix = f"{name}.{net_name}."
                net.load_state({k[len(prefix):]: v for k, v in tensors.items()
                                if k.startswith(prefix)})
            for opt_name, opt in (("actor_opt", nets.actor_opt),
                                  ("critic_opt", nets.critic_opt)):
                opt.load_state({
                    "step": meta["opt_steps"][f"{name}.{opt_name}"],
                    "m": {k[len(f"{name}.{opt_name}.m."):]: v for k, v in tensors.items()
                          if k.startswith(f"{name}.{opt_name}.m.")},
                    "v": {k[len(f"{name}.{opt_name}.v."):]: v for k, v in tensors.items()
                          if k.startswith(f"{name}.{opt_name}.v.")},
                })
            if nets.bimdn is not None and any(k.startswith(f"{name}.bimdn.") for k in tensors):
                nets.bimdn.load_state({k[len(f"{name}.bimdn."):]: v for k, v in tensors.items()
                                       if k.startswith(f"{name}.bimdn.")
                                       and not k.startswith(f"{name}.bimdn_opt.")})
                nets.bimdn_opt.load_state({
                    "step": meta["opt_steps"].get(f"{name}.bimdn_opt", 0),
                    "m": {k[len(f"{name}.bimdn_opt.m."):]: v for k, v in tensors.items()
                          if k.startswith(f"{name}.bimdn_opt.m.")},
                    "v": {k[len(f"{name}.bimdn_opt.v."):]: v for k, v in tensors.items()
                          if k.startswith(f"{name}.bimdn_opt.v.")},
                })
        self.episodes_done = meta["episodes_done"]
        self.global_step = meta["global_step"]
        self.rng.bit_generator.state = meta["rng_state"]
        if meta.get("buffers_included") and "replay.obs_p" in tensors:
            n = tensors["replay.obs_p"].shape[0]
            variant = self.config.belief_variant
            for i in range(n):
                kw = {}
                if variant in ("ours", "ours_mixed"):
                    kw = {f: tensors[f"replay.{f}"][i]
                          for f in ("window_p", "window_e", "next_window_p", "next_window_e")}
                    kw.update({f: int(tensors[f"replay.{f}"][i])
                               for f in ("valid_p", "valid_e", "next_valid_p", "next_valid_e")})
                elif variant == "ukf":
                    kw = {f: tensors[f"replay.{f}"][i]
                          for f in ("feat_p", "feat_e", "next_feat_p", "next_feat_e")}
                self.replay.push(Transition(
                    obs_p=tensors["replay.obs_p"][i], obs_e=tensors["replay.obs_e"][i],
                    action_p=tensors["replay.action_p"][i],
                    action_e=tensors["replay.action_e"][i],
                    reward_p=float(tensors["replay.reward_p"][i]),
                    reward_e=-float(tensors["replay.reward_p"][i]),
                    next_obs_p=tensors["replay.next_obs_p"][i],
                    next_obs_e=tensors["replay.next_obs_e"][i],
                    terminal=bool(tensors["replay.terminal"][i]), **kw))
            self.replay._cursor = meta["replay_cursor"]
            if variant in ("ours", "ours_mixed"):
                for a in AGENTS:
                    bb = self.ensemble.agents[a].belief_buffer
                    if f"belief.{a}.windows" in tensors:
                        ws = tensors[f"belief.{a}.windows"]
                        vs = tensors[f"belief.{a}.valids"]
                        ts = tensors[f"belief.{a}.targets"]
                        bb._windows = [(ws[i], int(vs[i]), ts[i]) for i in range(len(vs))]
                    bb._cursor = meta.get(f"belief_{a}_cursor", 0)
                    bb.total_pushed = meta.get(f"belief_{a}_total", len(bb._windows))
        self._acc_r = {"pursuer": meta.get("acc_reward_pursuer", 0.0),
                       "evader": meta.get("acc_reward_evader", 0.0)}
        self._acc_captures = meta.get("acc_captures", 0)
        self._acc_timeouts = meta.get("acc_timeouts", 0)
        if meta.get("sim_state_included"):
            self._restore_sim_state(tensors, meta)


def train(config: TrainConfig, seed: int, out_dir: str, **kwargs) -> dict:
    """Run a full training and return metrics/checkpoint paths."""
    return Trainer(config, seed, out_dir, **kwargs).run()


def load_trained_ensemble(path: str) -> tuple[MaddpgEnsemble, TrainConfig, dict]:
    """Rebuild an ensemble from a checkpoint for evaluation or serving."""
    tensors, meta = load_checkpoint(path)
    if meta.get("version") != CHECKPOINT_VERSION:
        raise CheckpointFormatError(
            f"checkpoint version {meta.get('version')} unsupported")
    config = train_config_from_dict(meta["config"])
    rng = np.random.default_rng(0)
    obs_widths = {a: config.env.observation_width(a) for a in AGENTS}
    ensemble = MaddpgEnsemble(config, obs_widths, rng)
    for name in AGENTS:
        nets = ensemble.agents[name]
        for net_name, net in (("actor", nets.actor), ("critic", nets.critic),
                              ("target_actor", nets.target_actor),
                              ("target_critic", nets.target_critic)):
            prefix = f"{name}.{net_name}."
            net.load_state({k[len(prefix):]: v for k, v in tensors.items()
                            if k.startswith(prefix)})
        if nets.bimdn is not None:
            nets.bimdn.load_state({k[len(f"{name}.bimdn."):]: v for k, v in tensors.items()
                                   if k.startswith(f"{name}.bimdn.")
                                   and not k.startswith(f"{name}.bimdn_opt.")})
    return ensemble, config, meta
