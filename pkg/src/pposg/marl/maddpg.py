"""MADDPG networks and the centralized-critic update."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..belief import BiMDN, FEATURE_WIDTHS
from ..config import TrainConfig
from ..nn import MLP, Adam, Tensor, concat, soft_update
from .buffers import BeliefBuffer, Transition

AGENTS = ("pursuer", "evader")


def _train_feature_width(variant: str) -> int:
    # training always consumes the weighted-mean feature; the 16-sample
    # mixed strategy applies at inference only
    return 2 if variant == "ours_mixed" else FEATURE_WIDTHS[variant]


@dataclass
class AgentNets:
    actor: MLP
    critic: MLP
    target_actor: MLP
    target_critic: MLP
    actor_opt: Adam
    critic_opt: Adam
    bimdn: BiMDN | None
    bimdn_opt: Adam | None
    belief_buffer: BeliefBuffer | None


class MaddpgEnsemble:
    """Both agents' actors, centralized critics and their targets."""

    def __init__(self, config: TrainConfig, obs_widths: dict[str, int],
                 rng: np.random.Generator):
        self.config = config
        self.obs_widths = obs_widths
        self.feature_width = _train_feature_width(config.belief_variant)
        self.actor_in = {a: 2 * obs_widths[a] + self.feature_width for a in AGENTS}
        self.critic_in = sum(self.actor_in.values()) + 4
        hidden = list(config.hidden_sizes)
        self.agents: dict[str, AgentNets] = {}
        for name in AGENTS:
            actor = MLP(self.actor_in[name], hidden, 2, rng, output_activation="tanh")
            critic = MLP(self.critic_in, hidden, 1, rng)
            target_actor = MLP(self.actor_in[name], hidden, 2, rng, output_activation="tanh")
            target_critic = MLP(self.critic_in, hidden, 1, rng)
            target_actor.load_state(actor.state())
            target_critic.load_state(critic.state())
            bimdn = bimdn_opt = belief_buffer = None
            if config.belief_variant in ("ours", "ours_mixed"):
                bimdn = BiMDN(obs_widths[name], rng, hidden=config.bimdn_hidden,
                              fc_features=config.bimdn_fc,
                              n_components=config.bimdn_components)
                bimdn_opt = Adam(bimdn.parameters(), lr=config.bimdn_lr)
                belief_buffer = BeliefBuffer(config.bimdn_buffer_capacity,
                                             config.bimdn_warmup)
            self.agents[name] = AgentNets(
                actor=actor, critic=critic,
                target_actor=target_actor, target_critic=target_critic,
                actor_opt=Adam(actor.parameters(), lr=config.actor_lr),
                critic_opt=Adam(critic.parameters(), lr=config.critic_lr),
                bimdn=bimdn, bimdn_opt=bimdn_opt, belief_buffer=belief_buffer)

    # -- belief feature recomputation ------------------------------------------

    def _mixture_mean_features(self, agent: str, windows: np.ndarray,
                               valids: np.ndarray) -> np.ndarray:
        """Normalized weighted-mean features for a batch of histories.

        Recomputed with the live belief network; rows are grouped by valid
        length so each group runs as one batched forward pass.
        """
        bimdn = self.agents[agent].bimdn
        out = np.zeros((len(valids), 2), dtype=np.float64)
        for v in np.unique(valids):
            mask = valids == v
            out[mask] = np.clip(
                bimdn.predict_normalized(windows[mask], int(v)), -1.0, 1.0)
        return out

    def actor_inputs(self, agent: str, stacked: np.ndarray,
                     windows: np.ndarray | None, valids: np.ndarray | None,
                     stored_feats: np.ndarray | None) -> np.ndarray:
        if self.feature_width == 0:
            return stacked
        if self.config.belief_variant in ("ours", "ours_mixed"):
            feats = self._mixture_mean_features(agent, windows, valids)
        else:
            feats = stored_feats
        return np.concatenate([stacked, feats], axis=1)

    # -- updates ---------------------------------------------------------------

    def update(self, batch: list[Transition]) -> dict[str, float]:
        """One MADDPG step for both agents; returns the four loss values."""
        cfg = self.config
        B = len(batch)
        data: dict[str, dict[str, np.ndarray]] = {}
        for name, key in (("pursuer", "p"), ("evader", "e")):
            stacked = np.stack([getattr(t, f"obs_{key}") for t in batch])
            next_stacked = np.stack([getattr(t, f"next_obs_{key}") for t in batch])
            if stacked.shape[1] != 2 * self.obs_widths[name]:
                raise ValueError("batch width mismatch")
            kw = {}
            if cfg.belief_variant in ("ours", "ours_mixed"):
                kw["windows"] = np.stack([getattr(t, f"window_{key}") for t in batch])
                kw["valids"] = np.array([getattr(t, f"valid_{key}") for t in batch])
                kw["next_windows"] = np.stack([getattr(t, f"next_window_{key}") for t in batch])
                kw["next_valids"] = np.array([getattr(t, f"next_valid_{key}") for t in batch])
            elif cfg.belief_variant == "ukf":
                kw["feats"] = np.stack([getattr(t, f"feat_{key}") for t in batch])
                kw["next_feats"] = np.stack([getattr(t, f"next_feat_{key}") for t in batch])
            inputs = self.actor_inputs(name, stacked, kw.get("windows"),
                                       kw.get("valids"), kw.get("feats"))
            next_inputs = self.actor_inputs(name, next_stacked, kw.get("next_windows"),
                                            kw.get("next_valids"), kw.get("next_feats"))
            data[name] = {
                "inputs": inputs.astype(np.float32),
                "next_inputs": next_inputs.astype(np.float32),
                "actions": np.stack([getattr(t, f"action_{key}") for t in batch]).astype(np.float32),
                "rewards": np.array([getattr(t, f"reward_{key}") for t in batch],
                                    dtype=np.float32)[:, None],
            }
        terminal = np.array([t.terminal for t in batch], dtype=np.float32)[:, None]

        target_actions = {
            name: self.agents[name].target_actor(
                Tensor(data[name]["next_inputs"])).data
            for name in AGENTS
        }
        next_joint = np.concatenate(
            [data["pursuer"]["next_inputs"], data["evader"]["next_inputs"],
             target_actions["pursuer"], target_actions["evader"]], axis=1)
        joint = np.concatenate(
            [data["pursuer"]["inputs"], data["evader"]["inputs"],
             data["pursuer"]["actions"], data["evader"]["actions"]], axis=1)

        losses: dict[str, float] = {}
        for name in AGENTS:
            nets = self.agents[name]
            q_next = nets.target_critic(Tensor(next_joint)).data
            y = data[name]["rewards"] + cfg.gamma * (1.0 - terminal) * q_next

            nets.critic.zero_grad()
            q = nets.critic(Tensor(joint))
            critic_loss = (q - Tensor(y.astype(np.float32))).square().mean()
            critic_loss.backward()
            nets.critic_opt.step()
            losses[f"critic_{name}"] = float(critic_loss.data)

            # actor update: own action from the live actor, opponent's from replay
            nets.actor.zero_grad()
            own_action = nets.actor(Tensor(data[name]["inputs"]))
            parts = [Tensor(data["pursuer"]["inputs"]), Tensor(data["evader"]["inputs"])]
            if name == "pursuer":
                parts += [own_action, Tensor(data["evader"]["actions"])]
            else:
                parts += [Tensor(data["pursuer"]["actions"]), own_action]
            actor_loss = -nets.critic(concat(parts, axis=1)).mean()
            actor_loss.backward()
            nets.critic.zero_grad()  # discard critic grads from the actor pass
            nets.actor_opt.step()
            losses[f"actor_{name}"] = float(actor_loss.data)

        for name in AGENTS:
            nets = self.agents[name]
            soft_update(nets.target_actor.parameters(), nets.actor.parameters(), cfg.tau)
            soft_update(nets.target_critic.parameters(), nets.critic.parameters(), cfg.tau)
        return losses

    def bimdn_update(self, agent: str, rng: np.random.Generator) -> float | None:
        """One NLL step on the agent's belief buffer; no-op before warm-up."""
        nets = self.agents[agent]
        if nets.bimdn is None or nets.belief_buffer is None:
            return None
        if not nets.belief_buffer.ready:
            return None
        cfg = self.config
        samples = nets.belief_buffer.sample(cfg.bimdn_batch, rng)
        valids = np.array([s[1] for s in samples])
        windows = np.stack([s[0] for s in samples])
        targets = np.stack([s[2] for s in samples])
        nets.bimdn.zero_grad()
        total = None
        n = len(samples)
        for v in np.unique(valids):
            mask = valids == v
            pi_logits, mu, sigma = nets.bimdn.forward(
                Tensor(windows[mask], dtype=np.float32), int(v))
            nll = nets.bimdn.nll_loss(pi_logits, mu, sigma, targets[mask])
            weighted = nll * (float(mask.sum()) / n)
            total = weighted if total is None else total + weighted
        total.backward()
        nets.bimdn_opt.step()
        loss = float(total.data)
        if not np.isfinite(loss):
            raise FloatingPointError("belief network loss diverged")
        return loss
