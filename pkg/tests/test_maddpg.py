"""Centralized-critic update checked against hand arithmetic on linear nets."""

import dataclasses

import numpy as np
import pytest

from pposg.config import TrainConfig
from pposg.marl.buffers import BeliefBuffer, Transition
from pposg.marl.maddpg import AGENTS, MaddpgEnsemble

OBS_W = 3  # per-frame width; stacked policy input is 2x this


def tiny_config(**overrides) -> TrainConfig:
    base = dict(belief_variant="none", hidden_sizes=(4,), gamma=0.99,
                tau=0.01, actor_lr=0.01, critic_lr=0.01)
    base.update(overrides)
    return TrainConfig(**base)


def make_ensemble(config: TrainConfig, seed: int = 0) -> MaddpgEnsemble:
    return MaddpgEnsemble(config, {"pursuer": OBS_W, "evader": OBS_W},
                          np.random.default_rng(seed))


def mk_batch(rng: np.random.Generator, n: int = 2,
             terminal: bool = False) -> list[Transition]:
    batch = []
    for _ in range(n):
        r = float(rng.uniform(-5, 5))
        batch.append(Transition(
            obs_p=rng.uniform(-1, 1, 2 * OBS_W).astype(np.float32),
            obs_e=rng.uniform(-1, 1, 2 * OBS_W).astype(np.float32),
            action_p=rng.uniform(-1, 1, 2).astype(np.float32),
            action_e=rng.uniform(-1, 1, 2).astype(np.float32),
            reward_p=r, reward_e=-r,
            next_obs_p=rng.uniform(-1, 1, 2 * OBS_W).astype(np.float32),
            next_obs_e=rng.uniform(-1, 1, 2 * OBS_W).astype(np.float32),
            terminal=terminal))
    return batch


def linearize(ens: MaddpgEnsemble) -> None:
    """Collapse every net to an affine map with known coefficients.

    Zeroing the hidden biases and setting hidden weights to small identity
    blocks would still leave ReLU kinks, so instead we zero everything and
    hand-set only the last layer: q(x) = bias (constant), a(x) = tanh(bias).
    """
    for name in AGENTS:
        nets = ens.agents[name]
        for net in (nets.actor, nets.critic, nets.target_actor, nets.target_critic):
            for p in net.params.values():
                p.data[...] = 0.0


def test_terminal_transitions_use_reward_only():
    ens = make_ensemble(tiny_config())
    linearize(ens)
    # constant critic output c: loss = mean((c - r)^2); with c = 0, loss = mean(r^2)
    rng = np.random.default_rng(0)
    batch = mk_batch(rng, n=4, terminal=True)
    losses = ens.update(batch)
    for name, key in (("pursuer", "p"), ("evader", "e")):
        expected = np.mean([getattr(t, f"reward_{key}") ** 2 for t in batch])
        assert losses[f"critic_{name}"] == pytest.approx(expected, rel=1e-5)


def test_gamma_zero_ignores_next_values():
    ens = make_ensemble(tiny_config(gamma=0.0))
    linearize(ens)
    # make the target critic loudly non-zero: if gamma leaked, loss changes
    for name in AGENTS:
        ens.agents[name].target_critic.layers[-1].b.data[...] = 100.0
    rng = np.random.default_rng(1)
    batch = mk_batch(rng, n=4, terminal=False)
    losses = ens.update(batch)
    for name, key in (("pursuer", "p"), ("evader", "e")):
        expected = np.mean([getattr(t, f"reward_{key}") ** 2 for t in batch])
        assert losses[f"critic_{name}"] == pytest.approx(expected, rel=1e-5)


def test_critic_loss_matches_pencil_computation():
    cfg = tiny_config()
    ens = make_ensemble(cfg)
    linearize(ens)
    # affine critics: q(x) = w . x + b with w drawn by hand
    rng = np.random.default_rng(2)
    w = {}
    for name in AGENTS:
        nets = ens.agents[name]
        for net in (nets.critic, nets.target_critic):
            # single useful path: first hidden unit relays sum(x) through ReLU
            net.layers[0].w.data[:, 0] = 0.05
            net.layers[-1].w.data[0, 0] = 1.0
            net.layers[-1].b.data[...] = 0.3
        w[name] = 0.05

    batch = mk_batch(rng, n=2, terminal=False)
    joint = np.concatenate([
        np.stack([t.obs_p for t in batch]),
        np.stack([t.obs_e for t in batch]),
        np.stack([t.action_p for t in batch]),
        np.stack([t.action_e for t in batch])], axis=1)
    next_joint = np.concatenate([
        np.stack([t.next_obs_p for t in batch]),
        np.stack([t.next_obs_e for t in batch]),
        np.zeros((2, 4))], axis=1)   # zeroed target actors emit tanh(0) = 0

    losses = ens.update(batch)
    for name, key in (("pursuer", "p"), ("evader", "e")):
        q = np.maximum(joint.sum(axis=1) * 0.05, 0.0) + 0.3
        q_next = np.maximum(next_joint.sum(axis=1) * 0.05, 0.0) + 0.3
        r = np.array([getattr(t, f"reward_{key}") for t in batch])
        y = r + cfg.gamma * q_next
        expected = np.mean((q - y) ** 2)
        assert losses[f"critic_{name}"] == pytest.approx(expected, rel=1e-4)


def test_batch_width_mismatch_rejected():
    ens = make_ensemble(tiny_config())
    rng = np.random.default_rng(3)
    batch = mk_batch(rng)
    bad = dataclasses.replace(batch[0], obs_p=np.zeros(2 * OBS_W + 1,
                                                       dtype=np.float32))
    with pytest.raises(ValueError):
        ens.update([bad, batch[1]])


def test_update_moves_toward_reward_prediction():
    cfg = tiny_config(gamma=0.0, critic_lr=0.01, actor_lr=0.0)
    ens = make_ensemble(cfg, seed=4)
    rng = np.random.default_rng(5)
    batch = mk_batch(rng, n=8, terminal=True)
    first = ens.update(batch)["critic_pursuer"]
    for _ in range(200):
        last = ens.update(batch)["critic_pursuer"]
    assert last < first * 0.5


def test_soft_updates_applied_each_step():
    cfg = tiny_config(tau=0.5)
    ens = make_ensemble(cfg, seed=6)
    nets = ens.agents["pursuer"]
    before = nets.target_critic.layers[0].w.data.copy()
    online_before = nets.critic.layers[0].w.data.copy()
    np.testing.assert_array_equal(before, online_before)  # copied at init
    ens.update(mk_batch(np.random.default_rng(7), n=4))
    online_after = nets.critic.layers[0].w.data
    expected = 0.5 * before + 0.5 * online_after
    np.testing.assert_allclose(nets.target_critic.layers[0].w.data, expected,
                               atol=1e-6)


def test_bimdn_update_noop_before_warmup():
    cfg = tiny_config(belief_variant="ours", bimdn_hidden=8, bimdn_fc=6,
                      bimdn_warmup=50, bimdn_buffer_capacity=100,
                      bimdn_batch=16)
    ens = make_ensemble(cfg, seed=8)
    rng = np.random.default_rng(9)
    buf = ens.agents["pursuer"].belief_buffer
    w = rng.uniform(-1, 1, size=(20, OBS_W)).astype(np.float32)
    for _ in range(49):
        buf.push(w, 5, rng.uniform(-1, 1, 2))
    assert ens.bimdn_update("pursuer", rng) is None
    buf.push(w, 5, rng.uniform(-1, 1, 2))
    loss = ens.bimdn_update("pursuer", rng)
    assert loss is not None and np.isfinite(loss)


def test_bimdn_update_handles_mixed_valid_lengths():
    cfg = tiny_config(belief_variant="ours", bimdn_hidden=8, bimdn_fc=6,
                      bimdn_warmup=1, bimdn_buffer_capacity=100,
                      bimdn_batch=32)
    ens = make_ensemble(cfg, seed=10)
    rng = np.random.default_rng(11)
    buf = ens.agents["evader"].belief_buffer
    for i in range(40):
        w = rng.uniform(-1, 1, size=(20, OBS_W)).astype(np.float32)
        buf.push(w, 1 + i % 7, rng.uniform(-1, 1, 2))
    loss = ens.bimdn_update("evader", rng)
    assert np.isfinite(loss)
