"""Recurrent mixture-density belief network.

Observation-history windows go through one bidirectional LSTM layer, a
shared fully connected layer, and three heads producing cluster weights
(softmax), per-axis standard deviations (ELU + 1) and cluster centers
(linear). Heads work in normalized workspace coordinates; a helper maps
the result to meters.
"""

from __future__ import annotations

import numpy as np

from ..nn.layers import BiLSTM, Linear, Module
from ..nn.tensor import Tensor, concat
from .mixture import LOG_2PI, SIGMA_FLOOR, GaussianMixture


class BiMDN(Module):
    def __init__(self, obs_width: int, rng: np.random.Generator,
                 hidden: int = 128, fc_features: int = 32,
                 n_components: int = 3, head_hidden: int = 32,
                 dtype=np.float32):
        super().__init__()
        self.n_components = n_components
        self.obs_width = obs_width
        self.lstm = BiLSTM(obs_width, hidden, rng, dtype=dtype)
        self.fc = Linear(2 * hidden, fc_features, rng, dtype=dtype, prefix="fc.")
        self.pi_hidden = Linear(fc_features, head_hidden, rng, dtype=dtype, prefix="pi_h.")
        self.pi_out = Linear(head_hidden, n_components, rng, dtype=dtype, prefix="pi_o.")
        self.sigma_hidden = Linear(fc_features, head_hidden, rng, dtype=dtype, prefix="sg_h.")
        self.sigma_out = Linear(head_hidden, 2 * n_components, rng, dtype=dtype, prefix="sg_o.")
        self.mu_hidden = Linear(fc_features, head_hidden, rng, dtype=dtype, prefix="mu_h.")
        self.mu_out = Linear(head_hidden, 2 * n_components, rng, dtype=dtype, prefix="mu_o.")
        for sub in (self.lstm, self.fc, self.pi_hidden, self.pi_out,
                    self.sigma_hidden, self.sigma_out, self.mu_hidden, self.mu_out):
            self.params.update(sub.params)

    def forward(self, windows: Tensor, valid_length: int) -> tuple[Tensor, Tensor, Tensor]:
        """(B, L, obs_width) windows -> (pi_logits, mu, sigma).

        mu and sigma are (B, 2K) with x-coordinates in the first K columns;
        all in normalized coordinates. sigma is strictly positive.
        """
        if valid_length < 1:
            raise ValueError("history must contain at least one frame")
        feat = self.fc(self.lstm.summary(windows, valid_length)).relu()
        pi_logits = self.pi_out(self.pi_hidden(feat).relu())
        sigma = self.sigma_out(self.sigma_hidden(feat).relu()).elu() + 1.0
        mu = self.mu_out(self.mu_hidden(feat).relu())
        return pi_logits, mu, sigma

    def nll_loss(self, pi_logits: Tensor, mu: Tensor, sigma: Tensor,
                 targets: np.ndarray) -> Tensor:
        """Mean negative log likelihood of 2D targets (normalized coords)."""
        K = self.n_components
        t = np.asarray(targets, dtype=mu.data.dtype)
        tx = Tensor(t[:, :1], dtype=t.dtype)
        ty = Tensor(t[:, 1:2], dtype=t.dtype)
        sx = sigma[:, :K].clamp_min(SIGMA_FLOOR)
        sy = sigma[:, K:].clamp_min(SIGMA_FLOOR)
        zx = (tx - mu[:, :K]) / sx
        zy = (ty - mu[:, K:]) / sy
        log_pi = pi_logits - pi_logits.logsumexp(axis=1, keepdims=True)
        log_comp = (zx.square() + zy.square()) * -0.5 - sx.log() - sy.log() - LOG_2PI
        return -(log_pi + log_comp).logsumexp(axis=1).mean()

    def predict(self, window: np.ndarray, valid_length: int,
                center: tuple[float, float],
                half_extents: tuple[float, float]) -> GaussianMixture:
        """Run one window without gradients and map to workspace meters."""
        x = Tensor(window[None, :, :], dtype=np.float32)
        pi_logits, mu, sigma = self.forward(x, valid_length)
        logits = pi_logits.data[0] - pi_logits.data[0].max()
        w = np.exp(logits)
        w = w / w.sum()
        K = self.n_components
        cx, cy = center
        hx, hy = half_extents
        means = np.stack([cx + mu.data[0, :K] * hx, cy + mu.data[0, K:] * hy], axis=1)
        stds = np.stack([np.maximum(sigma.data[0, :K], SIGMA_FLOOR) * hx,
                         np.maximum(sigma.data[0, K:], SIGMA_FLOOR) * hy], axis=1)
        return GaussianMixture(weights=w, means=means, stddevs=stds)

    def predict_normalized(self, windows: np.ndarray, valid_length: int) -> np.ndarray:
        """Batch weighted means in normalized coordinates, shape (B, 2)."""
        x = Tensor(np.asarray(windows, dtype=np.float32))
        pi_logits, mu, _ = self.forward(x, valid_length)
        logits = pi_logits.data - pi_logits.data.max(axis=1, keepdims=True)
        w = np.exp(logits)
        w = w / w.sum(axis=1, keepdims=True)
        K = self.n_components
        mean_x = (w * mu.data[:, :K]).sum(axis=1)
        mean_y = (w * mu.data[:, K:]).sum(axis=1)
        return np.stack([mean_x, mean_y], axis=1)
