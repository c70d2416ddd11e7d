"""Gaussian-mixture belief over the opponent's 2D position."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LOG_2PI = math.log(2.0 * math.pi)
SIGMA_FLOOR = 1e-3  # keeps densities non-singular


@dataclass(frozen=True)
class GaussianMixture:
    """Axis-aligned mixture: weights (K,), means (K, 2), stddevs (K, 2)."""

    weights: np.ndarray
    means: np.ndarray
    stddevs: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        m = np.asarray(self.means, dtype=np.float64)
        s = np.asarray(self.stddevs, dtype=np.float64)
        if w.ndim != 1 or m.shape != (w.size, 2) or s.shape != (w.size, 2):
            raise ValueError("inconsistent mixture shapes")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-6:
            raise ValueError("weights must be a simplex")
        if np.any(s <= 0):
            raise ValueError("stddevs must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "stddevs", s)

    @property
    def n_components(self) -> int:
        return self.weights.size


def mixture_nll(mix: GaussianMixture, target) -> float:
    """Negative log likelihood of a 2D target under the mixture.

    Uses log-sum-exp over components; stddevs are floored at SIGMA_FLOOR.
    """
    target = np.asarray(target, dtype=np.float64)
    sigma = np.maximum(mix.stddevs, SIGMA_FLOOR)
    z = (target[None, :] - mix.means) / sigma
    log_comp = -0.5 * (z ** 2).sum(axis=1) - np.log(sigma).sum(axis=1) - LOG_2PI
    log_w = np.log(np.maximum(mix.weights, 1e-300))
    a = log_w + log_comp
    m = a.max()
    return float(-(m + np.log(np.exp(a - m).sum())))


def mixture_mean(mix: GaussianMixture) -> np.ndarray:
    """Weight-averaged mean of the mixture."""
    return mix.weights @ mix.means


def mixture_sample(mix: GaussianMixture, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n points: categorical component choice, then axis-wise normals."""
    ks = rng.choice(mix.n_components, size=n, p=mix.weights)
    return mix.means[ks] + rng.standard_normal((n, 2)) * mix.stddevs[ks]
