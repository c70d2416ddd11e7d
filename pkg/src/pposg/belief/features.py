"""Belief features appended to the policy observation.

"ours"        -> normalized mixture weighted mean (2 entries)
"ours_mixed"  -> 16 sampled points (policy averages per-point actions)
"ukf"         -> normalized filter mean (4 entries)
"none"        -> empty
"""

from __future__ import annotations

import numpy as np

from .mixture import GaussianMixture, mixture_mean, mixture_sample
from .ukf import UkfBelief

MIXED_SAMPLES = 16

FEATURE_WIDTHS = {"none": 0, "ours": 2, "ours_mixed": 2, "ukf": 4}


def _normalize_points(points: np.ndarray, center, half_extents) -> np.ndarray:
    cx, cy = center
    hx, hy = half_extents
    out = np.empty_like(points, dtype=np.float64)
    out[..., 0] = (points[..., 0] - cx) / hx
    out[..., 1] = (points[..., 1] - cy) / hy
    return np.clip(out, -1.0, 1.0)


def belief_features(variant: str, belief, center, half_extents,
                    velocity_norm: float = 1.0,
                    rng: np.random.Generator | None = None) -> np.ndarray:
    """Feature vector for one agent; for "ours_mixed" this is the (16, 2)
    array of normalized sample points, one feature row per candidate action.
    """
    if variant == "none":
        return np.zeros(0)
    if variant == "ours":
        assert isinstance(belief, GaussianMixture)
        return _normalize_points(mixture_mean(belief), center, half_extents)
    if variant == "ours_mixed":
        assert isinstance(belief, GaussianMixture)
        if rng is None:
            raise ValueError("ours_mixed requires an rng")
        pts = mixture_sample(belief, MIXED_SAMPLES, rng)
        return _normalize_points(pts, center, half_extents)
    if variant == "ukf":
        assert isinstance(belief, UkfBelief)
        pos = _normalize_points(belief.mean[:2], center, half_extents)
        vel = np.clip(belief.mean[2:] / velocity_norm, -1.0, 1.0)
        return np.concatenate([pos, vel])
    raise ValueError(f"unknown belief variant {variant!r}")
