"""Unscented Kalman filter over opponent position and velocity.

Constant-velocity process model with isotropic process/measurement noise.
Sigma points use the scaled unscented transform (alpha=0.1, beta=2.0,
kappa=1 by default), 2n+1 = 9 points for the 4-state belief.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

N_STATE = 4
NOISE_SCALE = 0.1


@dataclass
class UkfBelief:
    mean: np.ndarray
    covariance: np.ndarray
    reinitialized: bool = False

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.covariance = np.asarray(self.covariance, dtype=np.float64)
        if self.mean.shape != (N_STATE,) or self.covariance.shape != (N_STATE, N_STATE):
            raise ValueError("belief must be 4-state")
        if np.max(np.abs(self.covariance - self.covariance.T)) > 1e-9:
            raise ValueError("covariance must be symmetric")


def initial_belief(position=None) -> UkfBelief:
    mean = np.zeros(N_STATE)
    if position is not None:
        mean[:2] = position
    return UkfBelief(mean=mean, covariance=NOISE_SCALE * np.eye(N_STATE))


def unscented_weights(n: int = N_STATE, alpha: float = 0.1, beta: float = 2.0,
                      kappa: float = 1.0) -> tuple[float, np.ndarray, np.ndarray]:
    lam = alpha ** 2 * (n + kappa) - n
    wm = np.full(2 * n + 1, 1.0 / (2.0 * (n + lam)))
    wc = wm.copy()
    wm[0] = lam / (n + lam)
    wc[0] = lam / (n + lam) + (1.0 - alpha ** 2 + beta)
    return lam, wm, wc


def sigma_points(mean: np.ndarray, cov: np.ndarray, lam: float) -> np.ndarray:
    n = mean.size
    scaled = (n + lam) * cov
    root = np.linalg.cholesky(scaled)
    pts = np.empty((2 * n + 1, n))
    pts[0] = mean
    for i in range(n):
        pts[1 + i] = mean + root[:, i]
        pts[1 + n + i] = mean - root[:, i]
    return pts


def _cv_transition(dt: float) -> np.ndarray:
    f = np.eye(N_STATE)
    f[0, 2] = dt
    f[1, 3] = dt
    return f


def ukf_step(belief: UkfBelief, measurement: np.ndarray | None, dt: float,
             alpha: float = 0.1, beta: float = 2.0, kappa: float = 1.0) -> UkfBelief:
    """Predict one constant-velocity step and, if a measurement of the full
    4-state is available, apply the unscented update.

    If the covariance loses positive definiteness the belief is
    reinitialized to the isotropic prior and flagged.
    """
    lam, wm, wc = unscented_weights(N_STATE, alpha, beta, kappa)
    q = NOISE_SCALE * np.eye(N_STATE)
    r = NOISE_SCALE * np.eye(N_STATE)
    f = _cv_transition(dt)

    try:
        pts = sigma_points(belief.mean, belief.covariance, lam)
    except np.linalg.LinAlgError:
        fresh = initial_belief(belief.mean[:2])
        fresh.reinitialized = True
        return fresh

    prop = pts @ f.T
    mean_pred = wm @ prop
    diff = prop - mean_pred
    cov_pred = diff.T @ (wc[:, None] * diff) + q
    cov_pred = 0.5 * (cov_pred + cov_pred.T)

    if measurement is None:
        return UkfBelief(mean=mean_pred, covariance=cov_pred)

    try:
        pts2 = sigma_points(mean_pred, cov_pred, lam)
    except np.linalg.LinAlgError:
        fresh = initial_belief(mean_pred[:2])
        fresh.reinitialized = True
        return fresh
    zs = pts2  # identity measurement model on the full state
    z_mean = wm @ zs
    dz = zs - z_mean
    dx = pts2 - mean_pred
    s = dz.T @ (wc[:, None] * dz) + r
    cross = dx.T @ (wc[:, None] * dz)
    gain = cross @ np.linalg.inv(s)
    mean_new = mean_pred + gain @ (np.asarray(measurement, dtype=np.float64) - z_mean)
    cov_new = cov_pred - gain @ s @ gain.T
    cov_new = 0.5 * (cov_new + cov_new.T)
    if np.any(np.linalg.eigvalsh(cov_new) <= 0):
        fresh = initial_belief(mean_new[:2])
        fresh.reinitialized = True
        return fresh
    return UkfBelief(mean=mean_new, covariance=cov_new)
