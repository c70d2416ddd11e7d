"""UKF sanity and equivalence with a closed-form Kalman filter.

The unscented transform is exact for linear maps, so on the linear
constant-velocity system the UKF must coincide with the standard KF.
"""

import numpy as np
import pytest

from pposg.belief.ukf import (N_STATE, NOISE_SCALE, UkfBelief, initial_belief,
                              sigma_points, ukf_step, unscented_weights)


def kf_step(mean, cov, measurement, dt):
    """Closed-form Kalman filter oracle for the same CV system."""
    f = np.eye(4)
    f[0, 2] = dt
    f[1, 3] = dt
    q = NOISE_SCALE * np.eye(4)
    r = NOISE_SCALE * np.eye(4)
    mean_pred = f @ mean
    cov_pred = f @ cov @ f.T + q
    if measurement is None:
        return mean_pred, cov_pred
    s = cov_pred + r          # identity measurement matrix
    gain = cov_pred @ np.linalg.inv(s)
    mean_new = mean_pred + gain @ (measurement - mean_pred)
    cov_new = cov_pred - gain @ s @ gain.T
    return mean_new, 0.5 * (cov_new + cov_new.T)


def test_nine_sigma_points():
    b = initial_belief()
    lam, wm, wc = unscented_weights()
    pts = sigma_points(b.mean, b.covariance, lam)
    assert pts.shape == (9, 4)
    assert wm.shape == (9,) and wc.shape == (9,)


def test_lambda_value():
    lam, _, _ = unscented_weights(n=4, alpha=0.1, beta=2.0, kappa=1.0)
    assert lam == pytest.approx(0.01 * 5 - 4)
    assert lam == pytest.approx(-3.95)


def test_weights_sum_to_one():
    _, wm, _ = unscented_weights()
    assert wm.sum() == pytest.approx(1.0)


def test_ukf_matches_kf_over_100_steps():
    rng = np.random.default_rng(0)
    dt = 0.1
    belief = initial_belief(position=(1.0, -2.0))
    mean, cov = belief.mean.copy(), belief.covariance.copy()
    truth = np.array([1.0, -2.0, 0.5, -0.3])
    f = np.eye(4)
    f[0, 2] = dt
    f[1, 3] = dt
    for step in range(100):
        truth = f @ truth
        z = truth + 0.05 * rng.normal(size=4)
        measurement = z if step % 3 != 2 else None  # occasional dropouts
        belief = ukf_step(belief, measurement, dt)
        mean, cov = kf_step(mean, cov, measurement, dt)
        np.testing.assert_allclose(belief.mean, mean, atol=1e-6)
        np.testing.assert_allclose(belief.covariance, cov, atol=1e-6)
        assert not belief.reinitialized


def test_prediction_only_grows_covariance_trace():
    belief = initial_belief()
    for _ in range(20):
        prev = np.trace(belief.covariance)
        belief = ukf_step(belief, None, 0.1)
        assert np.trace(belief.covariance) >= prev


def test_asymmetric_covariance_rejected():
    cov = 0.1 * np.eye(4)
    cov[0, 1] = 1e-3
    with pytest.raises(ValueError):
        UkfBelief(mean=np.zeros(4), covariance=cov)


def test_pd_loss_reinitializes_and_flags():
    # a zero covariance breaks the Cholesky factorization
    belief = UkfBelief(mean=np.zeros(N_STATE), covariance=np.zeros((4, 4)))
    out = ukf_step(belief, None, 0.1)
    assert out.reinitialized
    np.testing.assert_allclose(out.covariance, NOISE_SCALE * np.eye(4))
