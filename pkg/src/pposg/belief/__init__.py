from .mixture import (GaussianMixture, mixture_mean, mixture_nll,
                      mixture_sample, SIGMA_FLOOR)
from .history import ObservationHistory
from .bimdn import BiMDN
from .ukf import UkfBelief, initial_belief, sigma_points, ukf_step, unscented_weights
from .features import FEATURE_WIDTHS, MIXED_SAMPLES, belief_features

__all__ = [
    "GaussianMixture", "mixture_mean", "mixture_nll", "mixture_sample",
    "SIGMA_FLOOR", "ObservationHistory", "BiMDN",
    "UkfBelief", "initial_belief", "sigma_points", "ukf_step", "unscented_weights",
    "FEATURE_WIDTHS", "MIXED_SAMPLES", "belief_features",
]
