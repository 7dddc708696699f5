"""Accelerated degradation modeling with memory effects and unit-to-unit variability."""

from .data import AdtDataset, StressLevel, Unit, ingest_csv
from .evaluation import aic, cross_validate, er_indices, relative_error
from .fgn_fbm import fbm_covariance, simulate_fbm_path, simulate_fgn
from .inference import em_fit, fit, mle_fixed, observed_loglik, two_step_mle
from .model import AccelerationKind, StressSpec, ThetaM0, Variant, normalize_stress
from .reliability import McConfig, reliability_curve, time_at_reliability
from .simulator import SimDesign, generate_dataset

__all__ = [
    "AccelerationKind", "AdtDataset", "McConfig", "SimDesign", "StressLevel", "StressSpec", "ThetaM0",
    "Unit", "Variant", "aic", "cross_validate", "em_fit", "er_indices", "fbm_covariance",
    "fit", "generate_dataset", "ingest_csv", "mle_fixed", "normalize_stress", "observed_loglik",
    "relative_error", "reliability_curve", "simulate_fbm_path", "simulate_fgn", "time_at_reliability",
    "two_step_mle",
]
