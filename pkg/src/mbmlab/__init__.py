"""Multifractional Brownian motion lab: fields, regularity estimators,
dimension estimators and Gaussian second-order checks."""

from .exceptions import (ApplicabilityError, ConfigError, DomainError, EstimationError,
                         GridAlignmentError, MbmLabError, ScaleError, StatisticsError,
                         StepError, SupportError, SynthesisError)
from .field import (MbmPath, QuadratureConfig, fbf_eval, fbf_partial, fbf_partial_path,
                    fbf_path, fbf_wb, mbm_sample, mbm_stochint_oracle)
from .fractal import est_boxdim_local, est_pboxdim_local, level_set_boxdim
from .gauss import empirical_cov, lnd_slope
from .hurst import build_chirp, build_hurst, hurst_from_spec
from .noise import BrownianPath, FbmPath, TimeGrid, gen_brownian, gen_fbm
from .regularity import Sampled, est_exponents, est_frontier

__version__ = "0.1.0"

__all__ = [
    "ApplicabilityError", "ConfigError", "DomainError", "EstimationError",
    "GridAlignmentError", "MbmLabError", "ScaleError", "StatisticsError", "StepError",
    "SupportError", "SynthesisError",
    "MbmPath", "QuadratureConfig", "fbf_eval", "fbf_partial", "fbf_partial_path", "fbf_path",
    "fbf_wb", "mbm_sample", "mbm_stochint_oracle",
    "est_boxdim_local", "est_pboxdim_local", "level_set_boxdim",
    "empirical_cov", "lnd_slope",
    "build_chirp", "build_hurst", "hurst_from_spec",
    "BrownianPath", "FbmPath", "TimeGrid", "gen_brownian", "gen_fbm",
    "Sampled", "est_exponents", "est_frontier",
]
