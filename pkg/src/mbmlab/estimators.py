"""scikit-learn style wrappers.

Rows of ``X`` are functions sampled on a common uniform grid starting at
``x0`` with spacing ``step``.  The estimators are stateless apart from the
grid description, so ``fit`` only validates and records the input width;
``transform`` returns one feature row per input row.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .field import QuadratureConfig, fbf_path
from .fractal import DEFAULT_RHO, DEFAULT_SCALES, est_boxdim_local
from .noise import BrownianPath, TimeGrid
from .regularity import Sampled, default_sprime_grid, est_exponents, est_frontier

__all__ = ["HolderExponents", "FrontierEstimator", "BoxDimension", "FieldTransformer"]


class _RowEstimator(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        X = check_array(X, ensure_min_features=4)
        self.n_features_in_ = X.shape[1]
        return self

    def _rows(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, ensure_min_features=4)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} samples per row, expected "
                             f"{self.n_features_in_}")
        return [Sampled(float(self.x0), float(self.step), row) for row in X]

    def transform(self, X):
        return np.array([self._features(fs) for fs in self._rows(X)], dtype=float)

    def predict(self, X):
        return self.transform(X)


class HolderExponents(_RowEstimator):
    """Pointwise and local exponents at ``t``; ``transform`` gives ``(n, 2)``."""

    def __init__(self, t=0.0, x0=0.0, step=1.0, scales=None, rho=0.5, cap=1.0):
        self.t = t
        self.x0 = x0
        self.step = step
        self.scales = scales
        self.rho = rho
        self.cap = cap

    def _features(self, fs):
        e = est_exponents(fs, self.t, self.scales, self.rho, self.cap)
        return [e.pointwise, e.local]


class FrontierEstimator(_RowEstimator):
    """Projected frontier at ``t`` on ``sprime`` (default grid if None)."""

    def __init__(self, t=0.0, x0=0.0, step=1.0, sprime=None, scales=None, rho=0.5, cap=1.0):
        self.t = t
        self.x0 = x0
        self.step = step
        self.sprime = sprime
        self.scales = scales
        self.rho = rho
        self.cap = cap

    def fit(self, X, y=None):
        super().fit(X, y)
        self.sprime_ = default_sprime_grid() if self.sprime is None else np.asarray(self.sprime)
        return self

    def _features(self, fs):
        return est_frontier(fs, self.t, self.sprime_, self.scales, self.rho, self.cap).sigma


class BoxDimension(_RowEstimator):
    """Local box dimension of the graph near ``t``: columns value, lower, upper."""

    def __init__(self, t=0.0, x0=0.0, step=1.0, rho=DEFAULT_RHO, scales=DEFAULT_SCALES):
        self.t = t
        self.x0 = x0
        self.step = step
        self.rho = rho
        self.scales = scales

    def _features(self, fs):
        d = est_boxdim_local(fs, self.t, self.rho, tuple(self.scales))
        return [d.value, d.lower, d.upper]


class FieldTransformer(TransformerMixin, BaseEstimator):
    """Maps Brownian paths on ``[-half_width, half_width]`` (one per row) to
    ``B±(times, h)``."""

    def __init__(self, h=0.5, side="+", times=(0.0,), half_width=21.0, step=2.0 ** -10,
                 truncation=None):
        self.h = h
        self.side = side
        self.times = times
        self.half_width = half_width
        self.step = step
        self.truncation = truncation

    def fit(self, X, y=None):
        X = check_array(X)
        self.grid_ = TimeGrid.symmetric(self.half_width, self.step)
        if X.shape[1] != self.grid_.n_points:
            raise ValueError(f"rows must hold {self.grid_.n_points} noise samples, "
                             f"got {X.shape[1]}")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError("noise rows do not match the fitted grid")
        q = QuadratureConfig(truncation=self.truncation)
        times = np.asarray(self.times, dtype=float)
        return np.stack([fbf_path(self.side, self.h, BrownianPath(self.grid_, row), times, q)
                         for row in X])
