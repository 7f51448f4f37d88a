"""Seeded Brownian and fractional Brownian sample paths on uniform grids.

Every generator is a pure function of ``(grid, seed[, hurst])``.  Random
streams come from the counter-based Philox bit generator, and independent
sub-streams are derived from ``(master seed, task index)`` with
:func:`derive_seed`, so parallel ensembles are reproducible regardless of
scheduling.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .exceptions import DomainError, GridAlignmentError, SynthesisError

__all__ = [
    "TimeGrid",
    "BrownianPath",
    "FbmPath",
    "derive_seed",
    "make_rng",
    "gen_brownian",
    "gen_brownian_ensemble",
    "gen_fbm",
    "fgn_autocovariance",
]

_ALIGN_TOL = 1e-9
# Cholesky fallback is only attempted on grids up to this many points.
_CHOLESKY_MAX_POINTS = 4096


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_min, t_min + step, ..., t_max``.

    ``t_max`` is rounded down to the last node reachable from ``t_min``.
    """

    t_min: float
    t_max: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError(f"grid step must be positive, got {self.step}")
        if not self.t_max > self.t_min:
            raise DomainError("grid needs t_max > t_min")

    @classmethod
    def symmetric(cls, half_width, step):
        """Grid on ``[-half_width, half_width]`` snapped outward to the step."""
        n = int(np.ceil(half_width / step - _ALIGN_TOL))
        return cls(-n * step, n * step, step)

    @property
    def n_points(self):
        return int(np.floor((self.t_max - self.t_min) / self.step + _ALIGN_TOL)) + 1

    @property
    def contains_zero(self):
        k = -self.t_min / self.step
        return self.t_min <= 0 <= self.t_max and abs(k - round(k)) < _ALIGN_TOL

    @property
    def zero_index(self):
        if not self.contains_zero:
            raise GridAlignmentError(
                f"grid [{self.t_min}, {self.t_max}] with step {self.step} "
                "does not have 0 as a node"
            )
        return int(round(-self.t_min / self.step))

    @property
    def points(self):
        k = np.arange(self.n_points, dtype=float)
        if self.contains_zero:
            # anchor at 0 so that the origin is represented exactly
            return (k - self.zero_index) * self.step
        return self.t_min + k * self.step

    def index_of(self, t):
        """Index of the node equal to ``t`` (raises if ``t`` is off-grid)."""
        k = (np.asarray(t, dtype=float) - self.t_min) / self.step
        idx = np.rint(k)
        if np.any(np.abs(k - idx) > 1e-6) or np.any(idx < 0) or np.any(idx >= self.n_points):
            raise GridAlignmentError(f"time(s) {t} are not nodes of the grid")
        return idx.astype(np.int64)

    def covers(self, a, b):
        return self.t_min - _ALIGN_TOL * self.step <= a and b <= self.t_max + _ALIGN_TOL * self.step


@dataclass(frozen=True, eq=False)
class BrownianPath:
    """Two-sided Brownian motion sampled on ``grid``, anchored at ``B_0 = 0``."""

    grid: TimeGrid
    values: np.ndarray = field(repr=False)
    seed: int = 0

    def value(self, t):
        return float(self.values[self.grid.index_of(t)])

    def scaled(self, factor):
        """Same path multiplied by ``factor`` (linearity checks)."""
        return BrownianPath(self.grid, factor * self.values, self.seed)

    def restrict(self, every):
        """Subsample every ``every``-th node around the origin."""
        z = self.grid.zero_index
        if z % every or (self.grid.n_points - 1 - z) % every:
            raise GridAlignmentError("coarse grid must keep both endpoints")
        grid = TimeGrid(self.grid.t_min, self.grid.t_max, self.grid.step * every)
        return BrownianPath(grid, self.values[::every].copy(), self.seed)


@dataclass(frozen=True, eq=False)
class FbmPath:
    grid: TimeGrid
    values: np.ndarray = field(repr=False)
    hurst: float = 0.5
    seed: int = 0

    def value(self, t):
        return float(self.values[self.grid.index_of(t)])


def derive_seed(master, index):
    """64-bit seed of task ``index`` drawn from master seed ``master``."""
    ss = np.random.SeedSequence(int(master), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed, stream=0):
    """Philox generator for ``(seed, stream)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def gen_brownian(grid, seed):
    """Brownian path on ``grid`` built as two independent walks out of 0.

    The ``u >= 0`` branch uses stream 0 of ``seed`` and the ``u <= 0``
    branch stream 1, so each branch only depends on its own length.
    """
    z = grid.zero_index
    n = grid.n_points
    sd = np.sqrt(grid.step)
    values = np.empty(n)
    values[z] = 0.0
    if n - 1 - z:
        inc = make_rng(seed, 0).standard_normal(n - 1 - z) * sd
        values[z + 1:] = np.cumsum(inc)
    if z:
        inc = make_rng(seed, 1).standard_normal(z) * sd
        values[:z] = np.cumsum(inc)[::-1]
    return BrownianPath(grid, values, int(seed))


def gen_brownian_ensemble(grid, seeds):
    """Stack of Brownian paths, one row per seed."""
    return np.stack([gen_brownian(grid, s).values for s in seeds])


def fgn_autocovariance(hurst, n):
    """Autocovariance of unit-step fractional Gaussian noise at lags 0..n-1."""
    k = np.arange(n, dtype=float)
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** h2 - 2.0 * k ** h2 + np.abs(k - 1) ** h2)


def _fgn_circulant(hurst, n, rng):
    r = fgn_autocovariance(hurst, n + 1)
    c = np.concatenate([r, r[-2:0:-1]])
    lam = np.fft.fft(c).real
    if lam.min() < -1e-10 * lam.max():
        return None
    lam = np.clip(lam, 0.0, None)
    m = c.size
    xi = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    y = np.fft.fft(np.sqrt(lam / m) * xi)
    return y.real[:n]


def _fgn_cholesky(hurst, n, rng):
    r = fgn_autocovariance(hurst, n)
    cov = linalg.toeplitz(r)
    try:
        chol = linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError as exc:
        raise SynthesisError(f"fGn covariance not positive definite for H={hurst}") from exc
    return chol @ rng.standard_normal(n)


def gen_fbm(grid, hurst, seed):
    """Exact fractional Brownian motion on ``grid`` with ``B^H_0 = 0``.

    Fractional Gaussian noise is drawn over the whole grid by circulant
    embedding (Cholesky on small grids if the embedding is not positive
    semidefinite), cumulated from ``t_min`` and re-anchored at the origin;
    stationarity of the increments makes the result an fBm started at 0.
    """
    if not 0.0 < hurst < 1.0:
        raise DomainError(f"Hurst exponent must lie in (0, 1), got {hurst}")
    z = grid.zero_index
    n = grid.n_points - 1
    rng = make_rng(seed, 2)
    noise = _fgn_circulant(hurst, n, rng)
    if noise is None:
        if n > _CHOLESKY_MAX_POINTS:
            raise SynthesisError(
                f"circulant embedding failed and grid too large ({n}) for Cholesky"
            )
        noise = _fgn_cholesky(hurst, n, rng)
    path = np.concatenate([[0.0], np.cumsum(noise)]) * grid.step ** hurst
    path -= path[z]
    path[z] = 0.0
    return FbmPath(grid, path, float(hurst), int(seed))
