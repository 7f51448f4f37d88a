"""Second-order analysis of mBm ensembles.

mBm at a fixed set of probe times is a fixed linear functional of the
Brownian path (see :func:`mbmlab.field.field_weights`), so ensembles are
generated by applying one weight matrix to many seeded paths.  The same
weights give the exact covariance, which the tests use as an oracle for the
Monte Carlo estimates.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_1d, check_int, check_positive
from .exceptions import ApplicabilityError, DomainError, StatisticsError
from .field import QuadratureConfig, field_weights
from .noise import TimeGrid, gen_brownian

__all__ = [
    "CovMatrix",
    "mbm_weights",
    "mbm_ensemble",
    "exact_cov",
    "empirical_cov",
    "cond_var",
    "LndResult",
    "lnd_slope",
    "incr_var_check",
]

MIN_SEEDS = 100
MAX_PROBES = 20
_NEG_EIG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CovMatrix:
    probe_times: np.ndarray
    entries: np.ndarray = field(repr=False)
    n_seeds: int = 0
    min_eig_raw: float = 0.0

    def var(self, i):
        return float(self.entries[i, i])

    def incr_var(self, i, j):
        e = self.entries
        return float(e[i, i] + e[j, j] - 2.0 * e[i, j])


# ---------------------------------------------------------------- ensembles


def _row(side, s, h, grid, q):
    """Weights of ``B±(s, h)``; off-grid ``s`` interpolates the two nodes."""
    k = s / grid.step
    k0 = np.floor(k + 1e-9)
    lam = k - k0
    if lam < 1e-9:
        W, lo = field_weights(side, k0 * grid.step, h, grid, q)
        return W[0], lo
    W, lo = field_weights(side, [k0 * grid.step, (k0 + 1) * grid.step], h, grid, q)
    return (1.0 - lam) * W[0] + lam * W[1], lo


def mbm_weights(times, hurst, a_plus, a_minus, noise_grid, q=None, levels=None):
    """Weight matrix of ``a+ B+(t, H(t)) + a- B-(t, H(t))`` at ``times``.

    ``levels`` overrides the exponent used at each time (for instance the
    left limit of a jump, or an exactly known level); off-grid times are
    interpolated linearly between the neighbouring noise nodes.
    """
    if a_plus == 0 and a_minus == 0:
        raise DomainError("(a_plus, a_minus) must not both be zero")
    times = as_1d(times, "times")
    hv = as_1d(hurst(times) if levels is None else levels, "levels")
    q = q or QuadratureConfig(truncation=20.0 + float(np.max(np.abs(times))))
    rows, lo = [], None
    for t, h in zip(times, hv):
        acc = 0.0
        for side, c in (("+", a_plus), ("-", a_minus)):
            if c:
                w, lo = _row(side, float(t), float(h), noise_grid, q)
                acc = acc + c * w
        rows.append(acc)
    return np.stack(rows), lo


def mbm_ensemble(weights, noise_grid, seeds):
    """Samples ``(n_seeds, n_times)`` from ``(W, lo)`` of :func:`mbm_weights`.

    Row ``k`` uses the Brownian path of ``seeds[k]``, so it equals the mBm
    path built by :func:`mbmlab.field.mbm_sample` from that path.
    """
    W, lo = weights
    n = W.shape[1]
    out = np.empty((len(seeds), W.shape[0]))
    for k, sd in enumerate(seeds):
        vals = gen_brownian(noise_grid, sd).values[lo:lo + n]
        out[k] = W @ vals
    return out


def exact_cov(weights, noise_grid):
    """Covariance of ``W @ B`` for a Brownian ``B`` on the weight window."""
    W, lo = weights
    z = noise_grid.zero_index - lo
    n = W.shape[1]
    if not 0 <= z < n:
        raise DomainError("weight window must contain the origin")
    # coefficient of the increment B_{k+1} - B_k
    right = np.cumsum(W[:, ::-1], axis=1)[:, ::-1]  # sum_{i >= k}
    left = np.cumsum(W, axis=1)  # sum_{i <= k}
    C = np.concatenate([-left[:, :z], right[:, z + 1:]], axis=1)
    return noise_grid.step * (C @ C.T)


# ---------------------------------------------------------------- covariance


def empirical_cov(samples, probe_times=None, min_seeds=MIN_SEEDS):
    """Unbiased covariance of ``samples`` (rows are seeds), PSD-projected.

    Accepts a 2-D array or a sequence of paths with ``values`` on common
    probe times.
    """
    if not isinstance(samples, np.ndarray):
        samples = np.stack([np.asarray(p.values if hasattr(p, "values") else p, dtype=float)
                            for p in samples])
    X = np.asarray(samples, dtype=float)
    if X.ndim != 2:
        raise StatisticsError("samples must be a (seeds, probes) array")
    n, m = X.shape
    if n < min_seeds:
        raise StatisticsError(f"need at least {min_seeds} seeds, got {n}")
    if m > MAX_PROBES:
        raise StatisticsError(f"at most {MAX_PROBES} probes are supported, got {m}")
    Xc = X - X.mean(axis=0)
    C = (Xc.T @ Xc) / (n - 1)
    C = 0.5 * (C + C.T)
    lam, V = np.linalg.eigh(C)
    scale = max(1.0, float(np.abs(lam).max()) if lam.size else 1.0)
    if lam.size and lam.min() < -_NEG_EIG_TOL * scale:
        raise StatisticsError(f"covariance has eigenvalue {lam.min():.3g} below tolerance")
    if lam.size and lam.min() < 0:
        C = (V * np.clip(lam, 0.0, None)) @ V.T
        C = 0.5 * (C + C.T)
    times = np.arange(m, dtype=float) if probe_times is None else as_1d(probe_times)
    return CovMatrix(times, C, n, float(lam.min()) if lam.size else 0.0)


def cond_var(cov, target, conditioners):
    """Gaussian conditional variance of probe ``target`` given ``conditioners``
    (Schur complement with a pseudo-inverse)."""
    E = cov.entries if isinstance(cov, CovMatrix) else np.asarray(cov, dtype=float)
    m = E.shape[0]
    target = check_int(target, "target", 0)
    cond = [check_int(c, "conditioner", 0) for c in conditioners]
    if target >= m or any(c >= m for c in cond):
        raise DomainError("probe index out of range")
    v = float(E[target, target])
    if not cond:
        return v
    K = E[np.ix_(cond, cond)]
    c = E[target, cond]
    r = v - float(c @ np.linalg.pinv(K, rcond=1e-12, hermitian=True) @ c)
    return max(r, 0.0)


# ---------------------------------------------------------------- LND


@dataclass(frozen=True, eq=False)
class LndResult:
    radii: np.ndarray
    points: np.ndarray
    cond_vars: np.ndarray
    slope: float
    fit_r2: float
    exact_cond_vars: np.ndarray = None


def _fit(radii, cv):
    from .regularity import _ls_slope

    ok = cv > 0
    if ok.sum() < 2:
        raise StatisticsError("fewer than two positive conditional variances")
    slope, _, r2 = _ls_slope(np.log(radii[ok]), np.log(cv[ok]))
    return slope, r2


def _level_points(hurst, t, radii):
    pts = hurst.level_points(t, float(radii.min()) / 2, float(radii.max()) * 2)
    if pts is None:
        return t + radii
    pts = np.asarray(pts, dtype=float)
    if pts.size == 0:
        raise ApplicabilityError(f"no points with H(s) = H({t}) are known for {hurst.kind}")
    d = np.abs(pts - t)
    pick = [int(np.argmin(np.abs(np.log(d / r)))) for r in radii]
    if len(set(pick)) < len(pick):
        raise ApplicabilityError("radii are not resolved by the level-matching points")
    return pts[pick]


def lnd_slope(hurst, t, radii, seeds, noise_step=2.0 ** -12, a_plus=1.0, a_minus=0.0,
              q=None, fit_window=None, exact=False):
    """Slope of ``log Var(X_t | X_s)`` against ``log |s - t|``.

    For each radius ``r`` the conditioning point ``s`` is the known point at
    distance about ``r`` with ``H(s) = H(t)`` (``t + r`` for constant ``H``).
    ``fit_window = (r_lo, r_hi)`` restricts the regression to those radii.
    """
    radii = np.sort(as_1d(radii, "radii"))[::-1]
    check_positive(noise_step, "noise_step")
    pts = _level_points(hurst, t, radii)
    h_t = float(hurst(t))
    times = np.concatenate([[t], pts])
    U = 20.0 + float(np.max(np.abs(times))) + 1.0
    grid = TimeGrid.symmetric(U, noise_step)
    q = q or QuadratureConfig(truncation=U)
    levels = np.full(times.size, h_t)  # H(s) = H(t) by construction
    wts = mbm_weights(times, hurst, a_plus, a_minus, grid, q, levels=levels)
    X = mbm_ensemble(wts, grid, seeds)
    cov = empirical_cov(X, times)
    dist = np.abs(pts - t)
    cv = np.array([cond_var(cov, 0, [k + 1]) for k in range(pts.size)])
    ex = None
    if exact:
        E = exact_cov(wts, grid)
        ex = np.array([cond_var(E, 0, [k + 1]) for k in range(pts.size)])
    use = np.ones(dist.size, dtype=bool)
    if fit_window is not None:
        r_lo, r_hi = fit_window
        use = (dist >= r_lo * (1 - 1e-9)) & (dist <= r_hi * (1 + 1e-9))
    slope, r2 = _fit(dist[use], cv[use])
    return LndResult(dist, pts, cv, slope, r2, ex)


def incr_var_check(hurst, t, rho, seeds, n_probes=8, noise_step=2.0 ** -12,
                   a_plus=1.0, a_minus=0.0, q=None):
    """Min and max over probe pairs of ``E(X_u - X_v)^2`` divided by
    ``|u - v|^(2 H(t)) + (H(u) - H(v))^2`` on ``n_probes`` points of
    ``[t - rho, t + rho]``."""
    check_positive(rho, "rho")
    n_probes = check_int(n_probes, "n_probes", 2)
    probes = np.rint(np.linspace(t - rho, t + rho, n_probes) / noise_step) * noise_step
    probes = np.unique(probes)
    U = 20.0 + float(np.max(np.abs(probes)))
    grid = TimeGrid.symmetric(U, noise_step)
    q = q or QuadratureConfig(truncation=U)
    X = mbm_ensemble(mbm_weights(probes, hurst, a_plus, a_minus, grid, q), grid, seeds)
    cov = empirical_cov(X, probes)
    hv = np.asarray(hurst(probes), dtype=float)
    h_t = float(hurst(t))
    ratios = []
    for i in range(probes.size):
        for j in range(i + 1, probes.size):
            denom = abs(probes[i] - probes[j]) ** (2 * h_t) + (hv[i] - hv[j]) ** 2
            ratios.append(cov.incr_var(i, j) / denom)
    ratios = np.asarray(ratios)
    return float(ratios.min()), float(ratios.max())
