"""Hölder exponents and 2-microlocal frontiers from sampled paths.

Samples are values on a uniform grid.  All estimators work on dyadic lags
``|u - v| = 2^k * step`` and dyadic distance bands around the probe time, so
every statistic is a maximum over an explicit, finite set of pairs.

Frontier estimate at ``s'``: with ``S(i, j)`` the largest ``|f(u) - f(v)|``
over pairs at lag ``2^-j`` whose distance sum ``|u-t| + |v-t|`` lies in
``[2^-i, 2^(1-i))``, take the envelope ``E_j = max_i log2 S(i, j) - i s'`` and
fit ``E_j`` against ``j``; minus the slope is the raw ``sigma(s')``.  The raw
curve is then projected onto concave, nondecreasing curves with slopes in
``[0, 1]`` and clipped at the cap.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .exceptions import EstimationError

__all__ = [
    "Sampled",
    "as_sampled",
    "ExponentEstimate",
    "FrontierCurve",
    "default_sprime_grid",
    "pair_sups",
    "est_exponents",
    "est_frontier",
    "project_frontier",
    "predict_frontier_mbm",
    "predict_pointwise_mbm",
    "detect_multiplicity",
]

MIN_SCALES = 6
MIN_BALL_SAMPLES = 16
# pairs kept per (ring, lag) cell and octaves between ball and coarsest lag
PAIRS_PER_CELL = 16
LAG_OFFSET = 3
# oscillation balls need more points: a discrete sup undershoots on rough paths
OSC_MIN_SAMPLES = 64


@dataclass(frozen=True, eq=False)
class Sampled:
    """A function known on ``x0 + k * step``, ``k = 0..n-1``."""

    x0: float
    step: float
    values: np.ndarray = field(repr=False)

    @property
    def x(self):
        return self.x0 + self.step * np.arange(self.values.size)

    def index(self, t):
        return int(round((t - self.x0) / self.step))


def as_sampled(f, grid=None):
    """Accept a :class:`Sampled`, an object with ``grid``/``values``, a pair
    ``(x, values)`` on a uniform grid, or a callable together with ``grid``."""
    if isinstance(f, Sampled):
        return f
    if hasattr(f, "grid") and hasattr(f, "values"):
        g = f.grid
        x = g.points
        return Sampled(float(x[0]), float(g.step), np.asarray(f.values, dtype=float))
    if callable(f):
        if grid is None:
            raise EstimationError("a callable needs a grid to be sampled on")
        x = grid.points
        return Sampled(float(x[0]), float(grid.step), np.asarray(f(x), dtype=float))
    x, v = f
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.size != v.size or x.size < 2:
        raise EstimationError("sample abscissae and values must match in length")
    step = (x[-1] - x[0]) / (x.size - 1)
    if not np.allclose(np.diff(x), step, rtol=1e-6, atol=0):
        raise EstimationError("samples must lie on a uniform grid")
    return Sampled(float(x[0]), float(step), v)


@dataclass(frozen=True)
class ExponentEstimate:
    pointwise: float
    local: float
    fit_r2: float
    scales_used: tuple
    pointwise_capped: bool = False
    local_capped: bool = False
    cap: float = 1.0

    def describe(self):
        def fmt(v, c):
            return f">= {self.cap:g}" if c else f"{v:.4f}"
        return f"pointwise {fmt(self.pointwise, self.pointwise_capped)}, local {fmt(self.local, self.local_capped)}"


@dataclass(frozen=True, eq=False)
class FrontierCurve:
    sprime: np.ndarray
    sigma: np.ndarray
    cap: float = 1.0
    raw: np.ndarray = field(default=None, repr=False)

    def __call__(self, sp):
        return np.interp(sp, self.sprime, self.sigma)

    @property
    def slopes(self):
        return np.diff(self.sigma) / np.diff(self.sprime)

    def is_nondecreasing(self, tol=1e-9):
        return bool(np.all(np.diff(self.sigma) >= -tol))

    def is_concave(self, tol=1e-9):
        return bool(np.all(np.diff(self.slopes) <= tol))

    def slopes_in_unit(self, tol=1e-9):
        s = self.slopes
        return bool(np.all(s >= -tol) and np.all(s <= 1 + tol))

    def pointwise_exp(self):
        """``-inf{s' : sigma(s') >= 0}`` by linear interpolation."""
        sp, sg = self.sprime, self.sigma
        if sg[0] >= 0:
            return float(-sp[0])
        k = int(np.argmax(sg >= 0)) if np.any(sg >= 0) else None
        if k is None:
            return float("-inf")
        s0 = sp[k - 1] + (0 - sg[k - 1]) * (sp[k] - sp[k - 1]) / (sg[k] - sg[k - 1])
        return float(-s0)

    def local_exp(self):
        return float(self(0.0))


def default_sprime_grid():
    return np.round(np.arange(-1.0, 2.0 + 1e-9, 0.05), 10)


def _ls_slope(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum((y - pred) ** 2) / ss if ss > 0 else 1.0
    return float(coef[0]), float(coef[1]), float(max(0.0, min(1.0, r2)))


def _default_scales(fs, t, rho):
    """Dyadic exponents ``k`` with radius/lag ``2^-k`` from ``rho`` down to
    the finest lag keeping ``MIN_BALL_SAMPLES`` per smallest ball."""
    k_lo = int(np.ceil(-np.log2(rho) - 1e-9))
    k_hi = int(np.floor(-np.log2(MIN_BALL_SAMPLES * fs.step / 2.0) + 1e-9))
    return k_lo, k_hi


def _check_scales(k_lo, k_hi, fs, t):
    n = k_hi - k_lo + 1
    if n < MIN_SCALES:
        raise EstimationError(f"only {max(n, 0)} dyadic scales available (need {MIN_SCALES})",
                              n_scales=max(n, 0))
    half = 2.0 ** -k_lo
    i0, i1 = fs.index(t - half), fs.index(t + half)
    if i0 < 0 or i1 >= fs.values.size:
        raise EstimationError("largest ball leaves the sampled window", n_scales=n)
    if 2.0 ** -k_hi < (MIN_BALL_SAMPLES / 2.0) * fs.step * (1 - 1e-9):
        raise EstimationError("smallest ball holds fewer than 16 samples", n_scales=n)


def _oscillation(fs, t, radius):
    i0 = fs.index(t - radius)
    i1 = fs.index(t + radius)
    seg = fs.values[max(i0, 0):i1 + 1]
    return float(seg.max() - seg.min())


def pair_sups(fs, t, ring_exps, lag_exps, max_pairs=None):
    """Table ``S[i, j]`` of pair sups (NaN where no pair falls in the cell).

    Rows follow ``ring_exps`` (distance-sum bands ``[2^-i, 2^(1-i))``), columns
    follow ``lag_exps`` (lags ``2^-j`` rounded to whole steps).  Pairs are
    restricted to the ball ``|u - t| <= 2^-min(ring_exps) / 2``.  With
    ``max_pairs`` each cell keeps that many pairs, evenly spread over the
    cell, so the number of candidates no longer grows with the scale ratio.
    """
    ring_exps = np.asarray(ring_exps)
    i_min = int(ring_exps.min())
    half = 2.0 ** -i_min / 2.0
    i0, i1 = fs.index(t - half), fs.index(t + half)
    i0, i1 = max(i0, 0), min(i1, fs.values.size - 1)
    seg = fs.values[i0:i1 + 1]
    x = fs.x0 + fs.step * np.arange(i0, i1 + 1)
    dist = np.abs(x - t)
    S = np.full((ring_exps.size, len(lag_exps)), np.nan)
    for c, j in enumerate(lag_exps):
        L = max(1, int(round(2.0 ** -j / fs.step)))
        if L >= seg.size:
            continue
        diff = np.abs(seg[L:] - seg[:-L])
        dsum = dist[L:] + dist[:-L]
        band = np.floor(-np.log2(dsum) + 1e-9).astype(np.int64)
        for r, i in enumerate(ring_exps):
            if i > j:
                continue
            m = band == i
            if i == j:
                m |= band > i  # straddling pairs: distance sum equals the lag
            if m.any():
                cand = diff[m]
                if max_pairs is not None and cand.size > max_pairs:
                    pick = np.rint(np.linspace(0, cand.size - 1, max_pairs)).astype(np.int64)
                    cand = cand[pick]
                S[r, c] = cand.max()
    return S


def _tables(fs, t, k_lo, k_hi, max_pairs, lag_offset):
    ring_exps = np.arange(k_lo, k_hi + 2)
    lag_exps = np.arange(k_lo + lag_offset, k_hi + 2)
    S = pair_sups(fs, t, ring_exps, lag_exps, max_pairs)
    return S, ring_exps.astype(float), lag_exps.astype(float)


def est_exponents(f, t, scales=None, rho=0.5, cap=1.0, grid=None, cap_tol=0.02,
                  max_pairs=PAIRS_PER_CELL, lag_offset=LAG_OFFSET):
    """Pointwise and local Hölder exponents at ``t``.

    ``scales`` is a pair ``(k_lo, k_hi)`` of dyadic exponents (radii and lags
    ``2^-k``); by default radii run from ``rho`` down to the finest scale with
    at least 16 samples per ball.  The pointwise exponent is the least-squares
    slope of log oscillation against log radius.  The local exponent is the
    slope of the log of the largest increment at lag ``2^-j`` inside the ball
    of radius ``2^-k_lo / 2`` (the pair table of :func:`pair_sups`).
    """
    fs = as_sampled(f, grid)
    k_lo, k_hi = scales if scales is not None else _default_scales(fs, t, rho)
    _check_scales(k_lo, k_hi, fs, t)
    k_osc = int(np.floor(-np.log2(OSC_MIN_SAMPLES * fs.step / 2.0) + 1e-9))
    ks = np.arange(k_lo, max(min(k_hi, k_osc), k_lo + 2) + 1)
    osc = np.array([_oscillation(fs, t, 2.0 ** -k) for k in ks])
    if np.all(osc <= 0):
        return ExponentEstimate(cap, cap, 1.0, (2.0 ** -k_hi, 2.0 ** -k_lo), True, True, cap)
    keep = osc > 0
    slope, _, r2 = _ls_slope(-ks[keep], np.log2(osc[keep]))
    S, _, lag_exps = _tables(fs, t, k_lo, k_hi, max_pairs, lag_offset)
    with np.errstate(all="ignore"):
        mod = np.nanmax(np.where(np.isnan(S), -np.inf, S), axis=0)
    ok = np.isfinite(mod) & (mod > 0)
    if ok.sum() < 2:
        loc = cap
    else:
        loc, _, _ = _ls_slope(-lag_exps[ok], np.log2(mod[ok]))
    p_cap = slope >= cap - cap_tol
    l_cap = loc >= cap - cap_tol
    return ExponentEstimate(min(slope, cap), min(loc, cap), r2,
                            (2.0 ** -k_hi, 2.0 ** -k_lo), bool(p_cap), bool(l_cap), cap)


def _raw_frontier(S, ring_exps, lag_exps, sprime):
    with np.errstate(divide="ignore"):
        logS = np.log2(S)
    out = np.empty(sprime.size)
    for n, sp in enumerate(sprime):
        env = np.nanmax(logS - sp * ring_exps[:, None], axis=0)
        ok = np.isfinite(env)
        if ok.sum() < 2:
            out[n] = np.inf
            continue
        slope, _, _ = _ls_slope(lag_exps[ok], env[ok])
        out[n] = -slope
    return out


def project_frontier(sprime, sigma, cap=1.0):
    """Least-squares projection onto concave nondecreasing curves with slopes
    in ``[0, 1]``, then clipped at ``cap``."""
    sp = np.asarray(sprime, dtype=float)
    y = np.minimum(np.asarray(sigma, dtype=float), cap + 1.0)
    ds = np.diff(sp)
    m = ds.size
    # sigma_k = s0 + sum_{l<k} d_l ds_l, d_l = sum_{r>=l} e_r, e_r >= 0, sum e <= 1
    # y ~ s0 + M e with M[k, r] = sum_{l < min(k, r+1)} ds_l
    cum = np.concatenate([[0.0], np.cumsum(ds)])
    k = np.arange(m + 1)[:, None]
    r = np.arange(m)[None, :]
    M = cum[np.minimum(k, r + 1)]
    A = np.hstack([np.ones((m + 1, 1)), M])

    def obj(z):
        res = A @ z - y
        return 0.5 * res @ res

    def grad(z):
        return A.T @ (A @ z - y)

    z0 = np.zeros(m + 1)
    z0[0] = float(np.median(y))
    cons = [{"type": "ineq", "fun": lambda z: 1.0 - z[1:].sum(),
             "jac": lambda z: np.concatenate([[0.0], -np.ones(m)])}]
    bounds = [(None, None)] + [(0.0, 1.0)] * m
    res = optimize.minimize(obj, z0, jac=grad, bounds=bounds, constraints=cons,
                            method="SLSQP", options={"maxiter": 500, "ftol": 1e-12})
    fit = A @ res.x
    return np.minimum(fit, cap)


def est_frontier(f, t, sprime_grid=None, scales=None, rho=0.5, cap=1.0, grid=None,
                 max_pairs=PAIRS_PER_CELL, lag_offset=LAG_OFFSET):
    """Estimated 2-microlocal frontier at ``t`` (see module docstring).

    Lags run from ``2^-(k_lo + lag_offset)`` to the finest scale, rings from
    the ball radius inwards; each (ring, lag) cell keeps ``max_pairs`` pairs.
    """
    fs = as_sampled(f, grid)
    sp = default_sprime_grid() if sprime_grid is None else np.asarray(sprime_grid, dtype=float)
    k_lo, k_hi = scales if scales is not None else _default_scales(fs, t, rho)
    _check_scales(k_lo, k_hi, fs, t)
    S, ring_exps, lag_exps = _tables(fs, t, k_lo, k_hi, max_pairs, lag_offset)
    if not np.any(np.nan_to_num(S) > 0):
        sig = np.full(sp.size, cap)
        return FrontierCurve(sp, sig, cap, raw=sig.copy())
    raw = _raw_frontier(S, ring_exps, lag_exps, sp)
    sig = project_frontier(sp, raw, cap)
    return FrontierCurve(sp, sig, cap, raw=raw)


def predict_frontier_mbm(H_t, frontier_H, m, sprime_grid=None, cap=np.inf):
    """Lower frontier bound of mBm at a point and whether it is exact.

    ``frontier_H`` is a callable ``s' -> sigma_H(s')``; ``m`` is a positive
    integer or ``inf``.
    """
    sp = default_sprime_grid() if sprime_grid is None else np.asarray(sprime_grid, dtype=float)
    H_t = float(H_t)
    base = np.minimum(sp + H_t, H_t)
    sig_h = np.asarray(frontier_H(sp + H_t), dtype=float)
    exact = m == 1
    if exact:
        lower = np.minimum(base, np.asarray(frontier_H(sp), dtype=float))
    else:
        lower = np.minimum(base, sig_h)
        if np.isfinite(m):
            if int(m) != m or m < 1:
                raise ValueError("multiplicity must be a positive integer or inf")
            lower = np.minimum(lower, m * np.asarray(frontier_H(sp / m), dtype=float))
    return FrontierCurve(sp, np.minimum(lower, cap), cap), exact


def predict_pointwise_mbm(H_t, alpha_H, m):
    """``H_t ^ (m * alpha_H)`` with ``inf`` for smooth ``H`` or ``m = inf``."""
    if not np.isfinite(m) or not np.isfinite(alpha_H):
        return float(H_t)
    return float(min(H_t, m * alpha_H))


def detect_multiplicity(derivs, rel=1e-3, scale=None, k_max=3):
    """Smallest ``k <= k_max`` whose H-derivative exceeds ``rel * scale``.

    ``derivs`` holds ``d^k/dH^k B(t, H)`` for ``k = 0..k_max``; ``scale``
    defaults to the largest of their magnitudes.  Returns ``inf`` when none
    qualifies.
    """
    d = np.abs(np.asarray(derivs, dtype=float))
    if scale is None:
        scale = float(d.max()) if d.size else 0.0
    for k in range(1, min(k_max, d.size - 1) + 1):
        if d[k] > rel * scale:
            return k
    return float("inf")
