"""Pathwise fractional Brownian field built from a single Brownian path.

All routines read the Brownian path on the window ``|u| <= U`` and treat it as
piecewise linear between grid nodes, frozen at its end values outside the
window.  With that convention the singular kernels are integrated exactly
cell by cell, so every field value is a fixed linear functional of the path
values.  That functional is exposed through :func:`field_weights`, which is
what ensemble computations use.

Two routes evaluate ``B+(t, H)``:

* ``"integrated"`` (default for ``H > 1/2``) integrates the path against the
  derivative kernel ``(t-u)_+^{H-3/2} - (-u)_+^{H-3/2}`` normalised by
  ``1/Gamma(H-1/2)``;
* ``"anchored"`` (default for ``H < 1/2``) subtracts ``B_t`` on the segment
  ``[t - D, t]`` so the singularity becomes integrable, and adds the boundary
  term ``B_t D^{H-1/2} / Gamma(H+1/2)``.

``H = 1/2`` returns ``B_t`` directly.  ``B-`` is obtained from ``B+`` of the
reflected path ``u -> -B_{-u}`` at ``-t``.
"""

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import comb

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy import signal, special

from ._kernels import (hat_weights, power_over_exponent_derivs, rgamma_derivs,
                       scale_moments)
from ._validation import check_int, check_open_unit, check_positive, check_side
from .exceptions import DomainError, GridAlignmentError, StepError, SupportError
from .noise import BrownianPath, TimeGrid

__all__ = [
    "QuadratureConfig",
    "MbmPath",
    "fbf_eval",
    "fbf_path",
    "fbf_partial",
    "fbf_partial_analytic",
    "fbf_partial_path",
    "fbf_wb",
    "field_weights",
    "wb_weights",
    "mbm_sample",
    "mbm_lattice",
    "lattice_derivs",
    "mbm_stochint_oracle",
    "log_kernel_path",
    "wb_normaliser",
    "verify_wb_relation",
    "tail_bound",
]

_TOL = 1e-9


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls for the singular-kernel integrals.

    ``truncation`` is the half-width ``U`` of the noise window; ``None`` means
    ``20 + max|t|`` over the requested evaluation times.
    """

    truncation: float | None = None
    tail_tol: float = 1e-6
    anchor_offset: float = 1.0
    fd_step: float = 1e-3
    max_deriv: int = 3

    def __post_init__(self):
        if self.truncation is not None:
            check_positive(self.truncation, "truncation")
        check_positive(self.tail_tol, "tail_tol")
        check_positive(self.anchor_offset, "anchor_offset")
        check_positive(self.fd_step, "fd_step")
        check_int(self.max_deriv, "max_deriv", 0)
        if self.max_deriv > 3:
            raise DomainError("max_deriv is limited to 3")

    def resolve_truncation(self, t_abs_max):
        if self.truncation is not None:
            return float(self.truncation)
        return 20.0 + float(t_abs_max)


@dataclass(frozen=True, eq=False)
class MbmPath:
    grid: TimeGrid
    values: np.ndarray = dc_field(repr=False)
    hurst: object = None
    a_plus: float = 1.0
    a_minus: float = 0.0
    noise_seed: int = 0


# ---------------------------------------------------------------- windows


@dataclass(frozen=True)
class _Window:
    """Noise nodes with ``|u| <= U``; ``z`` is the index of ``u = 0``."""

    lo: int  # first index in the parent grid
    n: int
    z: int
    step: float

    @property
    def u0(self):
        return -self.z * self.step

    def node(self, t):
        k = (np.asarray(t, dtype=float) / self.step) + self.z
        idx = np.rint(k)
        if np.any(np.abs(k - idx) > 1e-6):
            raise GridAlignmentError(f"time(s) {t} are not noise-grid nodes")
        return idx.astype(np.int64)

    def values(self, bm_values):
        return np.asarray(bm_values)[..., self.lo:self.lo + self.n]


def _window(grid, U, t_abs_max, need=0.0):
    if not grid.contains_zero:
        raise GridAlignmentError("noise grid must contain 0 as a node")
    s = grid.step
    if t_abs_max + need > U + _TOL * s:
        raise SupportError(
            f"truncation U={U} does not exceed max|t| + offset = {t_abs_max + need}")
    half = int(np.floor(U / s + 1e-9))
    zg = grid.zero_index
    n_left = min(half, zg)
    n_right = min(half, grid.n_points - 1 - zg)
    if n_left < half or n_right < half:
        raise SupportError(
            f"noise support [{grid.t_min}, {grid.t_max}] does not cover [-{U}, {U}]")
    return _Window(lo=zg - n_left, n=n_left + n_right + 1, z=n_left, step=s)


def _anchor_cells(q, step):
    k = q.anchor_offset / step
    K = int(round(k))
    if K < 1 or abs(k - K) > 1e-6:
        raise GridAlignmentError(
            f"anchor offset {q.anchor_offset} is not a multiple of the grid step {step}")
    return K


def _resolve_form(h, form):
    if form == "auto":
        if h == 0.5:
            return "exact"
        return "integrated" if h > 0.5 else "anchored"
    if form not in ("integrated", "anchored", "exact"):
        raise DomainError(f"unknown representation form {form!r}")
    if form == "integrated" and h <= 0.5:
        raise DomainError("the integrated form needs h > 1/2")
    if form == "exact" and h != 0.5:
        raise DomainError("the exact form only applies at h = 1/2")
    if form == "anchored" and h == 0.5:
        return "exact"
    return form


# ---------------------------------------------------------------- kernels


@lru_cache(maxsize=24)
def _unit_moments(h, n, order):
    with np.errstate(invalid="ignore", over="ignore"):
        out = hat_weights(h - 1.5, n, order)
    for arr in out:
        arr.setflags(write=False)
    return out


def _moments(h, n, step, order=0):
    """Scaled node weights ``A`` and cell shares for kernel ``w**(h-3/2)``."""
    A, rise, fall = _unit_moments(float(h), int(n), int(order))
    p = h - 1.5
    with np.errstate(invalid="ignore", over="ignore"):
        return (scale_moments(A, step, p), scale_moments(rise, step, p),
                scale_moments(fall, step, p))


def _pow_diff(x, y, a):
    """``(x**a - y**a) / a`` with the ``a -> 0`` limit ``log(x / y)``."""
    if a == 0.0:
        return np.log(x / y)
    ly = np.log(y)
    return np.exp(a * ly) * np.expm1(a * (np.log(x) - ly)) / a


def _plus_weights(win, j, h, form, K, order=0):
    """Weights of ``B+`` (and H-derivatives for the integrated form) at node j."""
    n, z, s = win.n, win.z, win.step
    w = np.zeros((order + 1, n))
    if form == "exact":
        w[0, j] = 1.0
        return w
    a = h - 0.5
    A, rise, fall = _moments(h, n, s, order)
    if j > 0:
        w[:, :j] += A[:, j:0:-1]
        w[:, 0] += rise[:, j - 1] - A[:, j]
    if z > 0:
        w[:, :z] -= A[:, z:0:-1]
        w[:, 0] -= rise[:, z - 1] - A[:, z]
    x0, y0 = j * s, z * s
    if form == "integrated":
        w[:, j] += A[:, 0]
        # frozen path beyond the window
        tail = -(power_over_exponent_derivs(x0, a, order)
                 - power_over_exponent_derivs(y0, a, order))
        w[:, 0] += tail
        rg = rgamma_derivs(a, order)
        out = np.zeros_like(w)
        for k in range(order + 1):
            for ell in range(k + 1):
                out[k] += comb(k, ell) * rg[k - ell] * w[ell]
        return out
    if order:
        raise DomainError("analytic H-derivatives need the integrated form")
    if K > j:
        raise SupportError("anchor point falls outside the noise window")
    rg1 = special.rgamma(a + 1.0)
    c = a * rg1
    w *= c
    inside = A[0, 1:K].sum() + rise[0, K - 1]
    w[0, j] += -c * inside + (K * s) ** a * rg1
    w[0, 0] += -rg1 * a * _pow_diff(x0, y0, a)
    return w


def _minus_from_plus(win, j, fn):
    """Evaluate a '+' construction on the reflected path for the '-' side."""
    rwin = _Window(lo=win.lo, n=win.n, z=win.n - 1 - win.z, step=win.step)
    w = fn(rwin, win.n - 1 - j)
    return -w[..., ::-1]


def _side_weights(side, win, j, h, form, K, order=0):
    if side == "+":
        return _plus_weights(win, j, h, form, K, order)
    return _minus_from_plus(win, j, lambda rw, rj: _plus_weights(rw, rj, h, form, K, order))


# ---------------------------------------------------------------- public API


def _prepare(t, h, grid, q, form):
    h = check_open_unit(h)
    q = q or QuadratureConfig()
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    tmax = float(np.max(np.abs(t_arr))) if t_arr.size else 0.0
    form = _resolve_form(h, form)
    U = q.resolve_truncation(tmax)
    need = q.anchor_offset if form == "anchored" else 0.0
    win = _window(grid, U, tmax, need)
    K = _anchor_cells(q, grid.step) if form == "anchored" else 0
    return h, q, t_arr, form, win, K


def field_weights(side, t, h, grid, q=None, form="auto"):
    """Linear functionals of the noise for ``B±(t_i, h)``.

    Returns ``(W, lo)`` where ``W`` has one row per time and the field values
    are ``W @ values[lo:lo + W.shape[1]]`` for any path on ``grid``.
    """
    side = check_side(side)
    h, q, t_arr, form, win, K = _prepare(t, h, grid, q, form)
    idx = win.node(t_arr)
    W = np.stack([_side_weights(side, win, j, h, form, K)[0] for j in idx])
    return W, win.lo


def fbf_eval(side, t, h, bm, q=None, form="auto"):
    """Field value ``B±(t, h)`` from the Brownian path ``bm``."""
    side = check_side(side)
    h, q, t_arr, form, win, K = _prepare(t, h, bm.grid, q, form)
    if t_arr.size != 1:
        raise DomainError("fbf_eval takes a scalar time; use fbf_path for many")
    j = int(win.node(t_arr)[0])
    w = _side_weights(side, win, j, h, form, K)[0]
    return float(w @ win.values(bm.values))


def _plus_path(vals, z, s, h, form, K):
    """``B+`` at every window node by FFT convolution (entries with no room
    for the anchor segment are NaN)."""
    n = vals.size
    if form == "exact":
        return vals.copy()
    a = h - 0.5
    A, rise, fall = (m[0] for m in _moments(h, n, s, 0))
    seq = A.copy()
    seq[0] = 0.0
    conv = signal.fftconvolve(vals, seq)[:n]
    conv[1:] -= vals[0] * fall[1:n]
    part = conv - conv[z]
    x0 = np.arange(n) * s
    x0[0] = s  # unused: node 0 is outside every admissible evaluation
    y0 = z * s
    if form == "integrated":
        body = part + A[0] * vals
        body += vals[0] * -_pow_diff(x0, y0, a)
        return special.rgamma(a) * body
    rg1 = special.rgamma(a + 1.0)
    c = a * rg1
    inside = A[1:K].sum() + rise[K - 1]
    out = c * part + vals * (-c * inside + (K * s) ** a * rg1)
    out += vals[0] * (-rg1 * a * _pow_diff(x0, y0, a))
    out[:K] = np.nan
    return out


def _side_path(side, vals, z, s, h, form, K):
    if side == "+":
        return _plus_path(vals, z, s, h, form, K)
    n = vals.size
    return _plus_path(-vals[::-1], n - 1 - z, s, h, form, K)[::-1]


def fbf_path(side, h, bm, times, q=None, form="auto"):
    """``B±(t, h)`` at many noise-grid nodes ``times`` at once (FFT route)."""
    side = check_side(side)
    h, q, t_arr, form, win, K = _prepare(times, h, bm.grid, q, form)
    idx = win.node(t_arr)
    vals = np.ascontiguousarray(win.values(bm.values), dtype=float)
    full = _side_path(side, vals, win.z, win.step, h, form, K)
    return full[idx]


def _fd_stencil(k):
    if k == 1:
        return (-1, 1), (-0.5, 0.5), 1
    if k == 2:
        return (-1, 0, 1), (1.0, -2.0, 1.0), 2
    if k == 3:
        return (-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5), 3
    raise DomainError("derivative order must be in 0..3")


def _fd(evaluate, h, k, delta):
    offsets, coefs, power = _fd_stencil(k)

    def central(d):
        return sum(c * evaluate(h + o * d) for o, c in zip(offsets, coefs)) / d ** power

    # one Richardson step on the O(d^2) central difference
    return (4.0 * central(delta / 2.0) - central(delta)) / 3.0


def _check_partial(h, k, q):
    h = check_open_unit(h)
    q = q or QuadratureConfig()
    k = check_int(k, "k", 0)
    if k > q.max_deriv:
        raise DomainError(f"k={k} exceeds max_deriv={q.max_deriv}")
    reach = q.max_deriv * q.fd_step
    if k and not (0.0 < h - reach and h + reach < 1.0):
        raise StepError(f"h={h} +/- {reach} leaves (0, 1)")
    return h, q, k


def fbf_partial(side, t, h, k, bm, q=None):
    """``k``-th H-derivative of ``B±(t, H)`` at ``H = h`` by finite differences."""
    h, q, k = _check_partial(h, k, q)
    if k == 0:
        return fbf_eval(side, t, h, bm, q)
    return float(_fd(lambda x: fbf_eval(side, t, x, bm, q), h, k, q.fd_step))


def fbf_partial_path(side, h, k, bm, times, q=None):
    h, q, k = _check_partial(h, k, q)
    if k == 0:
        return fbf_path(side, h, bm, times, q)
    return _fd(lambda x: fbf_path(side, x, bm, times, q), h, k, q.fd_step)


def fbf_partial_analytic(side, t, h, k, bm, q=None):
    """H-derivative from the log-weighted kernel integral (``h > 1/2`` only)."""
    side = check_side(side)
    h = check_open_unit(h)
    k = check_int(k, "k", 0)
    if k > 3:
        raise DomainError("derivative order must be in 0..3")
    if h <= 0.5:
        raise DomainError("the analytic derivative route needs h > 1/2")
    h, q, t_arr, form, win, K = _prepare(t, h, bm.grid, q, "integrated")
    j = int(win.node(t_arr)[0])
    if side == "+":
        w = _plus_weights(win, j, h, "integrated", 0, k)
    else:
        w = _minus_from_plus(win, j, lambda rw, rj: _plus_weights(rw, rj, h, "integrated", 0, k))
    return float(w[k] @ win.values(bm.values))


# ---------------------------------------------------------------- well-balanced


def _wb_plus_weights(win, j, h):
    """Signed-kernel weights; the two cells touching ``t`` are paired so the
    non-integrable part cancels symmetrically."""
    n, z, s = win.n, win.z, win.step
    a = h - 0.5
    A, rise, _ = (m[0] for m in _moments(h, n, s, 0))
    w = np.zeros(n)

    def signed(center, sign):
        if center > 0:
            w[:center] += sign * A[center:0:-1]
            w[0] += sign * (rise[center - 1] - A[center])
        right = n - 1 - center
        if right > 0:
            w[center + 1:] -= sign * A[1:right + 1]
            w[n - 1] -= sign * (rise[right - 1] - A[right])

    signed(j, 1.0)
    signed(z, -1.0)
    # frozen tails on both ends
    uN = (n - 1 - z) * s
    w[0] += -_pow_diff(j * s, z * s, a)
    w[n - 1] += _pow_diff((n - 1 - j) * s, uN, a)
    return w * special.rgamma(a + 1.0)


def wb_weights(t, h, grid, q=None):
    """Rows of linear functionals for the well-balanced field (see
    :func:`field_weights`)."""
    h = check_open_unit(h)
    q = q or QuadratureConfig()
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    tmax = float(np.max(np.abs(t_arr)))
    win = _window(grid, q.resolve_truncation(tmax), tmax)
    idx = win.node(t_arr)
    return np.stack([_wb_plus_weights(win, j, h) for j in idx]), win.lo


def fbf_wb(t, h, bm, q=None):
    """Well-balanced field (signed power kernel, normalised by ``1/Gamma(h+1/2)``)."""
    W, lo = wb_weights(t, h, bm.grid, q)
    if W.shape[0] != 1:
        raise DomainError("fbf_wb takes a scalar time")
    return float(W[0] @ bm.values[lo:lo + W.shape[1]])


def wb_normaliser(h):
    """Factor linking the well-balanced field to the log-kernel fields.

    Equals ``-(pi/2) (h - 1/2) tan((h + 1/2) pi / 2)``, which tends to 1 as
    ``h -> 1/2``.
    """
    h = check_open_unit(h)
    if h == 0.5:
        return 1.0
    return float(-(np.pi / 2.0) * (h - 0.5) * np.tan((h + 0.5) * np.pi / 2.0))


def log_kernel_path(bm, half_width, q=None):
    """Brownian motion ``(1/2) sum [log|t - m_i| - log|m_i|] dB_i`` on
    ``[-half_width, half_width]``, built from the noise window by midpoint
    Riemann sums (``m_i`` are cell midpoints)."""
    q = q or QuadratureConfig()
    win = _window(bm.grid, q.resolve_truncation(0.0), 0.0)
    s = win.step
    dB = np.diff(win.values(bm.values))
    n_out_half = int(np.floor(half_width / s + 1e-9))
    # t_j - m_i = (j - i - 1/2) s with t_j = (j - n_out_half) s, m_i = (i - z + 1/2) s
    n_out = 2 * n_out_half + 1
    offset = win.z - n_out_half  # lag = j - i + offset
    lags = np.arange(-(dB.size - 1), n_out) + offset
    kern = np.log(np.abs(lags - 0.5) * s)
    conv = signal.fftconvolve(dB, kern)
    # conv[j + dB.size - 1] = sum_i dB_i kern(j - i + offset)
    vals = 0.5 * conv[dB.size - 1:dB.size - 1 + n_out]
    vals = vals - vals[n_out_half]
    vals[n_out_half] = 0.0
    grid = TimeGrid(-n_out_half * s, n_out_half * s, s)
    return BrownianPath(grid, vals, bm.seed)


def verify_wb_relation(t, h, bm, q=None, extension=8.0, tilde=None):
    """Both sides of the well-balanced / log-kernel relation at ``(t, h)``.

    ``lhs`` is the well-balanced field of ``bm``; ``rhs`` is
    ``(Bt+(t, h) - Bt-(t, h)) / wb_normaliser(h)`` where ``Bt`` is the
    log-kernel Brownian motion of :func:`log_kernel_path`, laid out on a
    window ``extension`` times wider.  Returns ``(lhs, rhs, |lhs - rhs|)``.
    """
    q = q or QuadratureConfig()
    lhs = fbf_wb(t, h, bm, q)
    U = q.resolve_truncation(abs(t))
    if tilde is None:
        tilde = log_kernel_path(bm, extension * U, q)
    qt = QuadratureConfig(truncation=tilde.grid.t_max, anchor_offset=q.anchor_offset)
    diff = fbf_eval("+", t, h, tilde, qt) - fbf_eval("-", t, h, tilde, qt)
    rhs = diff / wb_normaliser(h)
    return lhs, rhs, abs(lhs - rhs)


# ---------------------------------------------------------------- mBm


def _hurst_values(hurst, t):
    return np.asarray(hurst(np.asarray(t, dtype=float)), dtype=float)


def _cheb_nodes(lo, hi, m):
    k = np.arange(m)
    x = np.cos(np.pi * k / (m - 1))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * x


def _barycentric(nodes, values, x):
    """Chebyshev (second kind) barycentric interpolation, column ``c`` of
    ``values`` evaluated at ``x[c]``."""
    m = nodes.size
    bw = (-1.0) ** np.arange(m)
    bw[0] *= 0.5
    bw[-1] *= 0.5
    d = x[None, :] - nodes[:, None]
    exact = d == 0
    d[exact] = 1.0
    c = bw[:, None] / d
    out = (c * values).sum(0) / c.sum(0)
    hit = exact.any(0)
    if hit.any():
        out[hit] = values[exact.argmax(0)[hit], np.nonzero(hit)[0]]
    return out


def mbm_lattice(h_lo, h_hi, a_plus, a_minus, bm, times, q=None, n_lattice=20):
    """``a+ B+(t, h) + a- B-(t, h)`` at ``n_lattice`` Chebyshev nodes ``h`` in
    ``[h_lo, h_hi]``; returns ``(nodes, values)`` with one row per node."""
    if a_plus == 0 and a_minus == 0:
        raise DomainError("(a_plus, a_minus) must not both be zero")
    check_int(n_lattice, "n_lattice", 2)
    nodes = _cheb_nodes(check_open_unit(h_lo, "h_lo"), check_open_unit(h_hi, "h_hi"), n_lattice)
    times = np.asarray(times, dtype=float)
    vals = np.zeros((n_lattice, times.size))
    for k, hk in enumerate(nodes):
        for sd, c in (("+", a_plus), ("-", a_minus)):
            if c:
                vals[k] += c * fbf_path(sd, hk, bm, times, q)
    return nodes, vals


def lattice_derivs(nodes, values, h, k_max=3):
    """H-derivatives ``0..k_max`` of the lattice interpolant, column ``c``
    evaluated at ``h[c]``; shape ``(k_max + 1, n_times)``."""
    lo, hi = float(nodes.min()), float(nodes.max())
    x = (2.0 * nodes - (lo + hi)) / (hi - lo)
    coef = cheb.chebfit(x, values, nodes.size - 1)
    xh = (2.0 * np.asarray(h, dtype=float) - (lo + hi)) / (hi - lo)
    out = np.empty((k_max + 1, values.shape[1]))
    for k in range(k_max + 1):
        ck = cheb.chebder(coef, k) * (2.0 / (hi - lo)) ** k if k else coef
        out[k] = cheb.chebval(xh, ck, tensor=False)
    return out


def mbm_sample(grid, hurst, a_plus, a_minus, bm, q=None, method="auto", n_lattice=20):
    """Multifractional Brownian motion ``a+ B+(t, H(t)) + a- B-(t, H(t))``.

    ``method="direct"`` evaluates each time with its own exponent;
    ``method="lattice"`` computes whole-grid fields at Chebyshev nodes in H
    and interpolates at ``H(t)``, which is how long paths are produced.
    """
    if a_plus == 0 and a_minus == 0:
        raise DomainError("(a_plus, a_minus) must not both be zero")
    q = q or QuadratureConfig()
    times = grid.points
    hv = _hurst_values(hurst, times)
    if np.any(~((hv > 0) & (hv < 1))):
        raise DomainError("Hurst function leaves (0, 1) on the grid")
    sides = [(sd, c) for sd, c in (("+", a_plus), ("-", a_minus)) if c != 0]
    lo, hi = float(hv.min()), float(hv.max())
    if method == "auto":
        method = "constant" if hi - lo < 1e-14 else ("direct" if times.size <= 64 else "lattice")
    out = np.zeros(times.size)
    if method == "constant":
        for sd, c in sides:
            out += c * fbf_path(sd, lo, bm, times, q)
    elif method == "direct":
        for i, (t, h) in enumerate(zip(times, hv)):
            out[i] = sum(c * fbf_eval(sd, t, h, bm, q) for sd, c in sides)
    elif method == "lattice":
        nodes, vals = mbm_lattice(lo, hi, a_plus, a_minus, bm, times, q, n_lattice)
        out = _barycentric(nodes, vals, hv)
    else:
        raise DomainError(f"unknown method {method!r}")
    return MbmPath(grid, out, hurst, float(a_plus), float(a_minus), bm.seed)


def _pos_pow(x, a):
    pos = x > 0
    return np.power(np.where(pos, x, 1.0), a) * pos


def mbm_stochint_oracle(grid, hurst, a_plus, a_minus, bm_increments, truncation=None):
    """Riemann-sum stochastic integral of the moving-average kernel.

    ``bm_increments`` is a :class:`BrownianPath` (its increments are used) or
    a pair ``(noise_grid, increments)``.  Each cell contributes its increment
    times the kernel evaluated at the cell midpoint.  ``truncation`` restricts
    the noise to ``|u| <= truncation``.
    """
    if a_plus == 0 and a_minus == 0:
        raise DomainError("(a_plus, a_minus) must not both be zero")
    if isinstance(bm_increments, BrownianPath):
        ngrid, vals = bm_increments.grid, bm_increments.values
        if truncation is not None:
            tmax = float(np.max(np.abs(grid.points)))
            win = _window(ngrid, truncation, tmax)
            vals = win.values(vals)
            ngrid = TimeGrid(win.u0, (win.n - 1 - win.z) * win.step, win.step)
        dB = np.diff(vals)
        seed = bm_increments.seed
    else:
        ngrid, dB = bm_increments
        dB = np.asarray(dB, dtype=float)
        seed = 0
    s = ngrid.step
    zg = ngrid.zero_index
    mids = (np.arange(dB.size) - zg + 0.5) * s
    times = grid.points
    hv = _hurst_values(hurst, times)
    if np.any(~((hv > 0) & (hv < 1))):
        raise DomainError("Hurst function leaves (0, 1) on the grid")
    sides = [(sd, c) for sd, c in (("+", a_plus), ("-", a_minus)) if c != 0]
    out = np.zeros(times.size)
    constant = np.ptp(hv) < 1e-14
    on_lattice = np.allclose(times / s, np.rint(times / s), atol=1e-6)
    if constant and on_lattice and times.size > 64:
        a = hv[0] - 0.5
        rg = special.rgamma(a + 1.0)
        n_nodes = dB.size + 1
        lag = np.arange(1, n_nodes + 1)
        kern = np.concatenate([[0.0], ((lag - 0.5) * s) ** a])
        j = np.rint(times / s).astype(np.int64) + zg
        if np.any(j < 0) or np.any(j >= n_nodes):
            raise SupportError("oracle times outside the noise grid")
        for sd, c in sides:
            inc = dB if sd == "+" else dB[::-1]
            conv = signal.fftconvolve(inc, kern)[:n_nodes]
            if sd == "+":
                vals_t = conv[j] - conv[zg]
            else:
                vals_t = conv[n_nodes - 1 - j] - conv[n_nodes - 1 - zg]
            out += c * rg * vals_t
        return MbmPath(grid, out, hurst, float(a_plus), float(a_minus), seed)
    chunk = max(1, int(2_000_000 // max(dB.size, 1)))
    for start in range(0, times.size, chunk):
        tt = times[start:start + chunk, None]
        aa = hv[start:start + chunk, None] - 0.5
        rg = special.rgamma(aa + 1.0)
        for sd, c in sides:
            if sd == "+":
                kern = _pos_pow(tt - mids, aa) - _pos_pow(-mids[None, :], aa)
            else:
                kern = _pos_pow(mids - tt, aa) - _pos_pow(mids[None, :], aa)
            out[start:start + chunk] += c * (rg * kern) @ dB
    return MbmPath(grid, out, hurst, float(a_plus), float(a_minus), seed)


# ---------------------------------------------------------------- truncation


def tail_bound(t, h, bm, q=None, growth=0.6):
    """A-posteriori bound on the contribution of the noise beyond ``|u| = U``.

    With ``M = max |B_u| / (1 + |u|)**growth`` over the path and the kernel
    difference decaying like ``|u|**(h - 5/2)``, the neglected part (which the
    frozen-tail closure replaces by a constant) is bounded by
    ``2 M |t| |h - 3/2| / |Gamma(h - 1/2)| * int_U^inf (1+u)^growth
    (u - |t|)^(h - 5/2) du``.  Infinite when ``h >= 3/2 - growth``.
    """
    h = check_open_unit(h)
    q = q or QuadratureConfig()
    U = q.resolve_truncation(abs(t))
    u = bm.grid.points
    M = float(np.max(np.abs(bm.values) / (1.0 + np.abs(u)) ** growth))
    e = h - 2.5 + growth
    if e >= -1.0:
        return np.inf
    at = abs(t)
    if at == 0.0 or h == 0.5:
        return 0.0
    # (1+u)^growth <= (1 + |t|)^growth-ish factor absorbed by u - |t| >= U - |t|
    base = U - at
    ratio = ((1.0 + U) / base) ** growth
    integral = ratio * base ** (e + 1.0) / -(e + 1.0)
    coef = abs(h - 1.5) * abs(special.rgamma(h - 0.5))
    return 2.0 * M * at * coef * integral
