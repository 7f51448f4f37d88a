"""Exact hat-function moments of the power kernel ``x**p * log(x)**l``.

For a path that is piecewise linear on the unit grid ``x = 0, 1, 2, ...``
the integral ``int x**p log(x)**l B(x) dx`` is ``sum_k B_k * A_k`` with
``A_k = int x**p log(x)**l phi_k(x) dx`` and ``phi_k`` the hat function of
node ``k``.  Each cell ``[m, m + 1]`` splits into a *rising* share for node
``m + 1`` and a *falling* share for node ``m``.

Cells close to the singularity at 0 use closed forms obtained by
differentiating ``x**q / q`` in ``q``; far cells use Gauss-Legendre, where the
integrand is analytic with its singularity at distance ``m`` from the cell.
"""

from functools import lru_cache
from math import comb, factorial

import numpy as np
from scipy import special

_CLOSED_FORM_CELLS = 64
_GL_NODES = 6


@lru_cache(maxsize=8)
def _gl_far(n_cells):
    """Log-abscissae and hat-weighted Gauss-Legendre weights for far cells."""
    y, w = np.polynomial.legendre.leggauss(_GL_NODES)
    y = 0.5 * (y + 1.0)
    w = 0.5 * w
    m = np.arange(_CLOSED_FORM_CELLS, max(n_cells, _CLOSED_FORM_CELLS), dtype=float)
    logx = np.log(m[:, None] + y[None, :])
    logx.setflags(write=False)
    return logx, w * y, w * (1.0 - y)


def _g_derivs(x, q, order):
    """``d^l/dq^l (x**q / q)`` for l = 0..order (``x >= 0``, ``q > 0``)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((order + 1,) + x.shape)
    pos = x > 0
    lx = np.log(x[pos])
    xq = np.exp(q * lx)
    for ell in range(order + 1):
        acc = np.zeros_like(lx)
        for r in range(ell + 1):
            acc += comb(ell, r) * lx ** (ell - r) * (-1) ** r * factorial(r) / q ** (r + 1)
        out[ell, pos] = xq * acc
    return out


def _power_cell(m, q):
    """``int_m^{m+1} x**(q-1) dx`` without cancellation for small ``q``."""
    out = np.empty_like(m)
    nz = m > 0
    mz = m[nz]
    out[nz] = np.exp(q * np.log(mz)) * _expm1_over(q, np.log1p(1.0 / mz))
    out[~nz] = 1.0 / q if q > 0 else np.inf
    return out


def _expm1_over(q, x):
    """``expm1(q x) / q`` with the ``q -> 0`` limit ``x``."""
    if q == 0.0:
        return x
    return np.expm1(q * x) / q


def _cell_integrals_closed(p, m, order):
    """``int_m^{m+1} x**p log(x)**l dx`` and the same with ``x**(p+1)``."""
    if order == 0:
        return _power_cell(m, p + 1.0)[None, :], _power_cell(m, p + 2.0)[None, :]
    lo, hi = m, m + 1.0
    j1 = _g_derivs(hi, p + 2.0, order) - _g_derivs(lo, p + 2.0, order)
    if p + 1.0 > 0:
        j0 = _g_derivs(hi, p + 1.0, order) - _g_derivs(lo, p + 1.0, order)
    else:
        j0 = np.empty_like(j1)
        # the cell touching 0 diverges for p <= -1; callers never use it
        nz = lo > 0
        j0[:, nz] = (_g_derivs(hi[nz], p + 1.0, order)
                     - _g_derivs(lo[nz], p + 1.0, order))
        j0[:, ~nz] = np.inf
    return j0, j1


def cell_shares(p, n_cells, order=0):
    """Rising and falling hat shares of cells ``0..n_cells-1``.

    Returns ``(rise, fall)`` of shape ``(order + 1, n_cells)`` with
    ``rise[l, m] = int_m^{m+1} x**p log(x)**l (x - m) dx`` (share of node
    ``m + 1``) and ``fall[l, m] = int_m^{m+1} x**p log(x)**l (m + 1 - x) dx``
    (share of node ``m``).  ``fall[:, 0]`` is infinite when ``p <= -1``.
    """
    rise = np.empty((order + 1, n_cells))
    fall = np.empty((order + 1, n_cells))
    n_close = min(n_cells, _CLOSED_FORM_CELLS)
    m = np.arange(n_close, dtype=float)
    j0, j1 = _cell_integrals_closed(p, m, order)
    rise[:, :n_close] = j1 - m * j0
    fall[:, :n_close] = (m + 1.0) * j0 - j1
    if n_close == 0:
        return rise, fall
    if n_cells > 0 and m.size and p + 1.0 <= 0:
        rise[:, 0] = j1[:, 0]
    if n_cells > _CLOSED_FORM_CELLS:
        logx, w_rise, w_fall = _gl_far(n_cells)
        logx = logx[: n_cells - _CLOSED_FORM_CELLS]
        xp = np.exp(p * logx)
        for ell in range(order + 1):
            f = xp if ell == 0 else xp * logx ** ell
            rise[ell, _CLOSED_FORM_CELLS:] = f @ w_rise
            fall[ell, _CLOSED_FORM_CELLS:] = f @ w_fall
    return rise, fall


def hat_weights(p, n_nodes, order=0):
    """Node weights ``A[l, k]`` for nodes ``k = 0..n_nodes-1`` plus the shares.

    ``A[:, k] = rise[:, k-1] + fall[:, k]`` uses the cells on both sides of
    node ``k``; the last node only gets its inner (rising) share through the
    returned ``rise`` array, which callers use for truncated ends.
    """
    rise, fall = cell_shares(p, n_nodes, order)
    A = fall.copy()
    A[:, 1:] += rise[:, :-1]
    return A, rise, fall


def rgamma_derivs(x, order):
    """Derivatives of ``1 / Gamma(x)`` up to ``order`` (at most 3)."""
    if order > 3:
        raise ValueError("derivatives of 1/Gamma implemented up to order 3")
    g = special.rgamma(x)
    out = [g]
    if order >= 1:
        psi = special.digamma(x)
        out.append(-psi * g)
    if order >= 2:
        psi1 = special.polygamma(1, x)
        out.append((psi ** 2 - psi1) * g)
    if order >= 3:
        psi2 = special.polygamma(2, x)
        out.append((-psi ** 3 + 3.0 * psi * psi1 - psi2) * g)
    return np.array(out)


def power_over_exponent_derivs(x, q, order):
    """``d^l/dq^l (x**q / q)`` for scalar ``x > 0`` (tail closures)."""
    return _g_derivs(np.array([x]), q, order)[:, 0]


def scale_moments(moments, step, p):
    """Rescale unit-grid moments to grid ``step``.

    ``int (s x)**p log(s x)**l phi(x) s dx = s**(p+1) sum_r C(l, r)
    log(s)**(l-r) M_r``.
    """
    order = moments.shape[0] - 1
    ls = np.log(step)
    out = np.empty_like(moments)
    for ell in range(order + 1):
        acc = np.zeros(moments.shape[1:])
        for r in range(ell + 1):
            acc = acc + comb(ell, r) * ls ** (ell - r) * moments[r]
        out[ell] = acc
    return out * step ** (p + 1.0)
