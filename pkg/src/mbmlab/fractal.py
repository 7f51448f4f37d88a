"""Box counting on sampled graphs and the dimension formulas they check.

Counts are column based: the window is cut into columns of width ``w`` and
each column contributes ``max(1, ceil(osc / delta))`` cells, where ``osc`` is
the range of the samples in the column (both edge samples included).  For
euclidean counts ``w = delta``; for parabolic counts under the metric
``max(|u - v|**h, |x - y|)`` the column width is ``delta**(1/h)``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_open_unit, check_positive
from .exceptions import DomainError, EstimationError, ScaleError
from .regularity import MIN_SCALES, as_sampled

__all__ = [
    "ScaleTable",
    "DimEstimate",
    "box_count",
    "pbox_count",
    "scale_table",
    "est_boxdim_local",
    "est_pboxdim_local",
    "level_set_count",
    "level_set_boxdim",
    "predict_boxdim_graph",
    "predict_hausdim_graph",
    "predict_image_dim",
    "parabolic_transfer_bounds",
    "dim_bounds_from_frontier",
]

DEFAULT_SCALES = (4, 10)
DEFAULT_RHO = 0.1


@dataclass(frozen=True, eq=False)
class ScaleTable:
    deltas: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.deltas) >= 0):
            raise ScaleError("deltas must be strictly decreasing")
        if np.any(self.counts < 1):
            raise ScaleError("box counts must be positive")


@dataclass(frozen=True)
class DimEstimate:
    value: float
    lower: float
    upper: float
    fit_r2: float
    table: ScaleTable = field(default=None, repr=False, compare=False)
    empty: bool = False


def _window_edges(fs, window, width):
    a, b = map(float, window)
    if not b > a:
        raise DomainError(f"window must be an interval with a < b, got {window}")
    n = fs.values.size
    i_a, i_b = fs.index(a), fs.index(b)
    if i_a < 0 or i_b >= n or abs(fs.x0 + i_a * fs.step - a) > 0.5 * fs.step + 1e-12 * abs(a):
        raise DomainError("window leaves the sampled support")
    if width < 2.0 * fs.step * (1 - 1e-9):
        raise ScaleError(f"column width {width:g} is below twice the grid step {fs.step:g}")
    n_cols = int(np.ceil((b - a) / width - 1e-9))
    cuts = a + width * np.arange(n_cols + 1)
    cuts[-1] = b
    edges = np.clip(np.rint((cuts - fs.x0) / fs.step).astype(np.int64), i_a, i_b)
    return edges


def _column_ranges(fs, edges):
    """Min and max of the samples on ``[edges[c], edges[c+1]]`` per column."""
    v = fs.values[: edges[-1] + 1]
    lo, hi = edges[:-1], edges[1:]
    vmax = np.maximum.reduceat(v, lo)[: lo.size] if lo.size else np.empty(0)
    vmin = np.minimum.reduceat(v, lo)[: lo.size] if lo.size else np.empty(0)
    # reduceat stops before the next start; the shared right edge is added here
    vmax = np.maximum(vmax, v[hi])
    vmin = np.minimum(vmin, v[hi])
    return vmin, vmax


def _count(fs, window, width, delta):
    edges = _window_edges(fs, window, width)
    vmin, vmax = _column_ranges(fs, edges)
    cells = np.ceil((vmax - vmin) / delta - 1e-12)
    return int(np.maximum(cells, 1).sum())


def box_count(f, window, delta, grid=None):
    """Number of ``delta``-cells over the graph of ``f`` on ``window``."""
    fs = as_sampled(f, grid)
    delta = check_positive(delta, "delta")
    return _count(fs, window, delta, delta)


def pbox_count(f, window, h_metric, delta, grid=None):
    """Parabolic count: columns of width ``delta**(1/h_metric)``, height ``delta``."""
    fs = as_sampled(f, grid)
    h = check_open_unit(h_metric, "h_metric")
    delta = check_positive(delta, "delta")
    return _count(fs, window, delta ** (1.0 / h), delta)


def _slope_envelope(x, y):
    from .regularity import _ls_slope

    value, _, r2 = _ls_slope(x, y)
    win = [np.polyfit(x[k:k + 3], y[k:k + 3], 1)[0] for k in range(x.size - 2)]
    lower = min(min(win), value) if win else value
    upper = max(max(win), value) if win else value
    return value, lower, upper, r2


def _scale_exps(scales):
    k_lo, k_hi = scales
    ks = np.arange(int(k_lo), int(k_hi) + 1)
    if ks.size < MIN_SCALES:
        raise EstimationError(f"only {ks.size} dyadic scales given (need {MIN_SCALES})",
                              n_scales=int(ks.size))
    return ks


def scale_table(f, window, scales=DEFAULT_SCALES, h_metric=None, grid=None):
    """Counts on columns of width ``2^-k`` for ``k`` in ``scales``.

    For parabolic counts (``h_metric`` given) the cell height is
    ``delta = (2^-k)**h_metric``; ``deltas`` always holds the cell heights.
    """
    fs = as_sampled(f, grid)
    ks = _scale_exps(scales)
    widths = 2.0 ** -ks.astype(float)
    if h_metric is None:
        deltas = widths
    else:
        deltas = widths ** check_open_unit(h_metric, "h_metric")
    counts = np.array([_count(fs, window, w, d) for w, d in zip(widths, deltas)])
    return ScaleTable(deltas, counts)


def _estimate(table):
    x = -np.log(table.deltas)
    y = np.log(table.counts.astype(float))
    value, lower, upper, r2 = _slope_envelope(x, y)
    return DimEstimate(value, lower, upper, r2, table)


def _local_window(t, rho, scales):
    """``[t - rho, t + rho]`` with the width rounded to whole coarsest columns,
    so a partial column does not bend the coarse end of the fit."""
    rho = check_positive(rho, "rho")
    w = 2.0 ** -int(scales[0])
    half = 0.5 * w * max(1, round(2.0 * rho / w))
    return (t - half, t + half)


def est_boxdim_local(f, t, rho=DEFAULT_RHO, scales=DEFAULT_SCALES, grid=None):
    """Box dimension of the graph over ``[t - rho, t + rho]`` (width rounded
    to a whole number of coarsest columns).

    ``value`` is the least-squares slope of ``log N`` against ``-log delta``;
    ``lower``/``upper`` are the extreme slopes over sliding three-scale
    windows (widened to contain ``value``).
    """
    fs = as_sampled(f, grid)
    return _estimate(scale_table(fs, _local_window(t, rho, scales), scales))


def est_pboxdim_local(f, t, h_metric, rho=DEFAULT_RHO, scales=DEFAULT_SCALES, grid=None):
    """Parabolic analogue of :func:`est_boxdim_local`; ``scales`` index the
    column widths ``2^-k``."""
    fs = as_sampled(f, grid)
    return _estimate(scale_table(fs, _local_window(t, rho, scales), scales, h_metric))


def level_set_count(f, level, window, delta, grid=None):
    """Number of width-``delta`` columns on which the samples reach ``level``."""
    fs = as_sampled(f, grid)
    edges = _window_edges(fs, window, check_positive(delta, "delta"))
    vmin, vmax = _column_ranges(fs, edges)
    return int(np.count_nonzero((vmin <= level) & (level <= vmax)))


def level_set_boxdim(f, level, window, scales=DEFAULT_SCALES, grid=None):
    """Box dimension of ``{u in window : f(u) = level}`` from crossing columns.

    A level never reached on the window gives an empty-set estimate
    (``value = 0``, ``empty = True``).
    """
    fs = as_sampled(f, grid)
    ks = _scale_exps(scales)
    deltas = 2.0 ** -ks.astype(float)
    counts = np.array([level_set_count(fs, level, window, d) for d in deltas])
    if np.all(counts == 0):
        return DimEstimate(0.0, 0.0, 0.0, 1.0, None, empty=True)
    counts = np.maximum(counts, 1)
    return _estimate(ScaleTable(deltas, counts))


# ---------------------------------------------------------------- theory


def predict_boxdim_graph(H_t, dim_grH):
    """Local box dimension of an mBm graph: ``max(2 - H_t, dim_B Gr(H))``."""
    if not 1.0 <= dim_grH <= 2.0:
        raise DomainError(f"graph dimension of H must lie in [1, 2], got {dim_grH}")
    return max(2.0 - float(H_t), float(dim_grH))


def predict_hausdim_graph(H_t, pdim_grH):
    """``1 + H_t (pdim - 1)`` with ``pdim`` the parabolic dimension of Gr(H)."""
    if pdim_grH < 1.0:
        raise DomainError(f"parabolic dimension must be >= 1, got {pdim_grH}")
    return 1.0 + float(H_t) * (float(pdim_grH) - 1.0)


def predict_image_dim(pdim_grHF):
    if pdim_grHF < 0:
        raise DomainError("parabolic dimension must be nonnegative")
    return min(1.0, float(pdim_grHF))


def parabolic_transfer_bounds(d2, H1, H2):
    """Bounds on the ``rho_H1`` dimension of a set whose ``rho_H2`` dimension
    is ``d2``, for ``H1 > H2 > 0``: ``d2 + 1/H1 - 1/H2 <= d1 <= 1 + (H2/H1)(d2 - 1)``."""
    H1, H2, d2 = float(H1), float(H2), float(d2)
    if not H1 > H2 > 0:
        raise DomainError(f"need H1 > H2 > 0, got H1={H1}, H2={H2}")
    return d2 + 1.0 / H1 - 1.0 / H2, 1.0 + (H2 / H1) * (d2 - 1.0)


def dim_bounds_from_frontier(sigma_at_1, sigma_at_inf):
    """Upper bounds ``2 - (sigma(1) ^ 1)`` (box) and ``2 - (sigma(inf) ^ 1)``
    (Hausdorff) on the local graph dimension."""
    return 2.0 - min(float(sigma_at_1), 1.0), 2.0 - min(float(sigma_at_inf), 1.0)
