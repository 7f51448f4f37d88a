"""Catalogue of Hurst functions with known regularity, plus the chirp target.

Every :class:`HurstFunction` is an immutable callable ``t -> H(t)`` that maps
its declared support into ``(0, 1)``.  Sampled kinds interpolate linearly.
The attached :class:`RegularityMeta` records what is known in closed form
(frontier, exponents, graph dimension) and is what the verification suites
compare estimates against.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._validation import check_open_unit, check_positive
from .exceptions import DomainError, SupportError
from .noise import FbmPath, TimeGrid, gen_fbm

__all__ = [
    "KINDS",
    "RegularityMeta",
    "HurstFunction",
    "ChirpFunction",
    "build_hurst",
    "hurst_eval",
    "build_chirp",
    "parse_hurst_spec",
    "hurst_from_spec",
    "fbm_frontier",
]

KINDS = ("constant", "smooth-sine", "chirp-hurst", "fbm-sample", "weierstrass",
         "generic-samples", "step")

_INF = float("inf")


def fbm_frontier(a):
    """``s' -> (s' + a) ^ a``, the frontier of an fBm path of index ``a``."""
    a = float(a)

    def sigma(sp, t=None):
        return np.minimum(np.asarray(sp, dtype=float) + a, a)

    return sigma


def _smooth_frontier(sp, t=None):
    return np.full(np.shape(sp), _INF)


@dataclass(frozen=True)
class RegularityMeta:
    """Known regularity of a catalogue entry.

    ``frontier(s', t)``, ``pointwise_exp(t)`` and ``local_exp(t)`` are
    optional callables; ``smooth`` marks functions whose regularity exceeds
    every exponent considered (their exponents are reported as ``inf``).
    """

    frontier: Optional[Callable] = None
    pointwise_exp: Optional[Callable] = None
    local_exp: Optional[Callable] = None
    graph_boxdim: Optional[float] = None
    smooth: bool = False

    @classmethod
    def smooth_meta(cls):
        return cls(frontier=_smooth_frontier, pointwise_exp=lambda t: _INF,
                   local_exp=lambda t: _INF, graph_boxdim=1.0, smooth=True)


@dataclass(frozen=True, eq=False)
class HurstFunction:
    kind: str
    params: dict
    meta: RegularityMeta
    support: tuple = (-_INF, _INF)
    samples: Optional[tuple] = field(default=None, repr=False)
    _fn: Callable = field(default=None, repr=False)

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.support
        if np.any(t_arr < lo - 1e-12) or np.any(t_arr > hi + 1e-12):
            raise SupportError(f"t outside the support [{lo}, {hi}] of {self.kind}")
        out = self._fn(t_arr)
        return float(out) if np.ndim(out) == 0 else out

    def level_points(self, t, r_min, r_max):
        """Points ``s`` with ``H(s) = H(t)`` and ``r_min <= |s - t| <= r_max``
        (empty when the kind has no known level sequence at ``t``)."""
        if self.kind == "constant":
            return None  # every point matches
        if self.kind == "chirp-hurst" and t == self.params["center"]:
            c = self.params["center"]
            # sin(1/x^2) = 0 at x = 1/sqrt(n pi)
            n_lo = int(np.ceil(1.0 / (np.pi * r_max ** 2)))
            n_hi = int(np.floor(1.0 / (np.pi * r_min ** 2)))
            n = np.arange(max(n_lo, 1), n_hi + 1)
            return c + 1.0 / np.sqrt(n * np.pi)
        return np.array([])


def _rescale(values, lo, hi):
    vmin, vmax = float(np.min(values)), float(np.max(values))
    if vmax == vmin:
        raise DomainError("cannot rescale a constant sample")
    return lo + (hi - lo) * (values - vmin) / (vmax - vmin)


def _check_range(lo, hi):
    lo, hi = float(lo), float(hi)
    if not (0.0 < lo < hi < 1.0):
        raise DomainError(f"target range [{lo}, {hi}] must lie inside (0, 1)")
    return lo, hi


def _interp(grid_points, values):
    def fn(t):
        return np.interp(t, grid_points, values)
    return fn


def _weierstrass_terms(h_w, lam, tol=1e-9):
    # tail sum_{n > N} lam^(-n h) <= tol guarantees the doubling check
    r = lam ** (-h_w)
    n = int(np.ceil(np.log(tol * (1.0 - r)) / np.log(r)))
    return max(n, 1)


def weierstrass_raw(t, h_w, lam, n_terms):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for n in range(n_terms + 1):
        out += lam ** (-n * h_w) * np.cos(lam ** n * t)
    return out


def build_hurst(kind, params=None, noise=None):
    """Construct a catalogue Hurst function; see :data:`KINDS`."""
    params = dict(params or {})
    if kind == "constant":
        h = check_open_unit(params.get("h", 0.5))
        return HurstFunction(kind, {"h": h}, RegularityMeta.smooth_meta(),
                             _fn=lambda t: np.full(np.shape(t), h) if np.ndim(t) else h)

    if kind == "smooth-sine":
        center = float(params.get("center", 0.5))
        amp = float(params.get("amp", 0.1))
        freq = float(params.get("freq", 1.0))
        phase = float(params.get("phase", 0.0))
        _check_range(center - abs(amp), center + abs(amp))
        p = {"center": center, "amp": amp, "freq": freq, "phase": phase}
        return HurstFunction(kind, p, RegularityMeta.smooth_meta(),
                             _fn=lambda t: center + amp * np.sin(2 * np.pi * freq * t + phase))

    if kind == "chirp-hurst":
        c = float(params.get("center", 0.0))
        r = float(params.get("radius", 0.2))
        check_positive(r, "radius")
        if 0.75 - r <= 0 or 0.75 + r >= 1:
            raise DomainError("chirp-hurst radius must keep 3/4 +/- radius inside (0, 1)")

        def fn(t):
            x = np.asarray(t - c, dtype=float)
            safe = np.where(x == 0, 1.0, x)
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                phase = 1.0 / safe ** 2
                return 0.75 + np.where((x == 0) | ~np.isfinite(phase), 0.0,
                                       x * np.sin(phase))

        def frontier(sp, t=c):
            sp = np.asarray(sp, dtype=float)
            return (sp + 1.0) / 3.0 if t == c else np.full(sp.shape, _INF)

        meta = RegularityMeta(
            frontier=frontier,
            pointwise_exp=lambda t: 1.0 if t == c else _INF,
            local_exp=lambda t: 1.0 / 3.0 if t == c else _INF,
            graph_boxdim=None, smooth=False)
        return HurstFunction(kind, {"center": c, "radius": r}, meta, (c - r, c + r), _fn=fn)

    if kind == "fbm-sample":
        if noise is None or not isinstance(noise, FbmPath):
            raise DomainError("fbm-sample needs an FbmPath as noise")
        a = float(params.get("a", noise.hurst))
        if abs(a - noise.hurst) > 1e-12:
            raise DomainError("parameter a must equal the Hurst index of the noise")
        lo, hi = _check_range(params.get("lo", 0.5), params.get("hi", 0.75))
        shift = float(params.get("shift", 0.0))
        # H(t) is the rescaled sample read at t - shift
        pts = noise.grid.points + shift
        vals = _rescale(noise.values, lo, hi)
        meta = RegularityMeta(frontier=fbm_frontier(a), pointwise_exp=lambda t: a,
                              local_exp=lambda t: a, graph_boxdim=2.0 - a)
        p = {"a": a, "lo": lo, "hi": hi, "seed": noise.seed, "shift": shift}
        return HurstFunction(kind, p, meta, (pts[0], pts[-1]), (noise.grid, vals),
                             _fn=_interp(pts, vals))

    if kind == "weierstrass":
        h_w = check_open_unit(params.get("h_w", 0.4), "h_w")
        lam = float(params.get("lam", 2.0))
        if lam <= 1:
            raise DomainError("weierstrass needs lam > 1")
        lo, hi = _check_range(params.get("lo", 0.3), params.get("hi", 0.7))
        n_terms = int(params.get("n_terms", _weierstrass_terms(h_w, lam)))
        bound = 1.0 / (1.0 - lam ** (-h_w))
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)

        def fn(t):
            return mid + half * weierstrass_raw(t, h_w, lam, n_terms) / bound

        meta = RegularityMeta(frontier=fbm_frontier(h_w), pointwise_exp=lambda t: h_w,
                              local_exp=lambda t: h_w, graph_boxdim=2.0 - h_w)
        p = {"h_w": h_w, "lam": lam, "lo": lo, "hi": hi, "n_terms": n_terms}
        return HurstFunction(kind, p, meta, _fn=fn)

    if kind == "generic-samples":
        grid = params.get("grid")
        vals = np.asarray(params.get("values"), dtype=float)
        if not isinstance(grid, TimeGrid) or vals.shape != (grid.n_points,):
            raise DomainError("generic-samples needs a TimeGrid and one value per node")
        if np.any(vals <= 0) or np.any(vals >= 1):
            raise DomainError("generic samples must lie inside (0, 1)")
        pts = grid.points
        meta = params.get("meta") or RegularityMeta()
        return HurstFunction(kind, {}, meta, (pts[0], pts[-1]), (grid, vals),
                             _fn=_interp(pts, vals))

    if kind == "step":
        h0 = check_open_unit(params.get("h0", 0.5), "h0")
        jump = float(params.get("jump", 0.1))
        t0 = float(params.get("t0", 0.0))
        check_open_unit(h0 + jump, "h0 + jump")

        def fn(t):
            return np.where(np.asarray(t) < t0, h0, h0 + jump) + 0.0

        p = {"h0": h0, "jump": jump, "t0": t0}
        return HurstFunction(kind, p, RegularityMeta(), _fn=fn)

    raise DomainError(f"unknown Hurst kind {kind!r}; choose from {', '.join(KINDS)}")


def hurst_eval(H, t):
    """``H(t)`` as a float (raises outside the support)."""
    return float(H(float(t)))


@dataclass(frozen=True)
class ChirpFunction:
    """``f(x) = |x|**alpha * sin(|x|**-beta)`` with ``f(0) = 0``."""

    alpha: float
    beta: float

    def __call__(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        safe = np.where(x == 0, 1.0, x)
        with np.errstate(over="ignore", invalid="ignore"):
            phase = safe ** -self.beta
            # |f| <= |x|^alpha, which underflows wherever the phase overflows
            out = np.where((x == 0) | ~np.isfinite(phase), 0.0,
                           safe ** self.alpha * np.sin(phase))
        return float(out) if out.ndim == 0 else out

    def frontier(self, sp):
        return (np.asarray(sp, dtype=float) + self.alpha) / (1.0 + self.beta)

    @property
    def pointwise_exp(self):
        return self.alpha

    @property
    def local_exp(self):
        return self.alpha / (1.0 + self.beta)

    @property
    def boxdim_at_zero(self):
        return 2.0 - min((1.0 + self.alpha) / (1.0 + self.beta), 1.0)

    @property
    def hausdim(self):
        return 1.0

    def sample(self, grid):
        return self(grid.points)


def build_chirp(alpha, beta):
    return ChirpFunction(check_positive(alpha, "alpha"), check_positive(beta, "beta"))


_ALIASES = {"const": "constant", "fbm": "fbm-sample", "sine": "smooth-sine",
            "chirp": "chirp-hurst", "weier": "weierstrass"}


def parse_hurst_spec(spec):
    """``"fbm:a=0.3,lo=0.5,hi=0.9,seed=7"`` -> ``("fbm-sample", {...})``."""
    if not isinstance(spec, str) or not spec.strip():
        raise DomainError("empty Hurst function string")
    name, _, rest = spec.strip().partition(":")
    kind = _ALIASES.get(name.strip(), name.strip())
    if kind not in KINDS:
        raise DomainError(f"unknown Hurst kind {name!r}")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise DomainError(f"malformed Hurst parameter {item!r}")
        key = key.strip()
        try:
            params[key] = int(val) if key in ("seed", "n_terms") else float(val)
        except ValueError as exc:
            raise DomainError(f"bad value for {key!r}: {val!r}") from exc
    return kind, params


def hurst_from_spec(spec, grid=None):
    """Build from a spec string; fbm kinds draw their sample on ``grid``."""
    kind, params = parse_hurst_spec(spec)
    noise = None
    if kind == "fbm-sample":
        if grid is None:
            raise DomainError("fbm-sample specs need a grid for the backing sample")
        noise = gen_fbm(grid, params.get("a", 0.5), int(params.pop("seed", 0)))
    return build_hurst(kind, params, noise)
