"""Command-line batch runner.

``mbmlab <command> [--config cfg.json] [--seed N] [--out DIR] [--workers N]``
runs one pipeline and writes ``<command>.csv`` and ``<command>.json`` into
``DIR``.  ``mbmlab verify --suite NAME`` (or ``--suite all``) runs the
registered verification suites.  Flags override keys of the config file.

Exit codes: 0 success (all checks pass), 1 a check failed, 2 usage or
configuration error.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import verify
from .exceptions import ConfigError, MbmLabError
from .field import QuadratureConfig, mbm_sample
from .fractal import (est_boxdim_local, est_pboxdim_local, level_set_boxdim,
                      predict_boxdim_graph)
from .gauss import cond_var, empirical_cov, exact_cov, mbm_ensemble, mbm_weights
from .hurst import build_chirp, fbm_frontier, hurst_from_spec, weierstrass_raw
from .noise import TimeGrid, derive_seed, gen_brownian, gen_fbm
from .parallel import ordered_map, task_seeds
from .regularity import (Sampled, est_exponents, est_frontier, predict_frontier_mbm,
                         predict_pointwise_mbm)
from .report import ReportRecord, write_csv

__all__ = ["COMMANDS", "DEFAULTS", "main", "run_experiment", "parse_target"]

_TARGET = {"target": "chirp:alpha=0.5,beta=1", "hurst": "constant:h=0.5", "t_min": -1.0,
           "t_max": 1.0, "step_exp": 14, "a_plus": 1.0, "a_minus": 0.0, "truncation": None,
           "n_lattice": 20}

DEFAULTS = {
    "simulate": {"hurst": "constant:h=0.5", "a_plus": 1.0, "a_minus": 0.0, "t_min": -1.0,
                 "t_max": 1.0, "step_exp": 10, "truncation": None, "method": "auto",
                 "n_lattice": 20, "n_paths": 1},
    "exponents": {**_TARGET, "times": [0.0], "scales": None, "rho": 0.5, "cap": 1.0},
    "frontier": {**_TARGET, "step_exp": 17, "t": 0.0, "scales": None, "rho": 0.5, "cap": 1.0,
                 "check_range": [-0.5, 1.0], "tol": 0.1},
    "boxdim": {**_TARGET, "target": "fbm:a=0.3", "step_exp": 16, "times": [0.0],
               "scales": [4, 10], "rho": 0.1, "tol": 0.15},
    "pboxdim": {**_TARGET, "target": "fbm:a=0.3", "step_exp": 16, "times": [0.0],
                "h_metric": 0.6, "scales": [4, 10], "rho": 0.1},
    "levelset": {**_TARGET, "target": "brownian", "level": 0.0, "window": [0.0, 1.0],
                 "scales": [4, 10]},
    "gauss": {"hurst": "constant:h=0.5", "mode": "cov", "times": [0.5, 1.0], "t": 1.0,
              "radii_exps": [3, 4, 5, 6, 7, 8], "n_seeds": 500, "step_exp": 12,
              "a_plus": 1.0, "a_minus": 0.0},
}
COMMANDS = tuple(DEFAULTS) + ("verify",)
_COMMON = ("seed", "out", "workers", "command")


# ---------------------------------------------------------------- config


def effective_config(command, file_cfg=None, overrides=None):
    """Defaults, then the config file, then command-line flags."""
    if command not in DEFAULTS:
        raise ConfigError(f"unknown pipeline {command!r}; choose from {', '.join(COMMANDS)}",
                          key="command")
    cfg = dict(DEFAULTS[command])
    cfg.update({"seed": 0, "out": ".", "workers": 1})
    for src in (file_cfg or {}), (overrides or {}):
        for k, v in src.items():
            if k not in cfg and k not in _COMMON:
                raise ConfigError(f"unknown config key {k!r} for {command}", key=k)
            if v is not None or k not in _COMMON:
                cfg[k] = v
    cfg["command"] = command
    return cfg


def _grid(cfg):
    step = 2.0 ** -int(cfg["step_exp"])
    return TimeGrid(float(cfg["t_min"]), float(cfg["t_max"]), step)


def _hurst(spec, grid):
    # fbm-sample Hurst functions draw their backing sample on the target grid
    return hurst_from_spec(spec, grid)


def _mbm_path(cfg, grid, seed):
    H = _hurst(cfg["hurst"], grid)
    tmax = max(abs(grid.t_min), abs(grid.t_max))
    U = float(cfg["truncation"]) if cfg["truncation"] is not None else 20.0 + tmax
    bm = gen_brownian(TimeGrid.symmetric(U, grid.step), seed)
    q = QuadratureConfig(truncation=U)
    return H, mbm_sample(grid, H, cfg["a_plus"], cfg["a_minus"], bm, q,
                         cfg.get("method", "auto"), cfg["n_lattice"])


def parse_target(spec):
    """``"fbm:a=0.3"`` -> ``("fbm", {"a": 0.3})``."""
    if not isinstance(spec, str) or not spec.strip():
        raise ConfigError("empty target string", key="target")
    name, _, rest = spec.strip().partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        k, eq, v = item.partition("=")
        if not eq:
            raise ConfigError(f"malformed target parameter {item!r}", key="target")
        try:
            params[k.strip()] = float(v)
        except ValueError as exc:
            raise ConfigError(f"bad target value {item!r}", key="target") from exc
    known = {"chirp": ("alpha", "beta"), "fbm": ("a",), "brownian": (), "line": ("slope",),
             "weierstrass": ("h_w", "lam"), "mbm": ()}
    if name not in known:
        raise ConfigError(f"unknown target {name!r}; choose from {', '.join(known)}",
                          key="target")
    bad = set(params) - set(known[name])
    if bad:
        raise ConfigError(f"unknown parameter(s) {sorted(bad)} for target {name}", key="target")
    return name, params


class _Target:
    """A sampled target together with whatever regularity is known for it."""

    def __init__(self, cfg, seed):
        name, p = parse_target(cfg["target"])
        grid = _grid(cfg)
        x = grid.points
        self.name, self.hurst = name, None
        inf = np.inf

        def smooth(sp, t):
            return np.full(np.shape(sp), inf)

        if name == "chirp":
            ch = build_chirp(p.get("alpha", 0.5), p.get("beta", 1.0))
            vals = ch(x)
            self._frontier = lambda sp, t: ch.frontier(sp) if t == 0 else smooth(sp, t)
            self._exps = lambda t: (ch.pointwise_exp, ch.local_exp) if t == 0 else (inf, inf)
            self._box = lambda t: ch.boxdim_at_zero if t == 0 else 1.0
        elif name in ("fbm", "brownian"):
            a = 0.5 if name == "brownian" else float(p.get("a", 0.5))
            vals = (gen_brownian(grid, seed) if name == "brownian"
                    else gen_fbm(grid, a, seed)).values
            self._frontier = lambda sp, t: fbm_frontier(a)(sp)
            self._exps = lambda t: (a, a)
            self._box = lambda t: 2.0 - a
        elif name == "weierstrass":
            h_w, lam = float(p.get("h_w", 0.4)), float(p.get("lam", 2.0))
            vals = weierstrass_raw(x, h_w, lam, 80)
            self._frontier = lambda sp, t: fbm_frontier(h_w)(sp)
            self._exps = lambda t: (h_w, h_w)
            self._box = lambda t: 2.0 - h_w
        elif name == "line":
            vals = float(p.get("slope", 1.0)) * x
            self._frontier = smooth
            self._exps = lambda t: (inf, inf)
            self._box = lambda t: 1.0
        else:
            H, path = _mbm_path(cfg, grid, seed)
            vals = path.values
            self.hurst = H

            def fr(sp, t):
                return predict_frontier_mbm(H(t), H.meta.frontier, 1, sp)[0].sigma

            def exps(t):
                pw = predict_pointwise_mbm(H(t), H.meta.pointwise_exp(t), 1)
                return pw, min(float(H(t)), float(H.meta.local_exp(t)))

            self._frontier = fr
            self._exps = exps
            self._box = lambda t: predict_boxdim_graph(
                H(t), H.meta.graph_boxdim if H.meta.graph_boxdim is not None else 1.0)
        self.sampled = Sampled(float(x[0]), grid.step, np.asarray(vals, dtype=float))

    def frontier(self, sp, t, cap=1.0):
        return np.minimum(np.asarray(self._frontier(np.asarray(sp, dtype=float), t),
                                     dtype=float), cap)

    def exponents(self, t, cap=1.0):
        pw, loc = self._exps(t)
        return min(float(pw), cap), min(float(loc), cap)

    def boxdim(self, t):
        return float(self._box(t))


def _scales(cfg):
    s = cfg.get("scales")
    return None if s is None else (int(s[0]), int(s[1]))


# ---------------------------------------------------------------- pipelines


def _simulate(cfg, rec):
    grid = _grid(cfg)
    seeds = task_seeds(cfg["seed"], int(cfg["n_paths"]))
    cols, header = [grid.points], ["t"]
    for k, sd in enumerate(seeds):
        H, path = _mbm_path(cfg, grid, sd)
        if k == 0:
            cols.append(np.asarray(H(grid.points), dtype=float) * np.ones(grid.n_points))
            header.append("H")
        cols.append(path.values)
        header.append(f"X_{k}")
    rec.notes["n_points"] = grid.n_points
    rec.add("all samples finite", 1.0, float(all(np.all(np.isfinite(c)) for c in cols)), 0.0)
    return header, cols


def _exponents_task(args):
    cfg, t = args
    tgt = _Target(cfg, derive_seed(cfg["seed"], 0))
    ex = est_exponents(tgt.sampled, t, _scales(cfg), cfg["rho"], cfg["cap"])
    return (ex.pointwise, ex.local) + tgt.exponents(t, cfg["cap"])


def _exponents(cfg, rec):
    times = [float(t) for t in cfg["times"]]
    res = ordered_map(_exponents_task, [(cfg, t) for t in times], cfg["workers"])
    pw = np.array([r[0] for r in res])
    loc = np.array([r[1] for r in res])
    pw_th = np.array([r[2] for r in res])
    loc_th = np.array([r[3] for r in res])
    for t, p, lo, p_th, lo_th in zip(times, pw, loc, pw_th, loc_th):
        rec.add(f"t={t}: local <= pointwise", p, lo, 1e-9, "le")
        rec.add(f"t={t}: pointwise vs known value", p_th, p, 0.1)
        rec.add(f"t={t}: local vs known value", lo_th, lo, 0.1)
    return (["t", "pointwise", "local", "pointwise_theory", "local_theory"],
            [np.array(times), pw, loc, pw_th, loc_th])


def _frontier(cfg, rec):
    tgt = _Target(cfg, derive_seed(cfg["seed"], 0))
    t = float(cfg["t"])
    fr = est_frontier(tgt.sampled, t, scales=_scales(cfg), rho=cfg["rho"], cap=cfg["cap"])
    th = tgt.frontier(fr.sprime, t, cfg["cap"])
    lo, hi = map(float, cfg["check_range"])
    ok = np.isfinite(th) & (fr.sprime >= lo - 1e-12) & (fr.sprime <= hi + 1e-12)
    if ok.any():
        rec.add(f"max |sigma_hat - sigma_theory| on s' in [{lo}, {hi}]", 0.0,
                float(np.max(np.abs(fr.sigma - th)[ok])), cfg["tol"])
    rec.add("sigma_hat nondecreasing", 1.0, float(fr.is_nondecreasing()), 0.0)
    rec.add("sigma_hat concave", 1.0, float(fr.is_concave()), 0.0)
    return ["s_prime", "sigma_hat", "sigma_theory"], [fr.sprime, fr.sigma, th]


def _boxdim(cfg, rec, parabolic=False):
    tgt = _Target(cfg, derive_seed(cfg["seed"], 0))
    rows = []
    for t in cfg["times"]:
        t = float(t)
        if parabolic:
            h = float(cfg["h_metric"])
            d = est_pboxdim_local(tgt.sampled, t, h, cfg["rho"], _scales(cfg))
            theory = np.nan
            rec.add(f"t={t}: parabolic estimate in [0, 1 + 1/h]", (0.0, 1.0 + 1.0 / h), d.value,
                    0.0, "in")
        else:
            d = est_boxdim_local(tgt.sampled, t, cfg["rho"], _scales(cfg))
            theory = tgt.boxdim(t)
            rec.add(f"t={t}: box dimension vs known value", theory, d.value, cfg["tol"])
        rows.append((t, d.value, d.lower, d.upper, theory, d.fit_r2))
    arr = np.array(rows, dtype=float)
    header = ["t", "value", "lower", "upper", "theory", "fit_r2"]
    return header, [arr[:, k] for k in range(arr.shape[1])]


def _levelset(cfg, rec):
    tgt = _Target(cfg, derive_seed(cfg["seed"], 0))
    a, b = map(float, cfg["window"])
    lv = float(cfg["level"])
    d = level_set_boxdim(tgt.sampled, lv, (a, b), _scales(cfg))
    rec.notes["dimension"] = {"value": d.value, "lower": d.lower, "upper": d.upper,
                              "empty": d.empty}
    if d.table is None:
        return ["delta", "count"], [np.array([]), np.array([])]
    rec.add("level-set dimension in [0, 1]", (0.0, 1.0), d.value, 0.0, "in")
    return ["delta", "count"], [d.table.deltas, d.table.counts.astype(float)]


def _gauss(cfg, rec):
    spec = cfg["hurst"]
    step = 2.0 ** -int(cfg["step_exp"])
    seeds = task_seeds(cfg["seed"], int(cfg["n_seeds"]))
    if cfg["mode"] == "lnd":
        from .gauss import lnd_slope

        H = _hurst(spec, TimeGrid.symmetric(abs(float(cfg["t"])) + 1.0, step))
        radii = 2.0 ** -np.asarray(cfg["radii_exps"], dtype=float)
        r = lnd_slope(H, float(cfg["t"]), radii, seeds, step, cfg["a_plus"], cfg["a_minus"],
                      exact=True)
        rec.notes["slope"] = r.slope
        rec.add("conditional-variance slope at most 2H(t)", 2 * float(H(cfg["t"])), r.slope,
                0.3, "le")
        return (["radius", "point", "cond_var", "cond_var_exact"],
                [r.radii, r.points, r.cond_vars, r.exact_cond_vars])
    if cfg["mode"] != "cov":
        raise ConfigError(f"gauss mode must be 'cov' or 'lnd', got {cfg['mode']!r}", key="mode")
    times = np.asarray(cfg["times"], dtype=float)
    U = 20.0 + float(np.max(np.abs(times)))
    grid = TimeGrid.symmetric(U + 1.0, step)
    H = _hurst(spec, TimeGrid.symmetric(float(np.max(np.abs(times))) + 1.0, step))
    wts = mbm_weights(times, H, cfg["a_plus"], cfg["a_minus"], grid,
                      QuadratureConfig(truncation=U))
    X = mbm_ensemble(wts, grid, seeds)
    C = empirical_cov(X, times)
    E = exact_cov(wts, grid)
    ii, jj = np.triu_indices(times.size)
    emp = C.entries[ii, jj]
    ex = E[ii, jj]
    rec.notes["min_eig_raw"] = C.min_eig_raw
    rec.notes["cond_var_last_given_rest"] = (
        cond_var(C, times.size - 1, list(range(times.size - 1))) if times.size > 1 else None)
    rel = float(np.max(np.abs(emp - ex)) / np.max(np.abs(ex)))
    rec.add("max |empirical - exact| / max |exact|", 0.0, rel, 5.0 / np.sqrt(len(seeds)))
    return (["t_i", "t_j", "cov_empirical", "cov_exact"], [times[ii], times[jj], emp, ex])


_PIPELINES = {
    "simulate": _simulate,
    "exponents": _exponents,
    "frontier": _frontier,
    "boxdim": _boxdim,
    "pboxdim": lambda cfg, rec: _boxdim(cfg, rec, parabolic=True),
    "levelset": _levelset,
    "gauss": _gauss,
}


def run_experiment(cfg):
    """Run ``cfg["command"]`` and write ``<command>.csv`` / ``<command>.json``
    into ``cfg["out"]``.  Returns the report record."""
    command = cfg.get("command")
    if command not in _PIPELINES:
        raise ConfigError(f"unknown pipeline {command!r}; choose from {', '.join(_PIPELINES)}",
                          key="command")
    full = effective_config(command, {k: v for k, v in cfg.items() if k != "command"})
    rec = ReportRecord(command, config=full)
    header, cols = _PIPELINES[command](full, rec)
    out = full["out"]
    os.makedirs(out, exist_ok=True)
    write_csv(os.path.join(out, f"{command}.csv"), header, cols)
    with open(os.path.join(out, f"{command}.json"), "w", encoding="utf-8") as fh:
        fh.write(rec.to_json(with_runtime=False))
    return rec


# ---------------------------------------------------------------- entry point


def _parser():
    p = argparse.ArgumentParser(prog="mbmlab", description="mBm experiment runner")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON file with pipeline keys")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int)
    p.add_argument("--suite", help="verification suite name, or 'all'")
    return p


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}", key="config") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object", key="config")
    return data


def _verify(args, file_cfg):
    name = args.suite or file_cfg.get("suite")
    if not name:
        raise ConfigError(f"verify needs --suite; available: {', '.join(verify.SUITES)}",
                          key="suite")
    names = list(verify.SUITES) if name == "all" else [name]
    for n in names:
        if n not in verify.SUITES:
            raise ConfigError(f"unknown suite {n!r}; available: {', '.join(verify.SUITES)}",
                              key="suite")
    seed = args.seed if args.seed is not None else int(file_cfg.get("seed", 0))
    workers = args.workers if args.workers is not None else int(file_cfg.get("workers", 1))
    out = args.out or file_cfg.get("out")
    ok = True
    for n in names:
        rec = verify.run_suite(n, seed=seed, workers=workers)
        print(rec.summary(), flush=True)
        ok &= rec.passed
        if out:
            os.makedirs(out, exist_ok=True)
            with open(os.path.join(out, f"verify-{n}.json"), "w", encoding="utf-8") as fh:
                fh.write(rec.to_json())
    return 0 if ok else 1


def main(argv=None):
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        file_cfg = _load_config(args.config)
        if args.command == "verify":
            return _verify(args, file_cfg)
        if args.suite is not None:
            raise ConfigError("--suite only applies to verify", key="suite")
        flags = {"seed": args.seed, "out": args.out, "workers": args.workers}
        cfg = effective_config(args.command, file_cfg, flags)
        rec = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error ({exc.key}): {exc}", file=sys.stderr)
        return 2
    except MbmLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(rec.summary())
    return 0 if rec.passed or not rec.rows else 1


if __name__ == "__main__":
    sys.exit(main())
