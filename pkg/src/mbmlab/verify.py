"""Named verification suites, one per acceptance criterion.

Each suite is a function ``suite(seed=0, workers=1) -> ReportRecord`` whose
rows carry predicted value, estimate, tolerance and pass flag.  Registered
defaults (seed counts, grid steps, probe layouts) live in ``DEFAULTS`` and
are embedded in every report.
"""

import time
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError
from .field import (QuadratureConfig, _barycentric, fbf_eval, fbf_partial_path, fbf_path,
                    fbf_wb, lattice_derivs, log_kernel_path, mbm_lattice, mbm_sample,
                    mbm_stochint_oracle, verify_wb_relation, wb_normaliser, wb_weights)
from .fractal import (dim_bounds_from_frontier, est_boxdim_local, est_pboxdim_local,
                      level_set_boxdim, parabolic_transfer_bounds, predict_boxdim_graph,
                      predict_hausdim_graph)
from .gauss import exact_cov, lnd_slope, mbm_ensemble, mbm_weights
from .hurst import build_chirp, build_hurst, weierstrass_raw
from .noise import TimeGrid, derive_seed, gen_brownian, gen_fbm
from .parallel import ordered_map, task_seeds
from .regularity import (Sampled, default_sprime_grid, detect_multiplicity, est_exponents,
                         est_frontier, predict_frontier_mbm, predict_pointwise_mbm)
from .report import ReportRecord

__all__ = ["SUITES", "DEFAULTS", "run_suite", "suite_names", "IrregularRun", "irregular_mbm"]


DEFAULTS = {
    "representation-equivalence": {"hursts": [0.3, 0.7], "coarse_step_exp": 13,
                                   "support": 21.0, "eval_step_exp": 12, "n_seeds": 8,
                                   "tol": 0.05, "max_runtime_s": 60.0},
    "half-collapse": {"n_points": 100, "step_exp": 10, "tol": 1e-10, "limit_eps": 1e-5},
    "t-independence": {"hursts": [0.2, 0.4], "times": [0.5, 1.0], "step_exp": 10,
                       "offset": 1.0, "tol": 1e-8},
    "well-balanced": {"hurst": 0.7, "times": [0.5, 1.0, -0.75], "identity_tol": 1e-8,
                      "relation_step_exp": 13, "relation_tol": 0.1,
                      "cov_times": [1.0, 1.125, 1.25], "cov_step_exp": 8, "n_seeds": 500,
                      "cov_tol": 0.1},
    "chirp-calibration": {"alpha": 0.5, "beta": 1.0, "frontier_points_exp": 18,
                          "frontier_tol": 0.1, "sprime_range": [-0.5, 1.0],
                          "box_step_exp": 21, "box_scales": [11, 17], "box_rho": 0.1,
                          "box_tol": 0.1, "bound_tol": 0.1, "max_runtime_s": 120.0},
    "fbm-regularity": {"hurst": 0.3, "points_exp": 16, "n_seeds": 20, "n_deriv_seeds": 10,
                       "deriv_support": 21.0, "tol": 0.1, "sprime_range": [-0.3, 1.0]},
    "irregular-mbm-frontier": {"a": 0.375, "lo": 0.5, "hi": 0.75, "shift": 40.0,
                               "half_span": 3.0, "step_exp": 14, "n_probes": 5,
                               "n_seeds": 10, "frontier_tol": 0.15, "pointwise_tol": 0.1},
    "irregular-mbm-boxdim": {"a": 0.3, "lo": 0.5, "hi": 0.9, "shift": 40.0, "half_span": 3.0,
                             "step_exp": 14, "n_probes": 5, "n_seeds": 10, "rho": 0.1,
                             "scales": [4, 10], "tol": 0.15},
    "parabolic": {"segment_h": 0.5, "segment_tol": 0.1, "fbm_cases": [[0.3, 0.6], [0.7, 0.5]],
                  "fbm_points_exp": 18, "fbm_seeds": 10, "fbm_tol": 0.2,
                  "pairs": [[0.8, 0.6], [0.7, 0.5]], "sandwich_tol": 0.1,
                  "haus_seeds": 3, "haus_tol": 0.2},
    "jump-law": {"t0": 1.0, "h_mid": 0.6, "jumps": [0.05, 0.1, 0.2], "n_seeds": 500,
                 "step_exp": 10, "slope": 2.0, "tol": 0.2},
    "lnd-optimality": {"t": 1.0, "hursts": [0.3, 0.7], "radii_exps": [3, 4, 5, 6, 7, 8],
                       "n_seeds": 1000, "step_exp": 12, "const_tol": 0.3,
                       "oscillating_tol": 0.3},
    "level-sets": {"bm_seeds": 20, "bm_step_exp": 16, "scales": [4, 10], "mbm_hurst": 0.3,
                   "mbm_seeds": 20, "mbm_step_exp": 15, "mbm_t": 0.5, "mbm_rho": 0.25,
                   "tol": 0.15},
}


def _const(h):
    return build_hurst("constant", {"h": h})


def _max_err(sp, sig, theory, lo, hi):
    m = (sp >= lo - 1e-12) & (sp <= hi + 1e-12)
    return float(np.max(np.abs(sig[m] - theory[m])))


# ---------------------------------------------------------------- 1


def _rep_task(args):
    seed, cfg = args
    U = cfg["support"]
    e = cfg["coarse_step_exp"]
    fine = gen_brownian(TimeGrid.symmetric(U, 2.0 ** -(e + 1)), seed)
    eg = TimeGrid(-1.0, 1.0, 2.0 ** -cfg["eval_step_exp"])
    q = QuadratureConfig(truncation=U)
    out = {}
    for h in cfg["hursts"]:
        errs = []
        for every in (2, 1):  # step 2^-e, then halved
            bm = fine.restrict(every)
            X = mbm_sample(eg, _const(h), 1.0, 0.0, bm, q).values
            O = mbm_stochint_oracle(eg, _const(h), 1.0, 0.0, bm).values
            errs.append(float(np.max(np.abs(X - O)) / np.max(np.abs(O))))
        out[h] = errs
    return out


def suite_representation_equivalence(seed=0, workers=1, cfg=None):
    cfg = cfg or DEFAULTS["representation-equivalence"]
    rec = ReportRecord("representation-equivalence")
    t0 = time.perf_counter()
    seeds = task_seeds(seed, cfg["n_seeds"])
    res = ordered_map(_rep_task, [(s, cfg) for s in seeds], workers)
    e = cfg["coarse_step_exp"]
    for h in cfg["hursts"]:
        errs = np.array([r[h] for r in res])
        rec.add(f"H={h}: worst-seed sup relative error, step 2^-{e}", 0.0,
                errs[:, 0].max(), cfg["tol"])
        rec.add(f"H={h}: seed-mean error at step 2^-{e + 1} below step 2^-{e}",
                errs[:, 0].mean(), errs[:, 1].mean(), 0.0, "lt")
        rec.notes[f"H={h}"] = {"errors": errs.tolist(),
                               "single_seed_decrease_fraction":
                                   float(np.mean(errs[:, 1] < errs[:, 0]))}
    rec.runtime = time.perf_counter() - t0
    rec.add("runtime (s)", cfg["max_runtime_s"], rec.runtime, 0.0, "le")
    return rec


# ---------------------------------------------------------------- 2


def suite_half_collapse(seed=0, workers=1, cfg=None):
    cfg = cfg or DEFAULTS["half-collapse"]
    rec = ReportRecord("half-collapse")
    t0 = time.perf_counter()
    bm = gen_brownian(TimeGrid.symmetric(22.0, 2.0 ** -cfg["step_exp"]), derive_seed(seed, 0))
    n = cfg["n_points"]
    times = (np.arange(n) - n // 2) * 2.0 ** -6
    q = QuadratureConfig(truncation=21.0)
    b = np.array([bm.value(t) for t in times])
    for side, sign in (("+", 1.0), ("-", -1.0)):
        v = np.array([fbf_eval(side, t, 0.5, bm, q) for t in times])
        rec.add(f"max |B{side}(t, 1/2) - ({side}B_t)| over {n} points", 0.0,
                np.max(np.abs(v - sign * b)), cfg["tol"])
    # h = 1/2 is a closed form; the approach from both sides goes through the kernels
    eps = cfg["limit_eps"]
    sub = times[::10]
    bs = b[::10]
    for side, sign in (("+", 1.0), ("-", -1.0)):
        gap = max(abs(fbf_eval(side, t, 0.5 + d, bm, q) - sign * v)
                  for t, v in zip(sub, bs) for d in (-eps, eps))
        rec.add(f"max |B{side}(t, 1/2 +/- {eps:g}) - ({side}B_t)|", 0.0, gap,
                1e3 * eps * max(1.0, float(np.max(np.abs(bs)))))
    grid = TimeGrid(times[0], times[-1], 2.0 ** -6)
    X = mbm_sample(grid, _const(0.5), 1.0, 0.0, bm, q).values
    rec.add("mBm with H = 1/2 equals the Brownian path", 0.0, np.max(np.abs(X - b)), cfg["tol"])
    rec.runtime = time.perf_counter() - t0
    return rec


# ---------------------------------------------------------------- 3


def suite_t_independence(seed=0, workers=1, cfg=None):
    cfg = cfg or DEFAULTS["t-independence"]
    rec = ReportRecord("t-independence")
    t0 = time.perf_counter()
    bm = gen_brownian(TimeGrid.symmetric(25.0, 2.0 ** -cfg["step_exp"]), derive_seed(seed, 0))
    d = cfg["offset"]
    q1 = QuadratureConfig(truncation=24.0, anchor_offset=d)
    q2 = QuadratureConfig(truncation=24.0, anchor_offset=2 * d)
    for h in cfg["hursts"]:
        for t in cfg["times"]:
            for side in ("+", "-"):
                a = fbf_eval(side, t, h, bm, q1)
                b = fbf_eval(side, t, h, bm, q2)
                rec.add(f"h={h}, t={t}, side {side}: relative change offset -> 2 offset",
                        0.0, abs(a - b) / max(abs(a), 1e-300), cfg["tol"])
    rec.runtime = time.perf_counter() - t0
    return rec


# ---------------------------------------------------------------- 4


def _ratio_spread(C, times):
    r = np.array([C[i, j] / min(times[i], times[j])
                  for i in range(len(times)) for j in range(i, len(times))])
    return float((r.max() - r.min()) / r.mean())


def suite_well_balanced(seed=0, workers=1, cfg=None):
    cfg = cfg or DEFAULTS["well-balanced"]
    rec = ReportRecord("well-balanced")
    t0 = time.perf_counter()
    h = cfg["hurst"]
    U = 21.0
    q = QuadratureConfig(truncation=U)
    bm = gen_brownian(TimeGrid.symmetric(U, 2.0 ** -10), derive_seed(seed, 0))
    for t in cfg["times"]:
        wb = fbf_wb(t, h, bm, q)
        alg = (fbf_eval("+", t, h, bm, q) + fbf_eval("-", t, h, bm, q)) / (h - 0.5)
        rec.add(f"t={t}: well-balanced vs (B+ + B-)/(h - 1/2), relative", 0.0,
                abs(wb - alg) / abs(alg), cfg["identity_tol"])
    bm = gen_brownian(TimeGrid.symmetric(U, 2.0 ** -cfg["relation_step_exp"]),
                      derive_seed(seed, 1))
    tilde = log_kernel_path(bm, 8.0 * U, q)
    for t in cfg["times"]:
        lhs, rhs, gap = verify_wb_relation(t, h, bm, q, tilde=tilde)
        rec.add(f"t={t}: log-kernel relation gap / |lhs|", 0.0, gap / abs(lhs),
                cfg["relation_tol"])
    rec.add("normalising factor at h = 0.5001", 1.0, wb_normaliser(0.5001), 1e-3)
    ct = np.asarray(cfg["cov_times"], dtype=float)
    grid = TimeGrid.symmetric(U + 1.0, 2.0 ** -cfg["cov_step_exp"])
    wts = wb_weights(ct, 0.5, grid, QuadratureConfig(truncation=U))
    X = mbm_ensemble(wts, grid, task_seeds(derive_seed(seed, 2), cfg["n_seeds"]))
    C = np.cov(X.T)
    rec.add(f"H=1/2: spread of cov(X_s, X_t)/min(s, t) over {cfg['n_seeds']} seeds", 0.0,
            _ratio_spread(C, ct), cfg["cov_tol"])
    Cx = exact_cov(wts, grid)
    rec.notes["exact_ratio_spread"] = _ratio_spread(Cx, ct)
    rec.notes["exact_ratio_over_pi2"] = float(Cx[0, 0] / ct[0] / np.pi ** 2)
    rec.runtime = time.perf_counter() - t0
    return rec


# ---------------------------------------------------------------- 5


def suite_chirp_calibration(seed=0, workers=1, cfg=None):
    cfg = cfg or DEFAULTS["chirp-calibration"]
    rec = ReportRecord("chirp-calibration")
    t0 = time.perf_counter()
    ch = build_chirp(cfg["alpha"], cfg["beta"])
    n = 2 ** cfg["frontier_points_exp"]
    x = np.linspace(-1.0, 1.0, n + 1)
    fs = Sampled(-1.0, 2.0 / n, ch(x))
    fr = est_frontier(fs, 0.0)
    lo, hi = cfg["sprime_range"]
    rec.add(f"max |sigma_hat - theory| on s' in [{lo}, {hi}]", 0.0,
            _max_err(fr.sprime, fr.sigma, ch.frontier(fr.sprime), lo, hi), cfg["frontier_tol"])
    ex = est_exponents(fs, 0.0)
    rec.add("pointwise exponent at 0", ch.pointwise_exp, ex.pointwise, 0.1)
    rec.add("local exponent at 0", ch.local_exp, ex.local, 0.1)
    step = 2.0 ** -cfg["box_step_exp"]
    m = int(round(0.125 / step))
    xb = np.arange(-m, m + 1) * step
    fb = Sampled(float(xb[0]), step, ch(xb))
    bd = est_boxdim_local(fb, 0.0, cfg["box_rho"], tuple(cfg["box_scales"]))
    rec.add("local box dimension at 0", ch.boxdim_at_zero, bd.value, cfg["box_tol"])
    box_up, haus_up = dim_bounds_from_frontier(float(fr(1.0)), float(fr.sigma[-1]))
    rec.add("box upper bound from sigma_hat(1) vs estimated box dimension", bd.value, box_up,
            cfg["bound_tol"])
    rec.add("Hausdorff upper bound from sigma_hat at the largest s' vs dim_H = 1", ch.hausdim,
            haus_up, cfg["bound_tol"])
    rec.notes["sigma_hat"] = fr.sigma.tolist()
    rec.notes["box_bounds"] = [bd.lower, bd.upper]
    rec.runtime = time.perf_counter() - t0
    rec.add("runtime (s)", cfg["max_runtime_s"], rec.runtime, 0.0, "le")
    return rec


# ---------------------------------------------------------------- 6


def _fbm_reg_task(args):
    seed, cfg = args
    h = cfg["hurst"]
    step = 2.0 / 2 ** cfg["points_exp"]
    path = gen_fbm(TimeGrid.symmetric(1.0, step), h, seed)
    fs = Sampled(-1.0, step, path.values)
    ex = est_exponents(fs, 0.0)
    fr = est_frontier(fs, 0.0)
    return ex.pointwise, ex.local, fr.sigma


def _deriv_task(args):
    seed, cfg = args
    h = cfg["hurst"]
    step = 2.0 / 2 ** cfg["points_exp"]
    U = cfg["deriv_support"]
    bm = gen_brownian(TimeGrid.symmetric(U, step), seed)
    k = int(round(1.0 / step))
    times = np.arange(-k, k + 1) * step
    d = fbf_partial_path("+", h, 1, bm, times, QuadratureConfig(truncation=U))
    fs = Sampled(-1.0, step, d)
    ex = est_exponents(fs, 0.0)
    fr = est_frontier(fs, 0.0)
    return ex.pointwise, ex.local, fr.sigma


def _regularity_rows(rec, label, res, h, cfg):
    pw = np.array([r[0] for r in res])
    loc = np.array([r[1] for r in res])
    sig = np.array([r[2] for r in res])
    sp = default_sprime_grid()
    theory = np.minimum(sp + h, h)
    lo, hi = cfg["sprime_range"]
    tol = cfg["tol"]
    rec.add(f"{label}: seed-mean pointwise exponent", h, pw.mean(), tol)
    rec.add(f"{label}: seed-mean local exponent", h, loc.mean(), tol)
    rec.add(f"{label}: seed-mean frontier, max error on s' in [{lo}, {hi}]", 0.0,
            _max_err(sp, sig.mean(0), theory, lo, hi), tol)
    per_seed = [_max_err(sp, s, theory, lo, hi) for s in sig]
    rec.notes[label] = {
        "pointwise": pw.tolist(), "local": loc.tolist(), "frontier_max_err": per_seed,
        "per_seed_pass_fraction": float(np.mean(
            (np.abs(pw - h) <= tol) & (np.abs(loc - h) <= tol) & (np.array(per_seed) <= tol))),
    }


def suite_fbm_regularity(seed=0, workers=1, cfg=None):
    cfg = cfg or DEFAULTS["fbm-regularity"]
    rec = ReportRecord("fbm-regularity")
    t0 = time.perf_counter()
    h = cfg["hurst"]
    res = ordered_map(_fbm_reg_task, [(s, cfg) for s in task_seeds(seed, cfg["n_seeds"])],
                      workers)
    _regularity_rows(rec, f"fBm h={h}", res, h, cfg)
    res = ordered_map(_deriv_task, [(s, cfg) for s in
                                    task_seeds(derive_seed(seed, 99), cfg["n_deriv_seeds"])],
                      workers)
    _regularity_rows(rec, f"dB/dH at h={h}", res, h, cfg)
    rec.runtime = time.perf_counter() - t0
    return rec


# ---------------------------------------------------------------- 7, 8, 9


@dataclass(frozen=True, eq=False)
class IrregularRun:
    """mBm driven by a rescaled fBm-sample Hurst function, sampled on
    ``[shift - half_span, shift + half_span]``."""

    path: Sampled
    hurst: object
    probes: np.ndarray
    multiplicity: np.ndarray
    derivs: np.ndarray


def irregular_mbm(seed, a, lo, hi, shift=40.0, half_span=3.0, step=2.0 ** -13, n_probes=5,
                  n_lattice=16, probe_spacing=0.125, min_separation=0.75, margin=0.5):
    """One sample of the irregular-Hurst experiment.

    The Hurst function is an fBm(a) sample rescaled to ``[lo, hi]`` and read
    at ``t - shift``.  Probes are picked among a lattice of candidate times
    (at least ``margin`` inside the span) in decreasing order of
    ``|dX/dH|``, keeping ``min_separation`` apart and requiring a detected
    multiplicity of 1.
    """
    hgrid = TimeGrid.symmetric(half_span, step)
    H = build_hurst("fbm-sample", {"a": a, "lo": lo, "hi": hi, "shift": shift},
                    gen_fbm(hgrid, a, derive_seed(seed, 1)))
    U = 20.0 + shift + half_span
    bm = gen_brownian(TimeGrid.symmetric(U, step), derive_seed(seed, 0))
    q = QuadratureConfig(truncation=U)
    k = int(round(half_span / step))
    times = shift + np.arange(-k, k + 1) * step
    nodes, vals = mbm_lattice(lo, hi, 1.0, 0.0, bm, times, q, n_lattice)
    hv = H(times)
    X = _barycentric(nodes, vals, hv)
    m = int(round((half_span - margin) / probe_spacing))
    cand = shift + np.arange(-m, m + 1) * probe_spacing
    ci = np.rint((cand - times[0]) / step).astype(np.int64)
    d = lattice_derivs(nodes, vals[:, ci], hv[ci], 3)
    mult = np.array([detect_multiplicity(d[:, c]) for c in range(cand.size)])
    order = np.argsort(-np.abs(d[1]))
    probes, keep = [], []
    for o in order:
        if mult[o] != 1:
            continue
        if all(abs(cand[o] - p) >= min_separation for p in probes):
            probes.append(cand[o])
            keep.append(o)
        if len(probes) == n_probes:
            break
    return IrregularRun(Sampled(float(times[0]), step, X), H, np.array(probes),
                        mult[keep], d[:, keep])


def _irr_frontier_task(args):
    seed, cfg = args
    run = irregular_mbm(seed, cfg["a"], cfg["lo"], cfg["hi"], cfg["shift"], cfg["half_span"],
                        2.0 ** -cfg["step_exp"], cfg["n_probes"])
    out = []
    for p in run.probes:
        ht = float(run.hurst(p))
        fr = est_frontier(run.path, p)
        ex = est_exponents(run.path, p)
        pred, _ = predict_frontier_mbm(ht, run.hurst.meta.frontier, 1, fr.sprime)
        out.append((ht, fr.sigma, pred.sigma, ex.pointwise,
                    predict_pointwise_mbm(ht, cfg["a"], 1)))
    return out


def suite_irregular_mbm_frontier(seed=0, workers=1, cfg=None):
    cfg = cfg or DEFAULTS["irregular-mbm-frontier"]
    rec = ReportRecord("irregular-mbm-frontier")
    t0 = time.perf_counter()
    res = ordered_map(_irr_frontier_task,
                      [(s, cfg) for s in task_seeds(seed, cfg["n_seeds"])], workers)
    sp = default_sprime_grid()
    lo, hi = -cfg["a"], 1.0
    for r in range(cfg["n_probes"]):
        rows = [run[r] for run in res]
        sig = np.mean([x[1] for x in rows], axis=0)
        pred = np.mean([x[2] for x in rows], axis=0)
        rec.add(f"probe rank {r + 1}: mean frontier vs exact curve, max error on s' in "
                f"[{lo}, {hi}]", 0.0, _max_err(sp, sig, pred, lo, hi), cfg["frontier_tol"])
        rec.add(f"probe rank {r + 1}: mean frontier above the lower bound (min margin)", 0.0,
                float(np.min((sig - pred)[(sp >= lo) & (sp <= hi)])), cfg["frontier_tol"], "ge")
        rec.add(f"probe rank {r + 1}: mean pointwise exponent vs min(H(t), a)",
                float(np.mean([x[4] for x in rows])), float(np.mean([x[3] for x in rows])),
                cfg["pointwise_tol"])
    rec.notes["hurst_at_probes"] = [[x[0] for x in run] for run in res]
    rec.notes["pointwise"] = [[x[3] for x in run] for run in res]
    rec.runtime = time.perf_counter() - t0
    return rec


def _irr_box_task(args):
    seed, cfg = args
    run = irregular_mbm(seed, cfg["a"], cfg["lo"], cfg["hi"], cfg["shift"], cfg["half_span"],
                        2.0 ** -cfg["step_exp"], cfg["n_probes"])
    out = []
    for p in run.probes:
        ht = float(run.hurst(p))
        bd = est_boxdim_local(run.path, p, cfg["rho"], tuple(cfg["scales"]))
        out.append((ht, bd.value, predict_boxdim_graph(ht, 2.0 - cfg["a"])))
    return out


def suite_irregular_mbm_boxdim(seed=0, workers=1, cfg=None):
    cfg = cfg or DEFAULTS["irregular-mbm-boxdim"]
    rec = ReportRecord("irregular-mbm-boxdim")
    t0 = time.perf_counter()
    res = ordered_map(_irr_box_task, [(s, cfg) for s in task_seeds(seed, cfg["n_seeds"])],
                      workers)
    for r in range(cfg["n_probes"]):
        est = np.array([run[r][1] for run in res])
        pred = np.array([run[r][2] for run in res])
        rec.add(f"probe rank {r + 1}: mean local box dimension vs max(2 - a, 2 - H(t))",
                pred.mean(), est.mean(), cfg["tol"])
    rec.notes["estimates"] = [[x[1] for x in run] for run in res]
    rec.notes["hurst_at_probes"] = [[x[0] for x in run] for run in res]
    rec.runtime = time.perf_counter() - t0
    return rec


def _pbox_fbm_task(args):
    seed, a, h, n_exp = args
    step = 1.0 / 2 ** n_exp
    path = gen_fbm(TimeGrid.symmetric(0.5, step), a, seed)
    return est_pboxdim_local(path, 0.0, h).value


def _haus_task(args):
    seed, cfg = args
    run = irregular_mbm(seed, cfg["a"], cfg["lo"], cfg["hi"], cfg["shift"], cfg["half_span"],
                        2.0 ** -cfg["step_exp"], cfg["n_probes"])
    hs = run.hurst.samples
    hpath = Sampled(float(hs[0].points[0] + cfg["shift"]), hs[0].step, hs[1])
    out = []
    for p in run.probes:
        ht = float(run.hurst(p))
        pd = est_pboxdim_local(hpath, p, ht, cfg["rho"], tuple(cfg["scales"])).value
        bd = est_boxdim_local(run.path, p, cfg["rho"], tuple(cfg["scales"])).value
        out.append((predict_hausdim_graph(ht, max(pd, 1.0)), bd))
    return out


def suite_parabolic(seed=0, workers=1, cfg=None):
    cfg = cfg or DEFAULTS["parabolic"]
    rec = ReportRecord("parabolic")
    t0 = time.perf_counter()
    step = 2.0 ** -18
    x = TimeGrid.symmetric(0.5, step).points
    shapes = {"segment": np.zeros_like(x), "line": x.copy(),
              "weierstrass": weierstrass_raw(x, 0.4, 2.0, 80)}
    seg = Sampled(float(x[0]), step, shapes["segment"])
    hs = cfg["segment_h"]
    rec.add(f"segment slope under rho_{hs}", 1.0 / hs, est_pboxdim_local(seg, 0.0, hs).value,
            cfg["segment_tol"])
    for a, h in cfg["fbm_cases"]:
        seeds = task_seeds(derive_seed(seed, int(a * 1000)), cfg["fbm_seeds"])
        vals = ordered_map(_pbox_fbm_task, [(s, a, h, cfg["fbm_points_exp"]) for s in seeds],
                           workers)
        rec.add(f"fBm a={a} under rho_{h}: mean slope vs max(1/h, 1 + (1 - a)/h)",
                max(1.0 / h, 1.0 + (1.0 - a) / h), float(np.mean(vals)), cfg["fbm_tol"])
        rec.notes[f"fbm a={a} h={h}"] = list(vals)
    for name, y in shapes.items():
        f = Sampled(float(x[0]), step, y)
        for H1, H2 in cfg["pairs"]:
            d1 = est_pboxdim_local(f, 0.2, H1).value
            d2 = est_pboxdim_local(f, 0.2, H2).value
            lo, hi = parabolic_transfer_bounds(d2, H1, H2)
            rec.add(f"{name}: rho_{H1} estimate inside bounds from rho_{H2}", (lo, hi), d1,
                    cfg["sandwich_tol"], "in")
    icfg = dict(DEFAULTS["irregular-mbm-boxdim"])
    icfg["n_probes"] = 3
    pairs = ordered_map(_haus_task, [(s, icfg) for s in
                                     task_seeds(derive_seed(seed, 7), cfg["haus_seeds"])],
                        workers)
    flat = np.array([p for run in pairs for p in run])
    rec.add("mBm: mean |hausdorff prediction from parabolic count - box estimate|", 0.0,
            float(np.mean(np.abs(flat[:, 0] - flat[:, 1]))), cfg["haus_tol"])
    rec.notes["hausdorff_vs_box"] = flat.tolist()
    rec.runtime = time.perf_counter() - t0
    return rec


# ---------------------------------------------------------------- 10


def suite_jump_law(seed=0, workers=1, cfg=None):
    cfg = cfg or DEFAULTS["jump-law"]
    rec = ReportRecord("jump-law")
    t0 = time.perf_counter()
    t_0 = cfg["t0"]
    U = 20.0 + abs(t_0)
    grid = TimeGrid.symmetric(U, 2.0 ** -cfg["step_exp"])
    q = QuadratureConfig(truncation=U)
    seeds = task_seeds(seed, cfg["n_seeds"])
    var, exact = [], []
    for dh in cfg["jumps"]:
        H = build_hurst("step", {"h0": cfg["h_mid"] - dh / 2, "jump": dh, "t0": t_0})
        left = float(H(t_0 - 1e-9))
        wts = mbm_weights([t_0, t_0], H, 1.0, 0.0, grid, q, levels=[float(H(t_0)), left])
        W, lo = wts
        dw = (W[0] - W[1])[None, :]
        jump = mbm_ensemble((dw, lo), grid, seeds)[:, 0]
        var.append(float(np.var(jump, ddof=1)))
        exact.append(float(exact_cov((dw, lo), grid)[0, 0]))
    slope = np.polyfit(np.log(cfg["jumps"]), np.log(var), 1)[0]
    rec.add(f"slope of log Var(jump) on log dH over {cfg['n_seeds']} seeds", cfg["slope"],
            slope, cfg["tol"])
    rec.notes["variances"] = var
    rec.notes["exact_variances"] = exact
    rec.notes["exact_slope"] = float(np.polyfit(np.log(cfg["jumps"]), np.log(exact), 1)[0])
    rec.runtime = time.perf_counter() - t0
    return rec


# ---------------------------------------------------------------- 11


def suite_lnd_optimality(seed=0, workers=1, cfg=None):
    cfg = cfg or DEFAULTS["lnd-optimality"]
    rec = ReportRecord("lnd-optimality")
    t0 = time.perf_counter()
    radii = 2.0 ** -np.asarray(cfg["radii_exps"], dtype=float)
    seeds = task_seeds(seed, cfg["n_seeds"])
    step = 2.0 ** -cfg["step_exp"]
    t = cfg["t"]
    for h in cfg["hursts"]:
        r = lnd_slope(_const(h), t, radii, seeds, step)
        rec.add(f"constant H={h}: conditional-variance slope", 2 * h, r.slope, cfg["const_tol"])
    H = build_hurst("chirp-hurst", {"center": t, "radius": 0.2})
    r = lnd_slope(H, t, radii, seeds, step)
    rec.add("oscillating H along level-matching points: slope at most 2H(t)", 2 * float(H(t)),
            r.slope, cfg["oscillating_tol"], "le")
    rec.notes["oscillating"] = {"points": r.points.tolist(), "cond_vars": r.cond_vars.tolist()}
    rec.runtime = time.perf_counter() - t0
    return rec


# ---------------------------------------------------------------- 12


def _bm_level_task(args):
    seed, cfg = args
    bm = gen_brownian(TimeGrid.symmetric(1.0, 2.0 ** -cfg["bm_step_exp"]), seed)
    return level_set_boxdim(bm, 0.0, (0.0, 1.0), tuple(cfg["scales"])).value


def _mbm_level_task(args):
    seed, cfg = args
    step = 2.0 ** -cfg["mbm_step_exp"]
    U = 21.0
    bm = gen_brownian(TimeGrid.symmetric(U, step), seed)
    t = cfg["mbm_t"]
    rho = cfg["mbm_rho"]
    times = TimeGrid(t - 2 * rho, t + 2 * rho, step)
    X = fbf_path("+", cfg["mbm_hurst"], bm, times.points, QuadratureConfig(truncation=U))
    fs = Sampled(float(times.points[0]), step, X)
    level = X[times.index_of(t)]
    return level_set_boxdim(fs, level, (t - rho, t + rho), tuple(cfg["scales"])).value


def suite_level_sets(seed=0, workers=1, cfg=None):
    cfg = cfg or DEFAULTS["level-sets"]
    rec = ReportRecord("level-sets")
    t0 = time.perf_counter()
    v = ordered_map(_bm_level_task, [(s, cfg) for s in task_seeds(seed, cfg["bm_seeds"])],
                    workers)
    rec.add("Brownian zero set: mean box dimension", 0.5, float(np.mean(v)), cfg["tol"])
    h = cfg["mbm_hurst"]
    w = ordered_map(_mbm_level_task, [(s, cfg) for s in
                                      task_seeds(derive_seed(seed, 5), cfg["mbm_seeds"])],
                    workers)
    # constant H: the bracket [1 - H(t), 1 - min(H(t), alpha_H)] collapses to 1 - h
    rec.add(f"constant-H mBm h={h}: mean level-set dimension inside the bracket",
            (1.0 - h, 1.0 - h), float(np.mean(w)), cfg["tol"], "in")
    rec.notes["brownian"] = list(v)
    rec.notes["mbm"] = list(w)
    rec.runtime = time.perf_counter() - t0
    return rec


SUITES = {
    "representation-equivalence": suite_representation_equivalence,
    "half-collapse": suite_half_collapse,
    "t-independence": suite_t_independence,
    "well-balanced": suite_well_balanced,
    "chirp-calibration": suite_chirp_calibration,
    "fbm-regularity": suite_fbm_regularity,
    "irregular-mbm-frontier": suite_irregular_mbm_frontier,
    "irregular-mbm-boxdim": suite_irregular_mbm_boxdim,
    "parabolic": suite_parabolic,
    "jump-law": suite_jump_law,
    "lnd-optimality": suite_lnd_optimality,
    "level-sets": suite_level_sets,
}


def suite_names():
    return list(SUITES)


def run_suite(name, seed=0, workers=1):
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; available: {', '.join(SUITES)}", key="suite")
    rec = SUITES[name](seed=seed, workers=workers)
    rec.config = {"suite": name, "seed": seed, "workers": workers, **DEFAULTS[name]}
    return rec
