import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mbmlab.exceptions import DomainError, GridAlignmentError, StepError, SupportError
from mbmlab.field import (QuadratureConfig, fbf_eval, fbf_partial, fbf_partial_analytic,
                          fbf_partial_path, fbf_path, fbf_wb, field_weights, lattice_derivs,
                          log_kernel_path, mbm_lattice, mbm_sample, mbm_stochint_oracle,
                          tail_bound, verify_wb_relation, wb_normaliser, wb_weights)
from mbmlab.gauss import exact_cov
from mbmlab.hurst import build_hurst
from mbmlab.noise import BrownianPath, TimeGrid, derive_seed, gen_brownian
from mbmlab.regularity import Sampled, est_frontier

Q = QuadratureConfig(truncation=21.0)


def const(h):
    return build_hurst("constant", {"h": h})


@given(h=st.floats(0.05, 0.95), side=st.sampled_from("+-"))
@settings(max_examples=20, deadline=None)
def test_zero_at_origin(bm21, h, side):
    assert fbf_eval(side, 0.0, h, bm21, Q) == pytest.approx(0.0, abs=1e-12)


def test_half_is_brownian(bm21):
    assert abs(fbf_eval("+", 1.0, 0.5, bm21, Q) - bm21.value(1.0)) <= 1e-10
    assert abs(fbf_eval("-", 1.0, 0.5, bm21, Q) + bm21.value(1.0)) <= 1e-10


def _oracle_errors(h, seeds):
    eg = TimeGrid(-1.0, 1.0, 2.0 ** -12)
    errs = []
    for sd in seeds:
        fine = gen_brownian(TimeGrid.symmetric(21.0, 2.0 ** -14), sd)
        row = []
        for every in (2, 1):
            bm = fine.restrict(every)
            X = mbm_sample(eg, const(h), 1.0, 0.0, bm, Q).values
            O = mbm_stochint_oracle(eg, const(h), 1.0, 0.0, bm).values
            row.append(np.max(np.abs(X - O)) / np.max(np.abs(O)))
        errs.append(row)
    return np.array(errs)


@pytest.mark.parametrize("h", [0.3, 0.7])
def test_oracle_agreement_and_refinement(h):
    e = _oracle_errors(h, [derive_seed(42, k) for k in range(3)])
    assert e[:, 0].max() <= 5e-2
    assert e[:, 1].mean() < e[:, 0].mean()


def test_oracle_at_one_point():
    bm = gen_brownian(TimeGrid.symmetric(21.0, 2.0 ** -13), 9)
    g = TimeGrid(0.0, 1.0, 2.0 ** -13)
    O = mbm_stochint_oracle(g, const(0.7), 1.0, 0.0, bm).values[-1]
    X = fbf_eval("+", 1.0, 0.7, bm, Q)
    assert abs(X - O) / abs(O) <= 5e-2


@given(c=st.floats(-8.0, 8.0).filter(lambda c: abs(c) > 1e-3), h=st.floats(0.1, 0.9))
@settings(max_examples=10, deadline=None)
def test_linearity(bm21, c, h):
    scaled = bm21.scaled(c)
    for fn in (lambda b: fbf_eval("+", 0.75, h, b, Q), lambda b: fbf_wb(0.75, h, b, Q),
               lambda b: fbf_partial("-", 0.75, h, 1, b, Q)):
        base = fn(bm21)
        assert fn(scaled) == pytest.approx(c * base, rel=1e-9, abs=1e-12)


def test_doubling_is_exact(bm21):
    assert fbf_eval("+", 0.5, 0.3, bm21.scaled(2.0), Q) == 2.0 * fbf_eval("+", 0.5, 0.3, bm21, Q)


def test_partial_order_zero(bm21):
    assert fbf_partial("+", 0.5, 0.4, 0, bm21, Q) == fbf_eval("+", 0.5, 0.4, bm21, Q)


@pytest.mark.parametrize("side", "+-")
def test_partial_fd_vs_analytic(bm21, side):
    fd = fbf_partial(side, 1.0, 0.7, 1, bm21, Q)
    an = fbf_partial_analytic(side, 1.0, 0.7, 1, bm21, Q)
    assert abs(fd - an) <= 1e-3 * abs(an)


def test_partial_errors(bm21):
    with pytest.raises(StepError):
        fbf_partial("+", 0.5, 0.0005, 1, bm21, Q)
    with pytest.raises(DomainError):
        fbf_partial_analytic("+", 0.5, 0.3, 1, bm21, Q)


@pytest.mark.xfail(strict=True, reason="log factor of the H-derivative biases slopes at N=2^16")
def test_partial_frontier():
    step = 2.0 ** -15
    bm = gen_brownian(TimeGrid.symmetric(21.0, step), 4)
    times = np.arange(-2 ** 15, 2 ** 15 + 1) * step
    d = fbf_partial_path("+", 0.6, 1, bm, times, Q)
    fr = est_frontier(Sampled(-1.0, step, d), 0.0)
    m = (fr.sprime >= -0.6) & (fr.sprime <= 1.0)
    assert np.max(np.abs(fr.sigma - np.minimum(fr.sprime + 0.6, 0.6))[m]) <= 0.1


def test_partial_path_matches_pointwise(bm21):
    times = np.array([-0.5, 0.25, 1.0])
    p = fbf_partial_path("+", 0.4, 1, bm21, times, Q)
    for t, v in zip(times, p):
        assert v == pytest.approx(fbf_partial("+", t, 0.4, 1, bm21, Q), rel=1e-8, abs=1e-10)


@pytest.mark.parametrize("h", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("side", "+-")
def test_fft_path_matches_weights(bm21, h, side):
    times = np.array([-1.0, -0.125, 0.0, 0.5, 2.0])
    a = fbf_path(side, h, bm21, times, Q)
    b = np.array([fbf_eval(side, t, h, bm21, Q) for t in times])
    assert np.max(np.abs(a - b)) <= 1e-9 * max(1.0, np.max(np.abs(b)))


# ---------------------------------------------------------------- well-balanced


def test_wb_zero_and_identity(bm21):
    assert fbf_wb(0.0, 0.7, bm21, Q) == pytest.approx(0.0, abs=1e-12)
    h = 0.7
    for t in (0.5, -1.25):
        alg = (fbf_eval("+", t, h, bm21, Q) + fbf_eval("-", t, h, bm21, Q)) / (h - 0.5)
        assert fbf_wb(t, h, bm21, Q) == pytest.approx(alg, rel=1e-8)


def test_wb_half_covariance_proportional_exact():
    times = np.array([1.0, 1.125, 1.25])
    grid = TimeGrid.symmetric(22.0, 2.0 ** -8)
    C = exact_cov(wb_weights(times, 0.5, grid, Q), grid)
    r = [C[i, j] / min(times[i], times[j]) for i in range(3) for j in range(i, 3)]
    assert (max(r) - min(r)) / np.mean(r) <= 0.1


def test_wb_half_covariance_proportional_mc():
    times = np.array([1.0, 1.125, 1.25])
    grid = TimeGrid.symmetric(22.0, 2.0 ** -8)
    W, lo = wb_weights(times, 0.5, grid, Q)
    X = np.stack([W @ gen_brownian(grid, derive_seed(3, k)).values[lo:lo + W.shape[1]]
                  for k in range(500)])
    C = np.cov(X.T)
    r = [C[i, j] / min(times[i], times[j]) for i in range(3) for j in range(i, 3)]
    assert (max(r) - min(r)) / np.mean(r) <= 0.1


def test_normaliser_limit():
    assert abs(wb_normaliser(0.5001) - 1.0) <= 1e-3
    assert wb_normaliser(0.5) == 1.0


def test_log_kernel_is_half_wb_at_half():
    # midpoint sums against exact cell integrals: agreement to about 1% of the path scale
    fine = gen_brownian(TimeGrid.symmetric(21.0, 2.0 ** -12), 11)
    ts = np.arange(-1.5, 1.51, 0.25)
    gaps = []
    for every in (16, 1):
        bm = fine.restrict(every)
        tilde = log_kernel_path(bm, 2.0, Q)
        a = np.array([tilde.value(t) for t in ts])
        b = np.array([0.5 * fbf_wb(t, 0.5, bm, Q) for t in ts])
        gaps.append(np.max(np.abs(a - b)) / np.max(np.abs(b)))
    assert gaps[1] <= 1e-2
    assert gaps[1] < gaps[0]


def test_wb_relation_gap():
    bm = gen_brownian(TimeGrid.symmetric(21.0, 2.0 ** -13), 2)
    lhs, rhs, gap = verify_wb_relation(1.0, 0.7, bm, Q)
    assert gap / abs(lhs) <= 0.1


# ---------------------------------------------------------------- mBm


def test_mbm_half_is_bm(bm21):
    g = TimeGrid(-1.0, 1.0, 2.0 ** -10)
    X = mbm_sample(g, const(0.5), 1.0, 0.0, bm21, Q).values
    assert np.max(np.abs(X - bm21.values[bm21.grid.index_of(g.points)])) <= 1e-10


def test_mbm_constant_h_covariance_matches_fbm_law():
    h = 0.3
    noise = TimeGrid.symmetric(21.0, 2.0 ** -8)
    probes = TimeGrid(0.0, 1.0, 0.25)
    X = np.stack([mbm_sample(probes, const(h), 1.0, 0.0, gen_brownian(noise, derive_seed(8, k)),
                             Q, method="direct").values for k in range(200)])
    C = np.cov(X.T)
    c = C[-1, -1]
    t = probes.points
    law = 0.5 * c * (t[:, None] ** (2 * h) + t[None, :] ** (2 * h)
                     - np.abs(t[:, None] - t[None, :]) ** (2 * h))
    assert np.max(np.abs(C - law)) <= 0.1 * c


def test_jump_variance_exact_slope():
    from mbmlab.gauss import mbm_weights

    grid = TimeGrid.symmetric(21.0, 2.0 ** -10)
    var = []
    jumps = [0.05, 0.1, 0.2]
    for dh in jumps:
        H = build_hurst("step", {"h0": 0.6 - dh / 2, "jump": dh, "t0": 1.0})
        W, lo = mbm_weights([1.0, 1.0], H, 1.0, 0.0, grid, Q, levels=[H(1.0), H(0.999)])
        var.append(exact_cov(((W[0] - W[1])[None], lo), grid)[0, 0])
    assert np.polyfit(np.log(jumps), np.log(var), 1)[0] == pytest.approx(2.0, abs=0.2)


def test_oracle_trivial_cases(bm21):
    g = TimeGrid(-1.0, 1.0, 2.0 ** -10)
    O = mbm_stochint_oracle(g, const(0.5), 1.0, 0.0, bm21).values
    assert np.max(np.abs(O - bm21.values[bm21.grid.index_of(g.points)])) <= 1e-12
    zero = BrownianPath(bm21.grid, np.zeros_like(bm21.values))
    assert np.all(mbm_stochint_oracle(g, const(0.3), 1.0, 0.0, zero).values == 0.0)


def test_lattice_matches_direct(bm21):
    H = build_hurst("smooth-sine", {"center": 0.5, "amp": 0.2, "freq": 0.5})
    g = TimeGrid(-1.0, 1.0, 2.0 ** -5)
    a = mbm_sample(g, H, 1.0, 0.5, bm21, Q, method="lattice").values
    b = mbm_sample(g, H, 1.0, 0.5, bm21, Q, method="direct").values
    assert np.max(np.abs(a - b)) <= 1e-6 * np.max(np.abs(b))


def test_lattice_derivs_match_analytic(bm21):
    times = np.array([0.5, 1.0, 1.5])
    nodes, vals = mbm_lattice(0.55, 0.95, 1.0, 0.0, bm21, times, Q, 16)
    d = lattice_derivs(nodes, vals, np.full(3, 0.7), 2)
    for k in (1, 2):
        for i, t in enumerate(times):
            an = fbf_partial_analytic("+", t, 0.7, k, bm21, Q)
            assert d[k, i] == pytest.approx(an, rel=1e-5, abs=1e-8)


def test_t_independence(bm21):
    for h in (0.2, 0.4):
        for t in (0.5, 1.0):
            a = fbf_eval("+", t, h, bm21, QuadratureConfig(truncation=20.0, anchor_offset=1.0))
            b = fbf_eval("+", t, h, bm21, QuadratureConfig(truncation=20.0, anchor_offset=2.0))
            assert abs(a - b) <= 1e-8 * abs(a)


def test_joint_continuity_refinement(bm21):
    diffs = []
    for level in (3, 6, 9):
        dt = dh = 2.0 ** -level
        ts = np.arange(0.0, 1.0 + 1e-12, dt)
        # for small h the dt^h modulus decays too slowly to show at these levels
        hs = np.arange(0.5, 0.8 + 1e-12, dh)
        F = np.array([fbf_path("+", h, bm21, ts, Q) for h in hs])
        diffs.append(max(np.max(np.abs(np.diff(F, axis=0))), np.max(np.abs(np.diff(F, axis=1)))))
    assert diffs[0] > diffs[1] > diffs[2]


def test_tail_bound_is_a_bound(bm21):
    bm = gen_brownian(TimeGrid.symmetric(41.0, 2.0 ** -8), 6)
    for h in (0.3, 0.7):
        near = fbf_eval("+", 1.0, h, bm, QuadratureConfig(truncation=21.0))
        far = fbf_eval("+", 1.0, h, bm, QuadratureConfig(truncation=40.0))
        assert abs(near - far) <= tail_bound(1.0, h, bm, QuadratureConfig(truncation=21.0))


@pytest.mark.xfail(strict=True, reason="bound is far above tail_tol at desk-scale U")
def test_tail_bound_below_tolerance(bm21):
    q = QuadratureConfig()
    for h in (0.2, 0.5, 0.7, 0.9):
        assert tail_bound(1.0, h, bm21, q) <= q.tail_tol


def test_errors(bm21):
    with pytest.raises(DomainError):
        fbf_eval("x", 0.5, 0.5, bm21, Q)
    with pytest.raises(DomainError):
        fbf_eval("+", 0.5, 1.0, bm21, Q)
    with pytest.raises(SupportError):
        fbf_eval("+", 0.5, 0.3, bm21, QuadratureConfig(truncation=30.0))
    with pytest.raises(GridAlignmentError):
        fbf_eval("+", 0.5, 0.3, bm21, QuadratureConfig(truncation=20.0, anchor_offset=1e-4))
    with pytest.raises(DomainError):
        mbm_sample(TimeGrid(0.0, 1.0, 0.25), const(0.3), 0.0, 0.0, bm21, Q)
    with pytest.raises(DomainError):
        field_weights("+", 0.5, 0.3, bm21.grid, Q, form="integrated")
