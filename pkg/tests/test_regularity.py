import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mbmlab.exceptions import EstimationError
from mbmlab.hurst import build_hurst, fbm_frontier
from mbmlab.noise import TimeGrid, derive_seed, gen_fbm
from mbmlab.regularity import (Sampled, as_sampled, default_sprime_grid, detect_multiplicity,
                               est_exponents, est_frontier, pair_sups, predict_frontier_mbm,
                               predict_pointwise_mbm, project_frontier)

N16 = 2.0 / 2 ** 16


def fbm_sampled(h, seed, step=N16):
    p = gen_fbm(TimeGrid.symmetric(1.0, step), h, seed)
    return Sampled(-1.0, step, p.values)


@pytest.fixture(scope="module")
def fbm_runs():
    out = []
    for k in range(8):
        fs = fbm_sampled(0.3, derive_seed(17, k))
        out.append((est_exponents(fs, 0.0), est_frontier(fs, 0.0)))
    return out


def test_linear_is_capped():
    g = TimeGrid.symmetric(1.0, 2.0 ** -12)
    e = est_exponents(lambda x: x, 0.0, grid=g)
    assert e.pointwise_capped and e.local_capped
    assert e.pointwise == 1.0 and e.local == 1.0


def test_fbm_exponents(fbm_runs):
    pw = np.mean([e.pointwise for e, _ in fbm_runs])
    loc = np.mean([e.local for e, _ in fbm_runs])
    assert abs(pw - 0.3) <= 0.1 and abs(loc - 0.3) <= 0.1


def test_fbm_frontier(fbm_runs):
    sp = default_sprime_grid()
    sig = np.mean([f.sigma for _, f in fbm_runs], axis=0)
    m = (sp >= -0.3 - 1e-9) & (sp <= 1.0 + 1e-9)
    assert np.max(np.abs(sig - np.minimum(sp + 0.3, 0.3))[m]) <= 0.1


def test_chirp_exponents(chirp_fine):
    e = est_exponents(chirp_fine, 0.0)
    assert abs(e.pointwise - 0.5) <= 0.1
    assert abs(e.local - 0.25) <= 0.1


def test_chirp_frontier(chirp_fine):
    fr = est_frontier(chirp_fine, 0.0)
    m = (fr.sprime >= -0.5 - 1e-9) & (fr.sprime <= 1.0 + 1e-9)
    assert np.max(np.abs(fr.sigma - (fr.sprime + 0.5) / 2.0)[m]) <= 0.1


def test_constant_frontier_at_cap():
    fs = Sampled(-1.0, 2.0 ** -12, np.full(2 ** 13 + 1, 3.0))
    fr = est_frontier(fs, 0.0)
    assert np.all(fr.sigma == 1.0)
    assert est_exponents(fs, 0.0).pointwise == 1.0


def _targets(chirp_fine):
    x = np.linspace(-1.0, 1.0, 2 ** 16 + 1)
    from mbmlab.hurst import weierstrass_raw

    return [("chirp", chirp_fine), ("fbm", fbm_sampled(0.3, 5)),
            ("weierstrass", Sampled(-1.0, N16, weierstrass_raw(x, 0.4, 2.0, 60)))]


def test_exponent_frontier_consistency(chirp_fine):
    for name, fs in _targets(chirp_fine):
        e = est_exponents(fs, 0.0)
        fr = est_frontier(fs, 0.0)
        assert abs(e.local - fr.local_exp()) <= 0.1, name
        assert abs(e.pointwise - fr.pointwise_exp()) <= 0.15, name


def test_frontier_below_local_liminf(chirp_fine):
    # local exponents of the chirp on a shrinking sequence of points near 0
    ts = [2.0 ** -k for k in range(3, 7)]
    liminf = min(est_exponents(chirp_fine, t, rho=t / 2).local for t in ts)
    fr = est_frontier(chirp_fine, 0.0)
    assert np.all(fr.sigma <= liminf + 0.15 + 1e-12) or np.all(
        fr.sigma[fr.sprime <= 0.0] <= liminf + 0.15)


@given(y=arrays(np.float64, 61, elements=st.floats(-2.0, 3.0)))
@settings(max_examples=25, deadline=None)
def test_projection_shape(y):
    sp = default_sprime_grid()
    sig = project_frontier(sp, y)
    d = np.diff(sig) / np.diff(sp)
    assert np.all(np.diff(sig) >= -1e-7)
    assert np.all(np.diff(d) <= 1e-6)
    assert np.all(d >= -1e-6) and np.all(d <= 1 + 1e-6)
    assert np.all(sig <= 1.0 + 1e-12)


def test_projection_keeps_admissible_curves():
    sp = default_sprime_grid()
    y = np.minimum(sp + 0.3, 0.3)
    assert np.max(np.abs(project_frontier(sp, y) - y)) < 1e-6


def test_estimated_frontiers_have_frontier_shape(fbm_runs, chirp_fine):
    for fr in [f for _, f in fbm_runs] + [est_frontier(chirp_fine, 0.0)]:
        assert fr.is_nondecreasing(1e-7) and fr.is_concave(1e-6) and fr.slopes_in_unit(1e-6)


# ---------------------------------------------------------------- predictions


def test_predict_example_one():
    sp = default_sprime_grid()
    sig_h = fbm_frontier(0.375)
    lower, exact = predict_frontier_mbm(0.6, sig_h, 1, sp)
    assert exact
    assert np.allclose(lower.sigma, np.minimum(sp + 0.375, 0.375))
    lower, exact = predict_frontier_mbm(0.6, sig_h, 2, sp)
    assert not exact
    assert np.allclose(lower.sigma, np.minimum(sp + 0.6, 0.375))


def test_predict_example_two():
    sp = default_sprime_grid()
    H = build_hurst("chirp-hurst")
    lower, _ = predict_frontier_mbm(0.75, lambda s: H.meta.frontier(s, 0.0), np.inf, sp)
    expected = np.minimum(np.minimum(sp + 0.75, sp / 3 + 7 / 12), 0.75)
    assert np.allclose(lower.sigma, expected)


def test_predict_pointwise():
    assert predict_pointwise_mbm(0.6, 0.375, 1) == 0.375
    assert predict_pointwise_mbm(0.6, 0.375, 2) == 0.6
    assert predict_pointwise_mbm(0.25, np.inf, 1) == 0.25
    assert predict_pointwise_mbm(0.6, 0.375, np.inf) == 0.6


@given(h=st.floats(0.05, 0.95), a=st.floats(0.05, 0.95), m=st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_prediction_is_a_frontier(h, a, m):
    lower, _ = predict_frontier_mbm(h, fbm_frontier(a), m)
    s = lower.sigma[np.isfinite(lower.sigma)]
    assert np.all(np.diff(s) >= -1e-12)
    assert lower.local_exp() == pytest.approx(min(h, a))


def test_detect_multiplicity():
    assert detect_multiplicity([1.0, 0.5, 0.0, 0.0]) == 1
    assert detect_multiplicity([1.0, 1e-9, 0.2, 0.0]) == 2
    assert detect_multiplicity([1.0, 0.0, 0.0, 0.0]) == np.inf
    assert detect_multiplicity([1.0, 1e-4, 1e-9, 1e-9], scale=0.05) == 1


# ---------------------------------------------------------------- plumbing


def test_as_sampled_forms():
    x = np.linspace(0.0, 1.0, 9)
    a = as_sampled((x, x ** 2))
    assert a.step == pytest.approx(0.125) and a.x0 == 0.0
    with pytest.raises(EstimationError):
        as_sampled((np.array([0.0, 0.1, 0.3]), np.zeros(3)))
    with pytest.raises(EstimationError):
        as_sampled(lambda u: u)


def test_too_few_scales():
    fs = Sampled(-1.0, 2.0 ** -6, np.random.default_rng(0).standard_normal(129))
    with pytest.raises(EstimationError) as info:
        est_exponents(fs, 0.0)
    assert info.value.n_scales is not None


def test_pair_sups_shape(chirp_fine):
    S = pair_sups(chirp_fine, 0.0, np.arange(1, 5), np.arange(3, 8))
    assert S.shape == (4, 5)
