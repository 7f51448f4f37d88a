import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mbmlab.exceptions import DomainError, ScaleError
from mbmlab.fractal import (ScaleTable, box_count, dim_bounds_from_frontier, est_boxdim_local,
                            est_pboxdim_local, level_set_boxdim, level_set_count,
                            parabolic_transfer_bounds, pbox_count, predict_boxdim_graph,
                            predict_hausdim_graph, predict_image_dim, scale_table)
from mbmlab.hurst import build_chirp, weierstrass_raw
from mbmlab.noise import TimeGrid, derive_seed, gen_brownian, gen_fbm
from mbmlab.regularity import Sampled, est_frontier


def sampled(fn, half=1.0, step=2.0 ** -16):
    x = TimeGrid.symmetric(half, step).points
    return Sampled(float(x[0]), step, fn(x))


def test_zero_function_count():
    f = sampled(np.zeros_like)
    assert box_count(f, (0.0, 1.0), 1 / 32) == 32
    assert pbox_count(f, (0.0, 1.0), 0.5, 1 / 4) == 16


def test_line_and_smooth():
    assert est_boxdim_local(sampled(lambda x: x), 0.0).value == pytest.approx(1.0, abs=0.05)
    assert est_boxdim_local(sampled(np.sin), 0.3).value == pytest.approx(1.0, abs=0.05)


def test_chirp_boxdim():
    step = 2.0 ** -21
    fb = sampled(build_chirp(0.5, 1.0), half=0.125, step=step)
    assert est_boxdim_local(fb, 0.0, 0.1, (11, 17)).value == pytest.approx(1.25, abs=0.1)


def test_weierstrass_boxdim():
    f = sampled(lambda x: weierstrass_raw(x, 0.4, 2.0, 60))
    assert est_boxdim_local(f, 0.2).value == pytest.approx(1.6, abs=0.1)


def test_fbm_boxdim():
    step = 2.0 ** -15
    vals = [est_boxdim_local(gen_fbm(TimeGrid.symmetric(0.5, step), 0.3, derive_seed(3, k)),
                             0.0).value for k in range(6)]
    assert np.mean(vals) == pytest.approx(1.7, abs=0.15)


def test_dim_estimate_brackets():
    d = est_boxdim_local(sampled(lambda x: weierstrass_raw(x, 0.4, 2.0, 60)), 0.2)
    assert d.lower <= d.value <= d.upper
    assert 0.9 <= d.fit_r2 <= 1.0


def test_segment_parabolic_dimension():
    f = sampled(np.zeros_like, half=0.5, step=2.0 ** -18)
    assert est_pboxdim_local(f, 0.0, 0.5).value == pytest.approx(2.0, abs=0.05)


def test_fbm_parabolic_dimension():
    # rho_h dimension of an a-fBm graph: max(1/h, 1 + (1 - a)/h)
    step = 2.0 ** -18
    for a, h in [(0.3, 0.6), (0.7, 0.5)]:
        vals = [est_pboxdim_local(gen_fbm(TimeGrid.symmetric(0.5, step), a, derive_seed(9, k)),
                                  0.0, h).value for k in range(4)]
        assert np.mean(vals) == pytest.approx(max(1 / h, 1 + (1 - a) / h), abs=0.2)


def test_parabolic_sandwich_on_weierstrass():
    f = sampled(lambda x: weierstrass_raw(x, 0.4, 2.0, 60), half=0.5, step=2.0 ** -18)
    d1 = est_pboxdim_local(f, 0.2, 0.8).value
    d2 = est_pboxdim_local(f, 0.2, 0.6).value
    lo, hi = parabolic_transfer_bounds(d2, 0.8, 0.6)
    assert lo - 0.1 <= d1 <= hi + 0.1


def test_level_sets():
    f = sampled(lambda x: x)
    assert level_set_boxdim(f, 0.0, (-0.5, 0.5)).value == pytest.approx(0.0, abs=0.05)
    miss = level_set_boxdim(f, 5.0, (-0.5, 0.5))
    assert miss.empty and miss.value == 0.0
    assert level_set_count(f, 0.0, (-0.5, 0.5), 1 / 16) in (1, 2)


def test_brownian_zero_set():
    vals = [level_set_boxdim(gen_brownian(TimeGrid.symmetric(1.0, 2.0 ** -16), derive_seed(4, k)),
                             0.0, (0.0, 1.0)).value for k in range(12)]
    assert np.mean(vals) == pytest.approx(0.5, abs=0.15)


@given(seed=st.integers(0, 2 ** 31), k=st.integers(2, 9))
@settings(max_examples=20, deadline=None)
def test_counts_monotone_in_delta(seed, k):
    y = np.cumsum(np.random.default_rng(seed).standard_normal(2 ** 12 + 1)) * 2.0 ** -6
    f = Sampled(0.0, 2.0 ** -12, y)
    coarse = box_count(f, (0.0, 1.0), 2.0 ** -k)
    fine = box_count(f, (0.0, 1.0), 2.0 ** -(k + 1))
    assert fine >= coarse
    assert coarse >= 2 ** k


def test_scale_table_validation():
    with pytest.raises(ScaleError):
        ScaleTable(np.array([0.1, 0.2]), np.array([1, 2]))
    with pytest.raises(ScaleError):
        ScaleTable(np.array([0.2, 0.1]), np.array([0, 2]))
    t = scale_table(sampled(lambda x: x), (0.0, 0.5), (4, 9))
    assert np.all(np.diff(t.deltas) < 0)


def test_predictions():
    assert predict_boxdim_graph(0.6, 1.625) == 1.625
    assert predict_boxdim_graph(0.2, 1.5) == pytest.approx(1.8)
    assert predict_hausdim_graph(0.5, 2.0) == 1.5
    assert predict_image_dim(1.7) == 1.0
    assert predict_image_dim(0.4) == 0.4
    assert parabolic_transfer_bounds(2.0, 0.8, 0.5) == pytest.approx((1.25, 1.625))
    assert dim_bounds_from_frontier(0.75, 1.2) == pytest.approx((1.25, 1.0))


def test_frontier_bounds_dominate_box_estimate():
    fs = sampled(lambda x: weierstrass_raw(x, 0.4, 2.0, 60))
    fr = est_frontier(fs, 0.2)
    box_up, _ = dim_bounds_from_frontier(float(fr(1.0)), float(fr.sigma[-1]))
    assert est_boxdim_local(fs, 0.2).value <= box_up + 0.1


def test_domain_errors():
    with pytest.raises(DomainError):
        predict_boxdim_graph(0.5, 2.5)
    with pytest.raises(DomainError):
        predict_hausdim_graph(0.5, 0.5)
    with pytest.raises(DomainError):
        parabolic_transfer_bounds(1.5, 0.4, 0.6)
    with pytest.raises(DomainError):
        pbox_count(sampled(np.zeros_like), (0.0, 1.0), 1.5, 0.1)
