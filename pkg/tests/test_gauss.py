import numpy as np
import pytest

from mbmlab.exceptions import DomainError, StatisticsError
from mbmlab.field import QuadratureConfig
from mbmlab.gauss import (CovMatrix, cond_var, empirical_cov, exact_cov, incr_var_check,
                          lnd_slope, mbm_ensemble, mbm_weights)
from mbmlab.hurst import build_hurst
from mbmlab.noise import TimeGrid
from mbmlab.parallel import task_seeds

STEP = 2.0 ** -8


def const(h):
    return build_hurst("constant", {"h": h})


def ensemble(h, times, n=400, master=1):
    U = 20.0 + max(abs(t) for t in times)
    grid = TimeGrid.symmetric(U, STEP)
    w = mbm_weights(times, const(h), 1.0, 0.0, grid, QuadratureConfig(truncation=U))
    return w, grid, mbm_ensemble(w, grid, task_seeds(master, n))


@pytest.fixture(scope="module")
def bm_cov():
    _, _, X = ensemble(0.5, [0.5, 1.0], n=600)
    return empirical_cov(X, [0.5, 1.0])


def test_brownian_covariance(bm_cov):
    assert bm_cov.entries[0, 1] == pytest.approx(0.5, abs=0.1)
    assert bm_cov.var(1) == pytest.approx(1.0, abs=0.15)
    assert np.all(np.diag(bm_cov.entries) >= 0)
    assert bm_cov.incr_var(0, 1) == pytest.approx(0.5, abs=0.1)


def test_monte_carlo_matches_exact_covariance():
    w, grid, X = ensemble(0.7, [0.5, 1.0, 1.5], n=600)
    E = exact_cov(w, grid)
    C = empirical_cov(X).entries
    assert np.max(np.abs(C - E)) <= 0.15 * np.max(np.abs(E))


def test_exact_covariance_of_brownian():
    w, grid, _ = ensemble(0.5, [0.5, 1.0], n=1)
    E = exact_cov(w, grid)
    assert np.allclose(E, [[0.5, 0.5], [0.5, 1.0]], atol=1e-12)


def test_constant_paths_have_zero_covariance():
    C = empirical_cov(np.ones((150, 3)))
    assert np.allclose(C.entries, 0.0)


def test_psd_projection_is_small():
    X = np.random.default_rng(2).standard_normal((120, 4))
    X[:, 3] = X[:, 0] - X[:, 1]
    C = empirical_cov(X)
    Xc = X - X.mean(axis=0)
    raw = Xc.T @ Xc / (X.shape[0] - 1)
    assert np.max(np.abs(C.entries - raw)) <= 1e-8
    assert np.linalg.eigvalsh(C.entries).min() >= -1e-12


def test_cond_var_cases(bm_cov):
    assert cond_var(bm_cov, 0, []) == pytest.approx(bm_cov.var(0))
    assert cond_var(bm_cov, 1, [1]) == pytest.approx(0.0, abs=1e-12)
    # Var(B_1 | B_0.5) = 0.5
    assert cond_var(bm_cov, 1, [0]) == pytest.approx(0.5, abs=0.1)


def test_conditioning_decreases_variance():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((6, 6))
    E = A @ A.T
    single = [cond_var(E, 0, [k]) for k in range(1, 6)]
    nested = [cond_var(E, 0, list(range(1, k + 1))) for k in range(1, 6)]
    assert np.all(np.diff(nested) <= 1e-12)
    assert nested[-1] <= min(single) + 1e-12
    assert CovMatrix(np.arange(6.0), E).var(2) == E[2, 2]


@pytest.mark.parametrize("h", [0.3, 0.7])
def test_lnd_constant_slope(h):
    radii = 2.0 ** -np.arange(3, 8)
    r = lnd_slope(const(h), 1.0, radii, task_seeds(3, 400), STEP * 2.0 ** -2, exact=True)
    assert r.slope == pytest.approx(2 * h, abs=0.15)
    # exact conditional variances follow the same power law
    ex = np.polyfit(np.log(r.radii), np.log(r.exact_cond_vars), 1)[0]
    assert ex == pytest.approx(2 * h, abs=0.1)


def test_lnd_fit_window():
    radii = 2.0 ** -np.arange(3, 8)
    seeds = task_seeds(4, 300)
    full = lnd_slope(const(0.5), 1.0, radii, seeds, 2.0 ** -10)
    part = lnd_slope(const(0.5), 1.0, radii, seeds, 2.0 ** -10, fit_window=(2.0 ** -6, 2.0 ** -3))
    assert part.slope == pytest.approx(full.slope, abs=0.05)


def test_lnd_oscillating_bounded():
    H = build_hurst("chirp-hurst", {"center": 1.0, "radius": 0.2})
    radii = 2.0 ** -np.arange(3, 8)
    r = lnd_slope(H, 1.0, radii, task_seeds(6, 300), 2.0 ** -10)
    assert r.slope <= 2 * float(H(1.0)) + 0.3
    assert np.allclose(H(r.points), H(1.0))


def test_incr_var_ratio_bounded():
    H = build_hurst("smooth-sine", {"center": 0.6, "amp": 0.1})
    lo, hi = incr_var_check(H, 0.5, 0.1, task_seeds(7, 200), n_probes=6, noise_step=2.0 ** -10)
    assert lo > 0 and hi / lo <= 10


def test_errors(bm_cov):
    with pytest.raises(StatisticsError):
        empirical_cov(np.zeros((50, 2)))
    with pytest.raises(StatisticsError):
        empirical_cov(np.zeros((200, 21)))
    with pytest.raises(StatisticsError):
        empirical_cov(np.zeros(200))
    with pytest.raises(DomainError):
        cond_var(bm_cov, 5, [])
    with pytest.raises(DomainError):
        mbm_weights([1.0], const(0.5), 0.0, 0.0, TimeGrid.symmetric(2.0, STEP))
