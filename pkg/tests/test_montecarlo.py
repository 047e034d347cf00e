import math

import numpy as np
import pytest
from scipy.stats import binom

from afcs import theory
from afcs.montecarlo import (
    db_grid, draw_trials, empirical_rates, oracle_errors, oracle_tolerance, run_trials, simulate_draws,
    sweep_efficiency,
)
from afcs.params import derive

from conftest import make_config


def binomial_band(M, p, level=0.99):
    tail = (1 - level) / 2
    return binom.ppf(tail, M, p) / M, binom.ppf(1 - tail, M, p) / M


def test_zero_draws_give_zero_error():
    cfg = make_config(3.0, x0=0.7, n_cycles=6)
    d = derive(cfg)
    prof = theory.build_profile(d, cfg)
    stats = simulate_draws(cfg, prof, d, np.zeros(50), np.zeros((50, 6, 2)))
    assert np.all(stats.P_hat == 0.0)
    assert np.all(stats.sat_rate == 0.0)
    # zero MSE means unbounded information: infinite rate, zero energy per bit
    assert np.all(np.isinf(stats.R_hat))
    assert np.all(stats.Ebit_hat == 0.0)


def test_geometric_case_matches_recursion():
    # saturation made negligible so only sampling error remains
    cfg = make_config(1.0, sigma_v_sq=0.0, sigma0_sq=1.0, mu=1e-4, n_cycles=5)
    stats = run_trials(cfg, M=5000)
    P = 2.0 ** -np.arange(1, 6)
    assert np.all(np.abs(stats.P_hat - P) <= 3 * math.sqrt(2 / 5000) * P)


def test_saturation_rate_mu_005():
    cfg = make_config(3.0, sigma_v_sq=1e-4, mu=0.05, n_cycles=10)
    stats = run_trials(cfg, M=5000)
    lo, hi = binomial_band(5000, 0.05)
    # first cycle: residual exactly Gaussian with the variance the index assumes
    assert lo <= stats.sat_rate[0] <= hi
    # later cycles inherit clipping errors from earlier ones: the bias is upward only
    assert np.all(stats.sat_rate >= lo)
    assert stats.sat_rate.mean() > 0.05


def test_first_cycle_exceedance_is_mu():
    cfg = make_config(3.0, sigma_v_sq=0.0, mu=0.2, n_cycles=1)
    stats = run_trials(cfg, M=20000)
    lo, hi = binomial_band(20000, 0.2)
    assert lo <= stats.sat_rate[0] <= hi


def test_reproducible_and_seed_sensitive():
    cfg = make_config(3.0, n_cycles=8)
    a = run_trials(cfg, M=300, master_seed=4)
    b = run_trials(cfg, M=300, master_seed=4)
    c = run_trials(cfg, M=300, master_seed=5)
    for field in ("P_hat", "sat_rate", "R_hat", "Ebit_hat", "tx_power"):
        np.testing.assert_array_equal(getattr(a, field), getattr(b, field))
    assert not np.array_equal(a.P_hat, c.P_hat)


def test_trial_streams_are_prefix_stable():
    # trial m's draws depend only on (seed, m), not on M
    cfg = make_config(3.0, n_cycles=4)
    d = derive(cfg)
    prof = theory.build_profile(d, cfg)
    z_small, noise_small = draw_trials(10, 4, 9)
    z_big, noise_big = draw_trials(40, 4, 9)
    np.testing.assert_array_equal(z_small, z_big[:10])
    np.testing.assert_array_equal(noise_small, noise_big[:10])
    # aggregation does not depend on trial order
    perm = np.random.default_rng(0).permutation(40)
    s1 = simulate_draws(cfg, prof, d, z_big, noise_big)
    s2 = simulate_draws(cfg, prof, d, z_big[perm], noise_big[perm])
    np.testing.assert_allclose(s1.P_hat, s2.P_hat, rtol=1e-15)


def test_run_trials_requires_a_trial():
    with pytest.raises(ValueError):
        run_trials(make_config(3.0), M=0)


@pytest.mark.parametrize("q, ratio", [(3.0, 1e4), (10.0, 1e5), (0.5, 1e3)])
def test_oracle_equivalence_small_mu(q, ratio):
    cfg = make_config(q, sigma0_sq=1.0, sigma_v_sq=1 / ratio, mu=1e-3, n_cycles=20)
    d = derive(cfg)
    prof = theory.build_profile(d, cfg)
    stats = run_trials(cfg, prof, 5000, derived=d)
    assert np.all(oracle_errors(stats, prof) <= oracle_tolerance(5000, cfg.mu))


def test_unsaturated_trials_follow_recursion(acceptance_run):
    # at mu = 0.01 the excess MSE comes from trials that clipped at least once
    cfg, d, prof, stats = acceptance_run
    P = prof.P[1:]
    assert np.all(np.abs(stats.P_hat_unsat - P) / P <= 3 * math.sqrt(2 / 5000))


def test_empirical_mse_non_increasing(acceptance_run):
    _, _, _, stats = acceptance_run
    slack = 1 + 5 * math.sqrt(2 / 5000)
    assert np.all(stats.P_hat[1:] <= stats.P_hat[:-1] * slack)


def test_empirical_tradeoff_identity(acceptance_run):
    cfg, d, _, stats = acceptance_run
    np.testing.assert_allclose(stats.R_hat / cfg.F0 * stats.Ebit_hat, d.Q_sq, rtol=1e-12)


def test_empirical_rates_nan_without_information():
    cfg = make_config(3.0, sigma0_sq=1.0)
    R, E = empirical_rates([1.2, 0.5], cfg, 3.0)
    assert np.isnan(R[0]) and np.isnan(E[0])
    assert R[1] == pytest.approx(cfg.F0 / 2) and E[1] == pytest.approx(6.0)


def test_demodulated_moments_small_mu():
    cfg = make_config(3.0, sigma_v_sq=1e-4, mu=1e-3, n_cycles=20)
    d = derive(cfg)
    stats = run_trials(cfg, M=5000, derived=d)
    np.testing.assert_allclose(stats.tx_power, d.W, rtol=0.05)
    np.testing.assert_allclose(stats.y_sq_mean, d.W + d.sigma_zeta_sq, rtol=0.05)
    sd = math.sqrt(d.W + d.sigma_zeta_sq)
    assert np.all(np.abs(stats.y_mean) <= 4 * sd / math.sqrt(5000))


def test_db_grid():
    g = db_grid(-5, 25, 1)
    assert len(g) == 31 and g[0] == -5 and g[-1] == 25
    assert len(db_grid(0, 1, 0.25)) == 5


@pytest.fixture(scope="module")
def small_sweep():
    template = make_config(3.0, sigma0_sq=1.0, sigma_v_sq=1e-4, mu=1e-3)
    grid = 10 ** (np.array([-3.0, 5.0, 12.0, 20.0]) / 10)
    return sweep_efficiency(template, grid, (1, 10, 20), M=2000, master_seed=3)


def test_sweep_shapes(small_sweep):
    assert small_sweep.n_set == (1, 10, 20)
    for table in (small_sweep.ebit_theory, small_sweep.ebit_empirical,
                  small_sweep.rate_theory, small_sweep.rate_empirical):
        assert all(len(table[n]) == 4 for n in (1, 10, 20))


def test_sweep_n1_is_forward_efficiency(small_sweep):
    q = small_sweep.q_sq
    np.testing.assert_allclose(small_sweep.ebit_theory[1], q / np.log2(1 + q), rtol=1e-12)


def test_sweep_ebit_ordering(small_sweep):
    s = small_sweep
    above = s.n_star < 20
    assert np.all(s.ebit_theory[20][above] > s.ebit_theory[1][above])
    low = s.n_star < 10
    assert low.any()
    assert np.all(s.ebit_theory[20][low] >= s.ebit_theory[10][low])
    assert np.all(s.ebit_theory[10][low] >= s.ebit_theory[1][low])


def test_sweep_large_snr_rate(small_sweep):
    # at 20 dB n* < 2: one cycle already delivers the forward capacity
    i = 3
    assert small_sweep.n_star[i] >= 1
    expected = math.log2(1 + small_sweep.q_sq[i])
    tol = math.log2(1 + oracle_tolerance(2000, 1e-3))
    assert abs(small_sweep.rate_empirical[1][i] - expected) <= tol


def test_sweep_rejects_empty_grid():
    with pytest.raises(ValueError):
        sweep_efficiency(make_config(3.0), [], (1,))
