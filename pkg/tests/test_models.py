import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from resdens import (ARMA, ARMA_GARCH, GARCH, GAUSSIAN, STD_STUDENT_T,
                     STUDENT_T, InnovationSpec, ModelSpec, RngStream,
                     ThetaVector, check_orders, filter_series,
                     forgetting_diagnostic, simulate, unconditional_moments)
from conftest import random_model


def ar1_spec(innov=None):
    innov = innov or InnovationSpec(GAUSSIAN)
    return (ModelSpec(ARMA, p=1, innovation=innov),
            ThetaVector(eta=0.0, ar=[0.5], alpha=[1.0]))


def garch11_spec(innov=None):
    innov = innov or InnovationSpec(GAUSSIAN)
    return (ModelSpec(GARCH, garch_p=1, garch_q=1, innovation=innov),
            ThetaVector(eta=0.0, alpha=[0.1, 0.1], beta=[0.8]))


# ---------------------------------------------------------------- ThetaVector

def test_theta_rejects_negative_alpha0():
    with pytest.raises(ValueError):
        ThetaVector(eta=0.0, alpha=[-1.0])
    with pytest.raises(ValueError):
        ThetaVector(eta=0.0, alpha=[0.0])


def test_theta_rejects_beta_sum_at_one():
    with pytest.raises(ValueError):
        ThetaVector(eta=0.0, alpha=[0.1, 0.1], beta=[1.0])
    with pytest.raises(ValueError):
        ThetaVector(eta=0.0, alpha=[0.1, 0.1], beta=[0.5, 0.5])


def test_theta_rejects_unit_root_ar():
    with pytest.raises(ValueError):
        ThetaVector(eta=0.0, ar=[1.0])
    with pytest.raises(ValueError):
        ThetaVector(eta=0.0, ar=[1.2])
    # second-order pair with a root inside the disc
    with pytest.raises(ValueError):
        ThetaVector(eta=0.0, ar=[0.5, 0.6])


def test_theta_rejects_unit_root_ma():
    with pytest.raises(ValueError):
        ThetaVector(eta=0.0, ma=[-1.0])


def test_theta_accepts_stationary_values():
    th = ThetaVector(eta=1.0, ar=[0.5, 0.2], ma=[0.3], alpha=[0.2, 0.05], beta=[0.9])
    assert th.variance_floor == pytest.approx(0.2 / 0.1)


def test_model_spec_family_order_consistency():
    with pytest.raises(ValueError):
        ModelSpec(ARMA, p=1, garch_p=1)
    with pytest.raises(ValueError):
        ModelSpec(GARCH, p=1, garch_p=1, garch_q=1)
    with pytest.raises(ValueError):
        ModelSpec(ARMA, p=11)
    with pytest.raises(ValueError):
        ModelSpec("egarch")


def test_check_orders_mismatch():
    spec = ModelSpec(ARMA, p=2)
    with pytest.raises(ValueError):
        check_orders(spec, ThetaVector(eta=0.0, ar=[0.5]))


# ----------------------------------------------------------------- simulate

def test_reconstruction_identity_all_families(rng):
    for k in range(12):
        spec, theta = random_model(rng)
        sim = simulate(spec, theta, 300, RngStream(100 + k, 0))
        gap = np.max(np.abs(sim.x - (sim.true_mean + sim.true_vol * sim.true_innov)))
        assert gap <= 1e-12


def test_simulated_garch_unit_second_moment():
    spec, theta = garch11_spec()
    sim = simulate(spec, theta, 10**6, RngStream(5, 0))
    assert np.mean(sim.x**2) == pytest.approx(1.0, abs=0.05)


def test_simulated_ar1_variance():
    spec, theta = ar1_spec()
    sim = simulate(spec, theta, 10**6, RngStream(6, 0))
    assert sim.x.var() == pytest.approx(4.0 / 3.0, abs=0.02)


def test_degenerate_model_matches_innovation_law():
    spec = ModelSpec(ARMA, innovation=InnovationSpec(STUDENT_T, 5.0))
    theta = ThetaVector(eta=2.0, alpha=[4.0])
    sim = simulate(spec, theta, 10**5, RngStream(7, 0))
    z = (sim.x - 2.0) / 2.0
    assert np.array_equal(z, sim.true_innov) or np.allclose(z, sim.true_innov, atol=1e-12)
    assert abs(z.mean()) < 0.02
    assert z.var() == pytest.approx(5.0 / 3.0, abs=0.06)


def test_volatility_floor_on_simulated_paths(rng):
    for k in range(8):
        spec, theta = random_model(rng)
        sim = simulate(spec, theta, 500, RngStream(200 + k, 0))
        floor = math.sqrt(theta.variance_floor)
        assert sim.true_vol.min() >= floor - 1e-12


def test_simulate_rejects_bad_sizes():
    spec, theta = ar1_spec()
    with pytest.raises(ValueError):
        simulate(spec, theta, 0, RngStream(1, 0))
    with pytest.raises(ValueError):
        simulate(spec, theta, 10, RngStream(1, 0), burn_in=-1)


def test_simulate_reproducible_across_calls():
    spec, theta = garch11_spec()
    a = simulate(spec, theta, 200, RngStream(9, 3))
    b = simulate(spec, theta, 200, RngStream(9, 3))
    assert np.array_equal(a.x, b.x)
    assert np.array_equal(a.true_vol, b.true_vol)


# ------------------------------------------------------------------- filter

def test_constant_model_filter_is_flat():
    spec = ModelSpec(ARMA)
    theta = ThetaVector(eta=1.5, alpha=[2.25])
    x = np.array([0.3, 1.1, -0.7, 2.4, 0.0])
    fo = filter_series(spec, theta, x)
    np.testing.assert_allclose(fo.mbar, 1.5)
    np.testing.assert_allclose(fo.sbar, 1.5)
    np.testing.assert_allclose(fo.resid * fo.sbar + fo.mbar, x, rtol=1e-14)


def test_ar1_filter_inverts_simulation_from_second_step():
    spec, theta = ar1_spec(InnovationSpec(STUDENT_T, 5.0))
    sim = simulate(spec, theta, 400, RngStream(11, 0))
    fo = filter_series(spec, theta, sim.x)
    np.testing.assert_allclose(fo.resid[1:], sim.true_innov[1:], rtol=1e-11, atol=1e-13)
    # presample only contaminates the first value
    assert fo.resid[0] != pytest.approx(sim.true_innov[0], abs=1e-6)


def test_filter_reconstruction_identity(rng):
    for k in range(10):
        spec, theta = random_model(rng)
        sim = simulate(spec, theta, 300, RngStream(300 + k, 0))
        fo = filter_series(spec, theta, sim.x)
        np.testing.assert_allclose(fo.resid * fo.sbar + fo.mbar, sim.x,
                                   rtol=0, atol=1e-12)


def test_filter_volatility_floor(rng):
    for k in range(10):
        spec, theta = random_model(rng)
        sim = simulate(spec, theta, 300, RngStream(400 + k, 0))
        fo = filter_series(spec, theta, sim.x)
        assert fo.sbar.min() >= math.sqrt(theta.variance_floor) - 1e-12


def test_filter_residuals_recover_innovation_moments():
    # at the true parameter the filtered residuals behave like the innovations
    spec, theta = garch11_spec(InnovationSpec(STD_STUDENT_T, 5.0))
    sim = simulate(spec, theta, 10**5, RngStream(12, 0))
    fo = filter_series(spec, theta, sim.x)
    assert abs(fo.resid.mean()) < 0.02
    assert fo.resid.var() == pytest.approx(1.0, abs=0.02)

    spec, theta = ar1_spec()
    sim = simulate(spec, theta, 10**5, RngStream(13, 0))
    fo = filter_series(spec, theta, sim.x)
    assert abs(fo.resid.mean()) < 0.02
    assert fo.resid.var() == pytest.approx(1.0, abs=0.02)


def test_filter_too_short_series():
    spec = ModelSpec(GARCH, garch_p=1, garch_q=1)
    theta = ThetaVector(eta=0.0, alpha=[0.1, 0.1], beta=[0.8])
    with pytest.raises(ValueError):
        filter_series(spec, theta, np.array([1.0]))


def test_filter_rejects_nonfinite():
    spec, theta = ar1_spec()
    with pytest.raises(ValueError):
        filter_series(spec, theta, np.array([1.0, np.nan, 0.5]))


def test_garch_initialization_gap_contracts_at_beta_rate():
    # two variance initializations differ by beta^(t-1) times the initial gap
    spec, theta = garch11_spec()
    sim = simulate(spec, theta, 150, RngStream(14, 0))
    v = float(sim.x.var())
    a = filter_series(spec, theta, sim.x, presample_var=v)
    b = filter_series(spec, theta, sim.x, presample_var=2.0 * v)
    gap = np.abs(a.sbar**2 - b.sbar**2)
    bound = gap[0] * 0.8 ** np.arange(150)
    # absolute slack covers float rounding once the gap has shrunk ~14 orders
    assert np.all(gap <= bound * (1.0 + 1e-9) + 1e-12 * gap[0])
    # the recursion is affine in the initial state, so the bound is tight
    np.testing.assert_allclose(gap[:60], bound[:60], rtol=1e-9)


# --------------------------------------------------- forgetting diagnostic

def test_forgetting_garch_beta08_ratio():
    spec, theta = garch11_spec()
    sim = simulate(spec, theta, 200, RngStream(15, 0))
    d = forgetting_diagnostic(spec, theta, sim.x, t_max=120)
    assert d[99] / d[0] <= 1e-9


def test_forgetting_pure_ar_dies_after_p_steps():
    spec, theta = ar1_spec()
    sim = simulate(spec, theta, 50, RngStream(16, 0))
    d = forgetting_diagnostic(spec, theta, sim.x)
    assert d[0] > 0
    assert np.all(d[1:] == 0.0)


def test_forgetting_constant_model_is_zero():
    spec = ModelSpec(ARMA)
    theta = ThetaVector(eta=0.0, alpha=[1.0])
    d = forgetting_diagnostic(spec, theta, np.array([0.4, -0.2, 1.0, 0.1]))
    assert np.all(d == 0.0)


def test_forgetting_log_slope_matches_feedback():
    # log d_t decays with slope close to log(beta) for a GARCH(1,1)
    spec, theta = garch11_spec()
    sim = simulate(spec, theta, 300, RngStream(17, 0))
    d = forgetting_diagnostic(spec, theta, sim.x, t_max=80)
    t = np.arange(10, 80)
    slope = np.polyfit(t, np.log(d[10:80]), 1)[0]
    assert slope <= math.log(0.8) + 0.05


# ------------------------------------------------------------------ moments

def test_moments_ar1():
    spec, theta = ar1_spec()
    mom = unconditional_moments(spec, theta)
    assert mom.mean == 0.0
    assert mom.variance == pytest.approx(4.0 / 3.0)


def test_moments_garch11_unit_variance():
    spec, theta = garch11_spec()
    mom = unconditional_moments(spec, theta)
    assert mom.variance == pytest.approx(1.0)


def test_moments_white_noise():
    spec = ModelSpec(ARMA)
    theta = ThetaVector(eta=0.0, alpha=[1.0])
    assert unconditional_moments(spec, theta).variance == pytest.approx(1.0)


def test_moments_absent_when_integrated():
    spec = ModelSpec(GARCH, garch_p=1, garch_q=1)
    theta = ThetaVector(eta=0.0, alpha=[0.1, 0.25], beta=[0.75])
    assert unconditional_moments(spec, theta).variance is None


def test_moments_absent_for_infinite_innovation_variance():
    spec = ModelSpec(ARMA, p=1, innovation=InnovationSpec(STUDENT_T, 2.0))
    theta = ThetaVector(eta=0.0, ar=[0.5], alpha=[1.0])
    assert unconditional_moments(spec, theta).variance is None


# --------------------------------------------------------------- properties

@settings(max_examples=25, deadline=None)
@given(st.floats(-0.9, 0.9), st.integers(0, 2**32 - 1))
def test_ar1_filter_location_shift_property(a, seed):
    # shifting the data and eta by the same constant shifts mbar and leaves
    # the residuals unchanged up to the rounding of x + shift
    if abs(a) < 1e-3:
        a = 0.25
    spec = ModelSpec(ARMA, p=1)
    theta0 = ThetaVector(eta=0.0, ar=[a], alpha=[1.0])
    sim = simulate(spec, theta0, 120, RngStream(seed, 0))
    shift = 4.0
    theta1 = ThetaVector(eta=shift, ar=[a], alpha=[1.0])
    f0 = filter_series(spec, theta0, sim.x)
    f1 = filter_series(spec, theta1, sim.x + shift)
    np.testing.assert_allclose(f0.resid, f1.resid, rtol=0, atol=1e-12)
    np.testing.assert_allclose(f1.mbar - f0.mbar, shift, rtol=0, atol=1e-12)
