"""
Unit tests for the gain models, the concavity threshold and gain qualification.
"""

import numpy as np
import pytest

from src.channel.estimation import (
    CONDITIONED,
    EstimatorKind,
    estimate_peb_gain,
    peb_gain_mc,
    rician_covariance,
)
from src.channel.peb_gain import (
    AsymptoticGain,
    BroadcastGain,
    MonteCarloGain,
    RationalApproxGain,
    concavity_threshold,
    g_asymptotic,
    g_hat,
    g_hat_derivative,
    gamma_quantile,
    qualify_gain,
)
from src.channel.propagation import SPEED_OF_LIGHT, ChannelConfig, draw_channel


class TestRationalGain:
    """Closed-form LS beamforming gain."""

    def setup_method(self):
        self.sigma_h2 = 1e-6
        self.n = 32
        self.noise = 1e-12

    def test_zero_pilot_loses_array_gain(self):
        assert g_hat(self.sigma_h2, self.n, self.noise, 0.0) == pytest.approx(self.sigma_h2 / self.n)

    def test_large_pilot_reaches_ceiling(self):
        assert g_hat(self.sigma_h2, self.n, self.noise, 1e6) == pytest.approx(self.sigma_h2, rel=1e-6)

    def test_reference_value(self):
        assert g_hat(self.sigma_h2, self.n, self.noise, 0.1) == pytest.approx(9.9018e-7, rel=1e-3)

    def test_derivative_matches_central_difference(self):
        for p in np.logspace(-6, 0, 20):
            delta = 1e-5 * p
            numeric = (g_hat(self.sigma_h2, self.n, self.noise, p + delta)
                       - g_hat(self.sigma_h2, self.n, self.noise, p - delta)) / (2.0 * delta)
            analytic = g_hat_derivative(self.sigma_h2, self.n, self.noise, p)
            assert analytic == pytest.approx(numeric, rel=1e-6), f"Slope mismatch at P={p:g}"

    def test_single_antenna_is_flat(self):
        grid = np.logspace(-6, 1, 10)
        assert np.all(g_hat_derivative(self.sigma_h2, 1, self.noise, grid) == 0.0)

    def test_derivative_decreasing(self):
        grid = np.linspace(0.0, 1e-3, 100)
        slopes = g_hat_derivative(self.sigma_h2, self.n, self.noise, grid)
        assert np.all(np.diff(slopes) < 0.0), "The rational gain must be strictly concave"

    def test_model_wraps_closed_form(self):
        model = RationalApproxGain(self.sigma_h2, self.n, self.noise)
        assert model.gain(0.1) == g_hat(self.sigma_h2, self.n, self.noise, 0.1)
        assert model.derivative(0.1) == g_hat_derivative(self.sigma_h2, self.n, self.noise, 0.1)
        assert model.stderr(0.1) == 0.0
        assert model.backend == "rational"

    def test_curve_is_cached(self):
        model = RationalApproxGain(self.sigma_h2, self.n, self.noise)
        grid = np.logspace(-6, 0, 5)
        assert model.curve(grid) is model.curve(grid)


class TestAsymptoticGain:

    def setup_method(self):
        self.sigma_elem2 = 1e-8
        self.n = 512
        self.noise = 1e-12

    def test_limits(self):
        assert g_asymptotic(self.sigma_elem2, self.n, self.noise, 0.0) == 0.0
        assert g_asymptotic(self.sigma_elem2, self.n, self.noise, 1e9) == pytest.approx(
            self.n * self.sigma_elem2, rel=1e-6)

    def test_model_ceiling_and_slope(self):
        model = AsymptoticGain(self.sigma_elem2, self.n, self.noise)
        assert model.sigma_h2 == pytest.approx(self.n * self.sigma_elem2)
        p, delta = 0.01, 1e-8
        numeric = (model.gain(p + delta) - model.gain(p - delta)) / (2.0 * delta)
        assert model.derivative(p) == pytest.approx(numeric, rel=1e-6)

    def test_monte_carlo_agrees_at_large_array(self):
        distance = SPEED_OF_LIGHT / 915e6 / (4.0 * np.pi * 1e-4)
        cfg = ChannelConfig(n_antennas=self.n, rician_k=0.0, noise_power=self.noise, rng_seed=8)
        sigma_elem2 = cfg.path_gain(distance)
        assert sigma_elem2 == pytest.approx(1e-8, rel=1e-9)
        for p in (1e-2, 1e-1, 1.0):
            simulated = peb_gain_mc(EstimatorKind.least_squares(), cfg, distance, p, 200)
            expected = g_asymptotic(sigma_elem2, self.n, self.noise, p)
            assert simulated == pytest.approx(expected, rel=0.05), f"Mismatch at P={p:g}"


class TestBroadcastGain:

    def test_constant_without_array_gain(self):
        model = BroadcastGain(3.2e-3, 32)
        assert model.gain(0.0) == pytest.approx(1e-4)
        assert model.gain(10.0) == model.gain(0.0)
        assert model.derivative(1.0) == 0.0


class TestMonteCarloGain:
    """Simulated LS/MMSE gains."""

    def setup_method(self):
        self.cfg = ChannelConfig(n_antennas=32, rician_k=10.0, noise_power=1e-12, rng_seed=17)
        self.distance = 11.69

    def test_zero_pilot_gives_per_element_gain(self):
        estimate = estimate_peb_gain(EstimatorKind.least_squares(), self.cfg, self.distance, 0.0, 10_000)
        sigma_h2 = self.cfg.n_antennas * self.cfg.path_gain(self.distance)
        assert estimate.gain == pytest.approx(sigma_h2 / self.cfg.n_antennas, rel=0.05)
        assert estimate.stderr > 0.0

    def test_large_pilot_reaches_channel_energy(self):
        model = MonteCarloGain(self.cfg, self.distance, samples=500)
        assert model.gain(1e3) == pytest.approx(model.sigma_h2, rel=1e-3)

    def test_never_exceeds_channel_energy(self):
        model = MonteCarloGain(self.cfg, self.distance, samples=300)
        for p in np.logspace(-8, 1, 10):
            assert model.gain(p) <= model.sigma_h2 * (1.0 + 1e-12)

    def test_deterministic_for_equal_seeds(self):
        first = MonteCarloGain(self.cfg, self.distance, samples=200)
        second = MonteCarloGain(self.cfg, self.distance, samples=200)
        assert first.gain(1e-5) == second.gain(1e-5)

    def test_derivative_uses_surrogate(self):
        model = MonteCarloGain(self.cfg, self.distance, samples=200)
        assert model.derivative(1e-5) == model.surrogate.derivative(1e-5)
        assert model.surrogate.sigma_h2 == model.sigma_h2

    def test_mmse_is_bounded_and_matches_ls_at_high_pilot(self):
        ls = estimate_peb_gain(EstimatorKind.least_squares(), self.cfg, self.distance, 1.0, 500)
        mmse = estimate_peb_gain(EstimatorKind.mmse(), self.cfg, self.distance, 1.0, 500)
        assert mmse.gain == pytest.approx(ls.gain, rel=0.02)
        model = MonteCarloGain(self.cfg, self.distance, samples=300, estimator=EstimatorKind.mmse())
        assert model.gain(1e-7) <= model.sigma_h2 * (1.0 + 1e-12)

    def test_conditioned_mode_needs_channel(self):
        with pytest.raises(ValueError, match="channel sample"):
            estimate_peb_gain(EstimatorKind.least_squares(), self.cfg, self.distance, 1e-5, 10,
                              mode=CONDITIONED)

    def test_conditioned_mode_plateau_is_channel_energy(self):
        sample = draw_channel(self.cfg, self.distance)
        model = MonteCarloGain(self.cfg, self.distance, samples=100, mode=CONDITIONED, channel=sample)
        assert model.sigma_h2 == pytest.approx(sample.norm2, rel=1e-12)

    def test_mmse_covariance_validation(self):
        with pytest.raises(ValueError, match="Hermitian"):
            EstimatorKind.mmse(np.array([[1.0, 2.0], [0.0, 1.0]]))
        with pytest.raises(ValueError, match="semidefinite"):
            EstimatorKind.mmse(np.diag([1.0, -1.0]))
        covariance = rician_covariance(self.cfg, self.distance, 0.2)
        assert np.allclose(covariance, covariance.conj().T)

    @pytest.mark.slow
    def test_rational_form_tracks_simulation(self):
        cfg = ChannelConfig(n_antennas=100, rician_k=10.0, noise_power=1e-12, rng_seed=5)
        sigma_h2 = cfg.n_antennas * cfg.path_gain(self.distance)
        for p in np.logspace(-4, -1, 6):
            simulated = peb_gain_mc(EstimatorKind.least_squares(), cfg, self.distance, p, 1000)
            approx = g_hat(sigma_h2, cfg.n_antennas, cfg.noise_power, p)
            assert simulated == pytest.approx(approx, rel=0.05), f"Mismatch at P={p:g}"


class TestConcavityThreshold:

    def test_chi_square_quantile(self):
        assert gamma_quantile(16, 0.99) == pytest.approx(26.74, rel=1e-3)

    def test_reference_scenario_bounds(self):
        threshold = concavity_threshold(16, 1e-15, 16e-7)
        # Below -20 dBm transmitted and, after 70 dB path loss, below -90 dBm received
        assert 0.0 < threshold <= 1e-5
        assert threshold * 1e-7 <= 1e-12

    def test_linear_in_noise(self):
        single = concavity_threshold(16, 1e-12, 1e-4)
        double = concavity_threshold(16, 2e-12, 1e-4)
        assert double == pytest.approx(2.0 * single, rel=1e-12)

    def test_rejects_empty_channel(self):
        with pytest.raises(ValueError, match="h_norm2"):
            concavity_threshold(16, 1e-12, 0.0)


class TestQualifyGain:

    def test_rational_passes(self):
        report = qualify_gain(RationalApproxGain(1e-6, 32, 1e-12), 1.0)
        assert (report.monotone, report.concave, report.bounded) == (True, True, True)

    def test_asymptotic_passes(self):
        report = qualify_gain(AsymptoticGain(1e-8, 128, 1e-12), 1.0)
        assert report.passed

    def test_broadcast_passes(self):
        assert qualify_gain(BroadcastGain(1e-4, 32), 1.0).passed

    def test_monte_carlo_above_threshold_is_concave(self):
        cfg = ChannelConfig(n_antennas=16, rician_k=10.0, noise_power=1e-12, rng_seed=23)
        model = MonteCarloGain(cfg, 11.69, samples=400)
        threshold = concavity_threshold(cfg.n_antennas, cfg.noise_power, model.sigma_h2)
        report = qualify_gain(model, 1e-2, grid_points=20, p_min=threshold)
        assert report.concave, "Simulated gain should be concave above the threshold"
        assert report.bounded

    def test_flags_non_monotone_gain(self):
        class Decreasing(RationalApproxGain):
            def gain(self, p_pilot):
                return self.sigma_h2 / (1.0 + p_pilot)

        report = qualify_gain(Decreasing(1e-6, 32, 1e-12), 1.0)
        assert not report.monotone
        assert not report.passed
