"""
Unit tests for the two-tone rectifier surrogate.
"""

import numpy as np
import pytest

from src.harvesting.waveform_toy import (
    WaveformStrategy,
    ZdcToyModel,
    monotonicity_violations,
    zdc_allocate,
    zdc_eval,
)


def _power(model: ZdcToyModel, s0: float, s1: float) -> float:
    return 0.5 * ((s0 * model.a0) ** 2 + (s1 * model.a1) ** 2)


class TestZdcEvaluation:

    def setup_method(self):
        self.model = ZdcToyModel(k2=1.0, k4=1.0, a0=1.0, a1=1.0)

    def test_unit_example(self):
        assert zdc_eval(self.model, 1.0, 1.0) == pytest.approx(8.0)

    def test_zero_amplitudes(self):
        assert zdc_eval(self.model, 0.0, 0.0) == 0.0

    def test_single_tone_collapse(self):
        model = ZdcToyModel(k2=0.7, k4=1.3, a0=2.0, a1=0.5)
        s0 = 0.8
        expected = 0.7 * s0 ** 2 * 4.0 + 1.3 * s0 ** 4 * 16.0
        assert zdc_eval(model, s0, 0.0) == pytest.approx(expected)

    def test_rejects_non_positive_coefficients(self):
        with pytest.raises(ValueError, match="k4"):
            ZdcToyModel(k2=1.0, k4=0.0, a0=1.0, a1=1.0)


class TestZdcAllocation:

    def test_single_sine_uses_strongest_tone(self):
        model = ZdcToyModel(k2=1.0, k4=1.0, a0=2.0, a1=1.0,
                            strategy=WaveformStrategy.ADAPTIVE_SINGLE_SINE)
        s0, s1 = zdc_allocate(model, 0.5)
        assert s0 == pytest.approx(np.sqrt(2.0 * 0.5) / 2.0)
        assert s1 == 0.0

    def test_equal_ratio_symmetric_split(self):
        model = ZdcToyModel(k2=1.0, k4=1.0, a0=1.0, a1=1.0, strategy=WaveformStrategy.EQUAL_RATIO)
        s0, s1 = zdc_allocate(model, 1.0)
        assert s0 == pytest.approx(1.0)
        assert s1 == pytest.approx(1.0)

    @pytest.mark.parametrize("strategy", [
        WaveformStrategy.ADAPTIVE_SINGLE_SINE,
        WaveformStrategy.EQUAL_RATIO,
        WaveformStrategy.OPTIMAL_GRID,
    ])
    def test_power_constraint_holds(self, strategy):
        model = ZdcToyModel(k2=1.0, k4=0.5, a0=2.0, a1=1.0, strategy=strategy, ratio=0.7)
        for p in (0.01, 0.5, 3.0):
            assert _power(model, *zdc_allocate(model, p)) == pytest.approx(p, rel=1e-12)

    def test_optimal_grid_dominates(self):
        base = dict(k2=1.0, k4=1.0, a0=2.0, a1=1.0)
        values = {}
        for strategy in (WaveformStrategy.ADAPTIVE_SINGLE_SINE, WaveformStrategy.EQUAL_RATIO,
                         WaveformStrategy.OPTIMAL_GRID):
            model = ZdcToyModel(strategy=strategy, **base)
            values[strategy] = zdc_eval(model, *zdc_allocate(model, 0.5))
        best = values[WaveformStrategy.OPTIMAL_GRID]
        assert best >= values[WaveformStrategy.ADAPTIVE_SINGLE_SINE]
        assert best >= values[WaveformStrategy.EQUAL_RATIO]

    def test_random_split_needs_generator(self):
        model = ZdcToyModel(k2=1.0, k4=1.0, a0=1.0, a1=1.0, strategy=WaveformStrategy.RANDOM_SPLIT)
        with pytest.raises(ValueError, match="random generator"):
            zdc_allocate(model, 1.0)


class TestMonotonicity:
    """Harvested DC must grow with input power for the deterministic strategies."""

    def setup_method(self):
        rng = np.random.default_rng(2024)
        self.pairs = [tuple(pair) for pair in rng.uniform(0.0, 1.0, size=(100, 2))]

    @pytest.mark.parametrize("strategy", [
        WaveformStrategy.ADAPTIVE_SINGLE_SINE,
        WaveformStrategy.EQUAL_RATIO,
        WaveformStrategy.OPTIMAL_GRID,
    ])
    def test_deterministic_strategies_are_monotone(self, strategy):
        model = ZdcToyModel(k2=1.0, k4=1.0, a0=1.5, a1=1.0, strategy=strategy)
        assert monotonicity_violations(model, self.pairs) == 0

    def test_random_split_fails_somewhere(self):
        model = ZdcToyModel(k2=1.0, k4=1.0, a0=1.5, a1=1.0, strategy=WaveformStrategy.RANDOM_SPLIT)
        rng = np.random.default_rng(5)
        pairs = [tuple(pair) for pair in rng.uniform(0.0, 1.0, size=(1000, 2))]
        violations = monotonicity_violations(model, pairs, np.random.default_rng(6))
        assert violations >= 1, "A random split should break monotonicity at least once"
