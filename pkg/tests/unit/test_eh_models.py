"""
Unit tests for the RF-DC conversion models.
"""

import numpy as np
import pytest

from src.harvesting.eh_models import EhKind, EhModel, eh_eval, eh_inverse, eta_max
from src.utils.errors import SaturationInfeasible


class TestLinearModel:
    """Linear conversion η(x) = αx."""

    def setup_method(self):
        self.model = EhModel.linear(0.3)

    def test_eval_is_proportional(self):
        assert eh_eval(self.model, 1e-3) == pytest.approx(3e-4, rel=1e-12)

    def test_inverse(self):
        assert eh_inverse(self.model, 3e-4) == pytest.approx(1e-3, rel=1e-12)

    def test_eta_max_is_alpha(self):
        assert eta_max(self.model) == 0.3

    def test_never_saturates(self):
        assert self.model.saturation_level == float("inf")
        assert self.model.inverse(1e6) == pytest.approx(1e6 / 0.3)

    def test_rejects_non_positive_alpha(self):
        with pytest.raises(ValueError, match="alpha"):
            EhModel.linear(0.0)


class TestSaturatingExponential:
    """η(x) = P_max(1 − exp(−η_max x / P_max))."""

    def setup_method(self):
        self.model = EhModel.saturating_exponential(p_max=0.02, eta_max=0.3)
        self.half_point = (0.02 / 0.3) * np.log(2.0)

    def test_zero_input(self):
        assert eh_eval(self.model, 0.0) == 0.0

    def test_half_saturation_point(self):
        assert self.half_point == pytest.approx(4.6210e-2, rel=1e-4)
        assert eh_eval(self.model, self.half_point) == pytest.approx(0.01, rel=1e-12)

    def test_inverse_of_half_saturation(self):
        assert eh_inverse(self.model, 0.01) == pytest.approx(self.half_point, rel=1e-12)

    def test_saturation_level_is_infeasible(self):
        with pytest.raises(SaturationInfeasible):
            eh_inverse(self.model, 0.02)
        with pytest.raises(SaturationInfeasible):
            eh_inverse(self.model, np.array([0.001, 0.03]))

    def test_output_stays_below_p_max(self):
        x = np.logspace(-6, 1, 200)
        y = self.model.harvest(x)
        assert np.all(y < 0.02), "Saturating output must stay strictly below P_max"
        assert np.all(np.diff(y) > 0.0), "Output must be strictly increasing"

    def test_eta_max_is_the_parameter(self):
        assert eta_max(self.model) == 0.3

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        y = rng.uniform(1e-9, 0.02 * (1.0 - 1e-6), size=1000)
        back = self.model.harvest(self.model.inverse(y))
        assert np.max(np.abs(back - y) / y) <= 1e-9

    def test_linear_bound(self):
        rng = np.random.default_rng(11)
        x = 10.0 ** rng.uniform(-9, 1, size=1000)
        assert np.all(self.model.harvest(x) <= self.model.eta_max() * x)

    def test_negative_input_rejected(self):
        with pytest.raises(ValueError):
            self.model.harvest(-1e-3)
        with pytest.raises(ValueError):
            self.model.inverse(-1e-3)

    def test_vectorised_shapes(self):
        x = np.array([[0.0, 0.01], [0.02, 0.5]])
        assert self.model.harvest(x).shape == (2, 2)
        assert isinstance(self.model.harvest(0.01), float)


class TestTabulatedModel:
    """Piecewise-linear table holding its last output."""

    def setup_method(self):
        self.model = EhModel.tabulated([(0.0, 0.0), (1.0, 0.2), (2.0, 0.25)])

    def test_eta_max_from_vertices(self):
        assert eta_max(self.model) == pytest.approx(0.2, rel=1e-12)

    def test_interpolation(self):
        assert self.model.harvest(0.5) == pytest.approx(0.1)
        assert self.model.harvest(1.5) == pytest.approx(0.225)

    def test_holds_last_output(self):
        assert self.model.harvest(10.0) == pytest.approx(0.25)
        assert self.model.saturation_level == 0.25

    def test_inverse_interpolates(self):
        assert self.model.inverse(0.225) == pytest.approx(1.5)
        with pytest.raises(SaturationInfeasible):
            self.model.inverse(0.25)

    def test_origin_is_prepended(self):
        model = EhModel.tabulated([(1.0, 0.2), (2.0, 0.25)])
        assert model.table[0] == (0.0, 0.0)
        assert model == self.model

    def test_round_trip(self):
        y = np.linspace(1e-6, 0.2499, 500)
        back = self.model.harvest(self.model.inverse(y))
        assert np.max(np.abs(back - y) / y) <= 1e-9

    def test_rejects_non_monotone_table(self):
        with pytest.raises(ValueError, match="increasing"):
            EhModel.tabulated([(0.0, 0.0), (1.0, 0.2), (2.0, 0.1)])
        with pytest.raises(ValueError, match="increasing"):
            EhModel.tabulated([(0.0, 0.0), (1.0, 0.2), (1.0, 0.3)])

    def test_linear_bound(self):
        x = np.logspace(-6, 1, 1000)
        assert np.all(self.model.harvest(x) <= self.model.eta_max() * x * (1.0 + 1e-12))


class TestModelDescription:

    def test_kinds_and_descriptions(self):
        assert EhModel.linear(0.5).kind == EhKind.LINEAR
        assert "saturating_exp" in EhModel.saturating_exponential(0.02, 0.3).describe()
        assert "3 points" in EhModel.tabulated([(1.0, 0.2), (2.0, 0.25)]).describe()
