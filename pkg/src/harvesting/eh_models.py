"""
Energy Harvesting Models

RF-DC conversion functions η(·) mapping received RF energy to harvested energy,
their inverses and their tightest linear upper bound η_max.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Tuple, Union

import numpy as np

from ..utils.errors import SaturationInfeasible

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Log grid used for the numeric sup of η(x)/x
ETA_MAX_GRID_POINTS = 10_000
ETA_MAX_GRID_FLOOR = 1e-9


class EhKind(str, Enum):
    """Supported RF-DC conversion families."""

    LINEAR = "linear"
    SATURATING_EXP = "saturating_exp"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class EhModel:
    """
    RF-DC conversion function η with its inverse and linear bound.

    Use the ``linear``, ``saturating_exponential`` and ``tabulated``
    constructors rather than filling fields by hand.

    Attributes:
        kind: Model family
        alpha: Conversion rate of the linear model
        p_max: Saturation level in Watts (saturating model)
        eta_max_param: Small-signal conversion rate (saturating model)
        table: Ordered (input W, output W) pairs (tabulated model)
    """

    kind: EhKind
    alpha: float = 0.0
    p_max: float = 0.0
    eta_max_param: float = 0.0
    table: Tuple[Tuple[float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind == EhKind.LINEAR:
            if not 0.0 < self.alpha:
                raise ValueError(f"alpha must be positive, got {self.alpha}")
        elif self.kind == EhKind.SATURATING_EXP:
            if not self.p_max > 0.0:
                raise ValueError(f"p_max must be positive, got {self.p_max}")
            if not self.eta_max_param > 0.0:
                raise ValueError(f"eta_max must be positive, got {self.eta_max_param}")
        elif self.kind == EhKind.TABULATED:
            self._validate_table()
        else:
            raise ValueError(f"Unknown EH model kind: {self.kind}")

    def _validate_table(self) -> None:
        if len(self.table) < 1:
            raise ValueError("Tabulated EH model needs at least one (input, output) pair")
        inputs = np.array([p[0] for p in self.table], dtype=float)
        outputs = np.array([p[1] for p in self.table], dtype=float)
        if inputs[0] != 0.0 or outputs[0] != 0.0:
            if inputs[0] <= 0.0 or outputs[0] <= 0.0:
                raise ValueError("Tabulated EH model must start at (0, 0) or at a positive point")
            # η(0) = 0 is implied by the model
            object.__setattr__(self, "table", ((0.0, 0.0),) + tuple(self.table))
            inputs = np.concatenate(([0.0], inputs))
            outputs = np.concatenate(([0.0], outputs))
        if len(inputs) < 2:
            raise ValueError("Tabulated EH model needs a point beyond the origin")
        if np.any(np.diff(inputs) <= 0.0):
            raise ValueError("Tabulated EH inputs must be strictly increasing")
        if np.any(np.diff(outputs) <= 0.0):
            raise ValueError("Tabulated EH outputs must be strictly increasing")

    @classmethod
    def linear(cls, alpha: float) -> "EhModel":
        return cls(kind=EhKind.LINEAR, alpha=float(alpha))

    @classmethod
    def saturating_exponential(cls, p_max: float, eta_max: float) -> "EhModel":
        return cls(kind=EhKind.SATURATING_EXP, p_max=float(p_max), eta_max_param=float(eta_max))

    @classmethod
    def tabulated(cls, pairs: Iterable[Tuple[float, float]]) -> "EhModel":
        return cls(kind=EhKind.TABULATED, table=tuple((float(x), float(y)) for x, y in pairs))

    @property
    def saturation_level(self) -> float:
        """Supremum of η; harvest demands at or above it are unreachable."""
        if self.kind == EhKind.LINEAR:
            return float("inf")
        if self.kind == EhKind.SATURATING_EXP:
            return self.p_max
        return self.table[-1][1]

    def _table_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        inputs = np.array([p[0] for p in self.table], dtype=float)
        outputs = np.array([p[1] for p in self.table], dtype=float)
        return inputs, outputs

    def harvest(self, received: ArrayLike) -> ArrayLike:
        """
        Evaluate η at the received energy.

        Args:
            received: Received RF energy per block (scalar or array), non-negative

        Returns:
            Harvested energy with the same shape as the input

        Raises:
            ValueError: If any input is negative
        """
        x = np.asarray(received, dtype=float)
        if np.any(x < 0.0) or np.any(np.isnan(x)):
            raise ValueError(f"Received energy must be non-negative, got {received}")

        if self.kind == EhKind.LINEAR:
            y = self.alpha * x
        elif self.kind == EhKind.SATURATING_EXP:
            y = self.p_max * -np.expm1(-self.eta_max_param * x / self.p_max)
        else:
            inputs, outputs = self._table_arrays()
            # Holds its last output beyond the table
            y = np.interp(x, inputs, outputs)
        return float(y) if np.ndim(y) == 0 else y

    def inverse(self, harvested: ArrayLike) -> ArrayLike:
        """
        Evaluate η^{-1}: the received energy needed to harvest the given amount.

        Args:
            harvested: Required harvested energy per block, non-negative

        Returns:
            Required received energy

        Raises:
            ValueError: If any input is negative
            SaturationInfeasible: If any demand is at or above the saturation level
        """
        y = np.asarray(harvested, dtype=float)
        if np.any(y < 0.0) or np.any(np.isnan(y)):
            raise ValueError(f"Harvested energy must be non-negative, got {harvested}")
        level = self.saturation_level
        if np.any(y >= level):
            raise SaturationInfeasible(
                f"Harvest demand {np.max(y):.6g} reaches the saturation level {level:.6g}"
            )

        if self.kind == EhKind.LINEAR:
            x = y / self.alpha
        elif self.kind == EhKind.SATURATING_EXP:
            x = -(self.p_max / self.eta_max_param) * np.log1p(-y / self.p_max)
        else:
            inputs, outputs = self._table_arrays()
            x = np.interp(y, outputs, inputs)
        return float(x) if np.ndim(x) == 0 else x

    def eta_max(self) -> float:
        """
        Tightest slope with η(x) ≤ η_max·x for all x ≥ 0.

        Returns:
            sup over x > 0 of η(x)/x
        """
        if self.kind == EhKind.LINEAR:
            return self.alpha
        if self.kind == EhKind.SATURATING_EXP:
            # Sup is the x -> 0 limit, reached analytically
            return self.eta_max_param

        inputs, outputs = self._table_arrays()
        vertex_ratios = outputs[1:] / inputs[1:]
        grid = np.logspace(
            np.log10(ETA_MAX_GRID_FLOOR), np.log10(10.0 * inputs[-1]), ETA_MAX_GRID_POINTS
        )
        grid_ratios = np.asarray(self.harvest(grid)) / grid
        return float(max(vertex_ratios.max(), grid_ratios.max()))

    def describe(self) -> str:
        if self.kind == EhKind.LINEAR:
            return f"linear(alpha={self.alpha:g})"
        if self.kind == EhKind.SATURATING_EXP:
            return f"saturating_exp(p_max={self.p_max:g}, eta_max={self.eta_max_param:g})"
        return f"tabulated({len(self.table)} points)"


def eh_eval(model: EhModel, received_energy: ArrayLike) -> ArrayLike:
    return model.harvest(received_energy)


def eh_inverse(model: EhModel, harvested: ArrayLike) -> ArrayLike:
    return model.inverse(harvested)


def eta_max(model: EhModel) -> float:
    return model.eta_max()
