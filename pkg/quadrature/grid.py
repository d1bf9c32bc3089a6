from dataclasses import dataclass
from functools import cached_property

import numpy as np

from config import MIN_GRID_POINTS


class ResolutionError(ValueError):
    """A state or shift does not fit the grid it is asked to live on."""


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform grid over one quadrature axis, endpoints included."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"Grid needs x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.n_points < MIN_GRID_POINTS:
            raise ValueError(f"Grid needs at least {MIN_GRID_POINTS} points, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @cached_property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular frequencies conjugate to the grid, in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)

    @property
    def half_width(self) -> float:
        return min(abs(self.x_min), abs(self.x_max))

    def contains(self, x: float) -> bool:
        return self.x_min <= x <= self.x_max

    def describe(self) -> str:
        return f"[{self.x_min:g}, {self.x_max:g}] x {self.n_points}"


def induced_momentum_grid(grid: QuadratureGrid) -> QuadratureGrid:
    """Momentum axis sampled by a DFT over lags y = 2 m dx.

    Spacing pi / (N dx), so p_max is half the Nyquist wavenumber of the grid.
    """
    n = grid.n_points
    dp = np.pi / (n * grid.spacing)
    k_min = -(n // 2)
    k_max = n - n // 2 - 1
    return QuadratureGrid(k_min * dp, k_max * dp, n)
