from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy.interpolate import RegularGridInterpolator

from quadrature.grid import QuadratureGrid, induced_momentum_grid
from quadrature.wavefunction import QuadratureWavefunction

PURE_STATE_BOUND = 1 / np.pi


# ---------------------------------------------------------------------------
# Grid type
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WignerGrid:
    """W(x, p) sampled on x_axis x p_axis; x = x(angle), p = x(angle + pi/2)."""

    x_axis: QuadratureGrid
    p_axis: QuadratureGrid
    values: np.ndarray
    angle: float = 0.0

    def __post_init__(self):
        shape = (self.x_axis.n_points, self.p_axis.n_points)
        if self.values.shape != shape:
            raise ValueError(f"Wigner values have shape {self.values.shape}, axes give {shape}")

    @property
    def cell_area(self) -> float:
        return self.x_axis.spacing * self.p_axis.spacing

    def normalization(self) -> float:
        return float(np.sum(self.values) * self.cell_area)

    def purity(self) -> float:
        """Integral of W^2; 1/(2 pi) for a pure state."""
        return float(np.sum(self.values**2) * self.cell_area)

    def marginal_x(self) -> np.ndarray:
        return np.sum(self.values, axis=1) * self.p_axis.spacing

    def marginal_p(self) -> np.ndarray:
        return np.sum(self.values, axis=0) * self.x_axis.spacing

    def bound_violation(self) -> float:
        """How far max |W| exceeds the pure-state bound 1/pi (<= 0 when respected)."""
        return float(np.max(np.abs(self.values)) - PURE_STATE_BOUND)

    def minimum(self) -> float:
        return float(np.min(self.values))

    def value_at(self, x, p) -> np.ndarray:
        interp = RegularGridInterpolator(
            (self.x_axis.points, self.p_axis.points), self.values, bounds_error=False, fill_value=0.0
        )
        return interp(np.column_stack([np.ravel(x), np.ravel(p)])).reshape(np.shape(x))

    def to_records(self) -> dict[str, np.ndarray]:
        xx, pp = np.meshgrid(self.x_axis.points, self.p_axis.points, indexing="ij")
        return {"x": xx.ravel(), "p": pp.ravel(), "value": self.values.ravel()}


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def _lag_products(amplitudes: np.ndarray, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """psi(x_j - m dx) psi*(x_j + m dx) for each row j and every lag m in FFT order."""
    n = amplitudes.size
    lags = np.rint(sfft.fftfreq(n, 1 / n)).astype(int)
    lo = rows[:, None] - lags[None, :]
    hi = rows[:, None] + lags[None, :]
    valid = (lo >= 0) & (lo < n) & (hi >= 0) & (hi < n)
    products = amplitudes[np.clip(lo, 0, n - 1)] * np.conj(amplitudes[np.clip(hi, 0, n - 1)])
    return np.where(valid, products, 0.0), lags


def wigner_values(
    amplitudes: np.ndarray, grid: QuadratureGrid, p_points: np.ndarray, rows: np.ndarray | None = None
) -> np.ndarray:
    """W(x_j, p) = (1/2pi) int dy e^{ipy} psi(x - y/2) psi*(x + y/2) at arbitrary momenta.

    Lags are y = 2 m dx so both arguments stay on the grid. rows selects x_j
    (all grid rows by default). Works for unnormalized amplitudes.
    """
    if rows is None:
        rows = np.arange(grid.n_points)
    products, lags = _lag_products(np.asarray(amplitudes, dtype=complex), np.asarray(rows))
    kernel = np.exp(2j * grid.spacing * np.outer(lags, np.asarray(p_points, dtype=float)))
    return (products @ kernel).real * grid.spacing / np.pi


def wigner_transform(psi: QuadratureWavefunction, p_axis: QuadratureGrid | None = None) -> WignerGrid:
    """Wigner function of a grid wavefunction.

    Without p_axis the momentum axis is the one induced by the lag DFT and
    every row is a single FFT; with p_axis the transform is evaluated there
    explicitly.
    """
    grid = psi.grid
    if p_axis is not None:
        values = wigner_values(psi.amplitudes, grid, p_axis.points)
        return WignerGrid(grid, p_axis, values, psi.angle)

    n = grid.n_points
    products, _ = _lag_products(psi.amplitudes, np.arange(n))
    spectrum = sfft.ifft(products, axis=1) * n
    values = sfft.fftshift(spectrum, axes=1).real * grid.spacing / np.pi
    return WignerGrid(grid, induced_momentum_grid(grid), values, psi.angle)
