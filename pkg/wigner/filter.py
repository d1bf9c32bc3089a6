"""Filter Wigner functions and the convolution form of the conditional Wigner function.

After the meter reads x_m the signal Wigner function is the momentum
convolution of the prior W_s with the Wigner function of the filter
f(x_s | x_m). The filter Wigner function is obtained two ways: directly from
the sampled filter and by remapping the meter Wigner function. In phase the
convolution degenerates to a pure momentum translation.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy.signal import fftconvolve

from config import FILTER_PATH_TOLERANCE
from interaction.base import ConditionalState, InteractionConfig
from interaction.evolution import condition_on_outcome, entangle, filter_amplitude, represent_at
from quadrature.grid import QuadratureGrid, induced_momentum_grid
from quadrature.wavefunction import QuadratureWavefunction
from wigner.transform import WignerGrid, wigner_transform, wigner_values

logger = logging.getLogger(__name__)

CHECK_MOMENTUM_AXIS = QuadratureGrid(-12.0, 12.0, 481)
MAX_FILTER_EXTENSION = 8


@dataclass(frozen=True, eq=False)
class FilterWigner:
    """Wigner function of the normalized filter, or the in-phase translation that replaces it."""

    outcome: float
    config: InteractionConfig
    grid: WignerGrid | None = None
    path_residual: float = 0.0
    in_phase: bool = False
    momentum_shift: float = 0.0

    @property
    def paths_agree(self) -> bool:
        return self.path_residual <= FILTER_PATH_TOLERANCE


# ---------------------------------------------------------------------------
# Remap path: W_m(x_m + c x, p + kappa x cos(delta) + x_m cot(delta))
# ---------------------------------------------------------------------------

def meter_wigner_rows(
    meter: QuadratureWavefunction, centres: np.ndarray, offsets: np.ndarray, p_points: np.ndarray
) -> np.ndarray:
    """W_m(u_r, p_k + s_r) for each row r, evaluated from the meter amplitudes.

    Shape (len(centres), len(p_points)). The meter is zero outside its grid.
    """
    grid = meter.grid
    n = grid.n_points
    dy = grid.spacing
    lags = np.arange(-(n - 1), n) * dy

    coeffs = sfft.fft(meter.amplitudes)
    if n % 2 == 0:
        coeffs[n // 2] = 0.0
    k = grid.wavenumbers
    centre_part = coeffs[None, :] * np.exp(1j * np.outer(centres - grid.x_min, k))
    half_lag = np.exp(0.5j * np.outer(lags, k))
    behind = centre_part @ half_lag.conj().T / n
    ahead = centre_part @ half_lag.T / n

    lo = centres[:, None] - lags[None, :] / 2
    hi = centres[:, None] + lags[None, :] / 2
    behind[(lo < grid.x_min) | (lo > grid.x_max)] = 0.0
    ahead[(hi < grid.x_min) | (hi > grid.x_max)] = 0.0

    products = behind * ahead.conj() * np.exp(1j * np.outer(offsets, lags))
    kernel = np.exp(1j * np.outer(lags, np.asarray(p_points, dtype=float)))
    return (products @ kernel).real * dy / (2 * np.pi)


def _remap_filter(
    meter: QuadratureWavefunction, cfg: InteractionConfig, x_m: float, x_s: np.ndarray, p_points: np.ndarray
) -> np.ndarray:
    delta = cfg.delta
    centres = x_m + cfg.shift_per_unit * x_s
    offsets = cfg.kappa * x_s * np.cos(delta) + x_m * np.cos(delta) / np.sin(delta)
    return meter_wigner_rows(meter, centres, offsets, p_points)


# ---------------------------------------------------------------------------
# Direct path: Wigner of the sampled filter
# ---------------------------------------------------------------------------

def _extended_grid(signal_grid: QuadratureGrid, meter: QuadratureWavefunction, c: float, x_m: float):
    """Signal grid padded with whole cells until it covers the filter support."""
    dx = signal_grid.spacing
    reach = (abs(x_m) + meter.grid.half_width) / abs(c)
    limit = MAX_FILTER_EXTENSION * signal_grid.half_width
    reach = min(reach, limit)
    extra = max(0, int(np.ceil((reach - signal_grid.half_width) / dx)))
    grid = QuadratureGrid(signal_grid.x_min - extra * dx, signal_grid.x_max + extra * dx, signal_grid.n_points + 2 * extra)
    return grid, extra


def _direct_filter(
    meter: QuadratureWavefunction,
    cfg: InteractionConfig,
    x_m: float,
    signal_grid: QuadratureGrid,
    p_points: np.ndarray,
) -> np.ndarray:
    c = cfg.shift_per_unit
    grid, extra = _extended_grid(signal_grid, meter, c, x_m)
    amplitudes = filter_amplitude(meter, cfg, x_m, grid.points)
    rows = np.arange(extra, extra + signal_grid.n_points)
    return abs(c) * wigner_values(amplitudes, grid, c * np.asarray(p_points), rows=rows)


def filter_wigner(
    meter: QuadratureWavefunction,
    cfg: InteractionConfig,
    x_m: float,
    signal_grid: QuadratureGrid,
    p_axis: QuadratureGrid | None = None,
    probability_density: float = 1.0,
) -> FilterWigner:
    """W_f(x_s, p | x_m) on signal_grid x p_axis, scaled so the momentum argument is the signal's."""
    if probability_density <= 0:
        raise ValueError(f"Outcome probability density must be positive, got {probability_density}")
    if cfg.is_in_phase or cfg.kappa == 0:
        shift = cfg.kappa * x_m * np.cos(cfg.delta)
        logger.debug(f"In-phase filter at x_m={x_m:.4f}: momentum translation {shift:.6f}")
        return FilterWigner(x_m, cfg, in_phase=True, momentum_shift=float(shift))

    meter = represent_at(meter, cfg.homodyne_angle)
    p_axis = p_axis or induced_momentum_grid(signal_grid)
    remap = _remap_filter(meter, cfg, x_m, signal_grid.points, p_axis.points) / probability_density
    direct = _direct_filter(meter, cfg, x_m, signal_grid, p_axis.points) / probability_density
    residual = float(np.max(np.abs(remap - direct)))
    if residual > FILTER_PATH_TOLERANCE:
        logger.warning(f"Filter Wigner paths differ by {residual:.2e} at x_m={x_m:.4f} ({cfg.describe()})")

    grid = WignerGrid(signal_grid, p_axis, remap, cfg.signal_angle)
    return FilterWigner(x_m, cfg, grid=grid, path_residual=residual)


# ---------------------------------------------------------------------------
# Conditional Wigner functions
# ---------------------------------------------------------------------------

def conditional_wigner_direct(cond: ConditionalState, p_axis: QuadratureGrid | None = None) -> WignerGrid:
    return wigner_transform(cond.wavefunction, p_axis)


def in_phase_conditional_wigner(
    signal: QuadratureWavefunction, cfg: InteractionConfig, x_m: float, p_axis: QuadratureGrid | None = None
) -> WignerGrid:
    """W_s(x, p + kappa x_m cos(delta)): the in-phase measurement only translates momentum."""
    if not cfg.is_in_phase:
        raise ValueError(f"Configuration is not in phase ({cfg.describe()})")
    signal = represent_at(signal, cfg.signal_angle)
    p_axis = p_axis or induced_momentum_grid(signal.grid)
    shift = cfg.kappa * x_m * np.cos(cfg.delta)
    values = wigner_values(signal.amplitudes, signal.grid, p_axis.points + shift)
    return WignerGrid(signal.grid, p_axis, values, signal.angle)


def _check_symmetric(p_axis: QuadratureGrid):
    if p_axis.n_points % 2 == 0 or not np.isclose(p_axis.x_min, -p_axis.x_max):
        raise ValueError(f"Convolution needs a symmetric momentum axis with an odd point count, got {p_axis.describe()}")


def convolution_identity_check(
    signal: QuadratureWavefunction,
    meter: QuadratureWavefunction,
    cfg: InteractionConfig,
    x_m: float,
    p_axis: QuadratureGrid | None = None,
) -> float:
    """Max |W_c(direct) - (W_s * W_f)| over the signal grid and p_axis."""
    p_axis = p_axis or CHECK_MOMENTUM_AXIS
    _check_symmetric(p_axis)
    signal = represent_at(signal, cfg.signal_angle)

    state = entangle(signal, meter, cfg)
    conditional = condition_on_outcome(state, x_m)
    direct = conditional_wigner_direct(conditional, p_axis).values

    if cfg.kappa == 0:
        composed = wigner_transform(signal, p_axis).values
    elif cfg.is_in_phase:
        composed = in_phase_conditional_wigner(signal, cfg, x_m, p_axis).values
    else:
        c = cfg.shift_per_unit
        prior = wigner_transform(signal, p_axis).values
        meter = represent_at(meter, cfg.homodyne_angle)
        # filter Wigner in its own momentum p' = c p
        kernel = _remap_filter(meter, cfg, x_m, signal.grid.points, p_axis.points / c)
        kernel /= abs(c) * conditional.probability_density
        composed = fftconvolve(prior, kernel, mode="same", axes=1) * p_axis.spacing

    residual = float(np.max(np.abs(direct - composed)))
    logger.info(f"Convolution identity at x_m={x_m:.3f} ({cfg.describe()}): residual {residual:.2e}")
    return residual
