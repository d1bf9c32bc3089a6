import logging

import numpy as np

from config import CONDITIONING_THRESHOLD, OVERFLOW_TOLERANCE
from interaction.base import BipartiteState, ConditionalState, InteractionConfig
from quadrature.grid import ResolutionError
from quadrature.wavefunction import (
    QuadratureWavefunction,
    rotate_representation,
    spectral_evaluate,
    spectral_shift,
)

logger = logging.getLogger(__name__)


def gamma_phase(x_s, x_m, cfg: InteractionConfig):
    """Phase accumulated by the coupling: (kappa x_s / 2)^2 sin 2(theta - phi) + kappa x_s x_m cos(theta - phi)."""
    delta = cfg.delta
    return (cfg.kappa * np.asarray(x_s) / 2) ** 2 * np.sin(2 * delta) + cfg.kappa * np.asarray(x_s) * np.asarray(
        x_m
    ) * np.cos(delta)


def represent_at(psi: QuadratureWavefunction, angle: float) -> QuadratureWavefunction:
    if np.isclose(np.cos(psi.angle - angle), 1.0, rtol=0, atol=1e-14):
        return psi
    logger.debug(f"Rotating representation {psi.angle:.4f} -> {angle:.4f}")
    return rotate_representation(psi, angle)


def _overflow_mass(signal: QuadratureWavefunction, meter: QuadratureWavefunction, shifts: np.ndarray) -> float:
    """Meter probability pulled in from outside the grid by the shifts, weighted by the signal density."""
    grid = meter.grid
    cdf = np.cumsum(np.abs(meter.amplitudes) ** 2) * grid.spacing
    inside = np.interp(grid.x_max + shifts, grid.points, cdf, left=0.0, right=cdf[-1]) - np.interp(
        grid.x_min + shifts, grid.points, cdf, left=0.0, right=cdf[-1]
    )
    lost = np.clip(cdf[-1] - inside, 0.0, None)
    return float(np.sum(np.abs(signal.amplitudes) ** 2 * lost) * signal.grid.spacing)


def entangle(
    signal: QuadratureWavefunction, meter: QuadratureWavefunction, cfg: InteractionConfig
) -> BipartiteState:
    """Signal-meter state after the coupling, signal at phi + pi/2 and meter at theta.

    amplitudes[i, j] = psi_s(x_s_i) psi_m(x_m_j + kappa sin(theta - phi) x_s_i) exp(-i gamma).
    """
    signal = represent_at(signal, cfg.signal_angle)
    meter = represent_at(meter, cfg.homodyne_angle)
    x_s = signal.grid.points
    x_m = meter.grid.points
    shifts = cfg.shift_per_unit * x_s

    if cfg.shift_per_unit == 0.0:
        rows = np.broadcast_to(meter.amplitudes, (x_s.size, x_m.size))
    else:
        overflow = _overflow_mass(signal, meter, shifts)
        if overflow > OVERFLOW_TOLERANCE:
            reach = np.max(np.abs(shifts[np.abs(signal.amplitudes) ** 2 > 1e-16]), initial=0.0)
            raise ResolutionError(
                f"Shifted meter support leaves grid {meter.grid.describe()}: {overflow:.2e} of the "
                f"probability wraps around (shift up to {reach:.3g}); widen the meter grid"
            )
        rows = spectral_shift(meter.amplitudes, meter.grid, shifts)

    phase = np.exp(-1j * gamma_phase(x_s[:, None], x_m[None, :], cfg))
    amplitudes = signal.amplitudes[:, None] * rows * phase
    state = BipartiteState(signal.grid, meter.grid, amplitudes, cfg)

    norm = state.norm()
    if abs(norm - 1) > 1e-6:
        logger.warning(f"Entangled state norm {norm:.8f} before renormalization; check grid resolution")
    return BipartiteState(signal.grid, meter.grid, amplitudes / np.sqrt(norm), cfg)


def meter_distribution(state: BipartiteState) -> np.ndarray:
    """W(x_m) on the meter grid, a density over x_m."""
    return np.sum(state.joint_density(), axis=0) * state.signal_grid.spacing


def filter_amplitude(
    meter: QuadratureWavefunction, cfg: InteractionConfig, x_m: float, x_s: np.ndarray
) -> np.ndarray:
    """Unnormalized filter psi_m(x_m + kappa sin(theta - phi) x_s) exp(-i gamma(x_s, x_m))."""
    meter = represent_at(meter, cfg.homodyne_angle)
    x_s = np.asarray(x_s, dtype=float)
    values = meter.at(x_m + cfg.shift_per_unit * x_s)
    return values * np.exp(-1j * gamma_phase(x_s, x_m, cfg))


def _outcome_column(state: BipartiteState, x_m: float) -> np.ndarray:
    grid = state.meter_grid
    index = int(round((x_m - grid.x_min) / grid.spacing))
    if 0 <= index < grid.n_points and abs(grid.points[index] - x_m) <= 1e-12 * max(1.0, abs(x_m)):
        return state.amplitudes[:, index]
    return spectral_evaluate(state.amplitudes, grid, np.float64(x_m))


def condition_on_outcome(state: BipartiteState, x_m: float) -> ConditionalState:
    """Signal state after the meter reads x_m: psi_s f(x_s|x_m), renormalized."""
    if not state.meter_grid.contains(x_m):
        raise ValueError(f"Outcome {x_m} lies outside meter grid {state.meter_grid.describe()}")
    column = _outcome_column(state, x_m)
    density = float(np.sum(np.abs(column) ** 2) * state.signal_grid.spacing)
    if density < CONDITIONING_THRESHOLD:
        raise ValueError(f"Outcome {x_m} has density {density:.2e} below {CONDITIONING_THRESHOLD}; too rare to condition on")
    wavefunction = QuadratureWavefunction(state.signal_grid, column / np.sqrt(density), state.signal_angle)
    return ConditionalState(wavefunction, float(x_m), density)


def average_conditional_fidelity(state: BipartiteState, signal: QuadratureWavefunction) -> float:
    """Outcome-averaged |<psi_s|psi_s^(c)(x_m)>|^2, i.e. sum over x_m of |<psi_s|column>|^2 dx_m."""
    signal = represent_at(signal, state.signal_angle)
    if signal.grid != state.signal_grid:
        raise ValueError("Signal grid does not match the entangled state")
    overlaps = signal.amplitudes.conj() @ state.amplitudes * state.signal_grid.spacing
    return float(np.sum(np.abs(overlaps) ** 2) * state.meter_grid.spacing)
