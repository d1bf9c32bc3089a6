from dataclasses import dataclass

import numpy as np

from config import IN_PHASE_TOLERANCE
from quadrature.grid import QuadratureGrid
from quadrature.wavefunction import QuadratureWavefunction, wrap_angle


# ---------------------------------------------------------------------------
# Interaction configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InteractionConfig:
    """Coherent-pump QND coupling exp(-i kappa x_s(phi + pi/2) x_m(phi)) read out at x_m(theta).

    kappa = 2 sigma t is the dimensionless coupling; the pump amplitude and the
    susceptibility enter only through sigma = chi alpha.
    """

    kappa: float
    pump_phase: float = 0.0
    homodyne_angle: float = np.pi / 2

    def __post_init__(self):
        if not np.isfinite(self.kappa) or self.kappa < 0:
            raise ValueError(f"Coupling kappa must be finite and >= 0, got {self.kappa}")
        object.__setattr__(self, "pump_phase", wrap_angle(self.pump_phase))
        object.__setattr__(self, "homodyne_angle", wrap_angle(self.homodyne_angle))

    @classmethod
    def from_physical(cls, sigma: float, t: float, pump_phase: float = 0.0, homodyne_angle: float | None = None):
        """Build from the coupling rate sigma and interaction time t."""
        if homodyne_angle is None:
            homodyne_angle = pump_phase + np.pi / 2
        return cls(2 * sigma * t, pump_phase, homodyne_angle)

    @classmethod
    def in_phase(cls, kappa: float, pump_phase: float = 0.0) -> "InteractionConfig":
        return cls(kappa, pump_phase, pump_phase)

    @classmethod
    def out_of_phase(cls, kappa: float, pump_phase: float = 0.0) -> "InteractionConfig":
        return cls(kappa, pump_phase, pump_phase + np.pi / 2)

    @property
    def delta(self) -> float:
        """theta - phi."""
        return self.homodyne_angle - self.pump_phase

    @property
    def signal_angle(self) -> float:
        return wrap_angle(self.pump_phase + np.pi / 2)

    @property
    def shift_per_unit(self) -> float:
        """Meter argument offset per unit x_s: psi_m(x_m + kappa sin(delta) x_s)."""
        return self.kappa * np.sin(self.delta)

    @property
    def is_in_phase(self) -> bool:
        return abs(np.sin(self.delta)) < IN_PHASE_TOLERANCE

    def describe(self) -> str:
        return f"kappa={self.kappa:g} phi={self.pump_phase:.4f} theta-phi={np.mod(self.delta, 2 * np.pi):.4f}"


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Entangled amplitudes over (x_s, x_m); signal read at phi + pi/2, meter at theta."""

    signal_grid: QuadratureGrid
    meter_grid: QuadratureGrid
    amplitudes: np.ndarray
    config: InteractionConfig

    def __post_init__(self):
        shape = (self.signal_grid.n_points, self.meter_grid.n_points)
        if self.amplitudes.shape != shape:
            raise ValueError(f"Bipartite amplitudes have shape {self.amplitudes.shape}, expected {shape}")

    @property
    def signal_angle(self) -> float:
        return self.config.signal_angle

    @property
    def meter_angle(self) -> float:
        return self.config.homodyne_angle

    @property
    def cell_area(self) -> float:
        return self.signal_grid.spacing * self.meter_grid.spacing

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.cell_area)

    def joint_density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class ConditionalState:
    """Signal after the meter returned x_m, with the outcome density W(x_m)."""

    wavefunction: QuadratureWavefunction
    outcome: float
    probability_density: float

    def __post_init__(self):
        if self.probability_density < 0:
            raise ValueError(f"Outcome density must be >= 0, got {self.probability_density}")
