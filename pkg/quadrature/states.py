import logging
from dataclasses import dataclass

import numpy as np

from config import MAX_VACUUM_SPACING
from quadrature.grid import QuadratureGrid, ResolutionError
from quadrature.wavefunction import QuadratureWavefunction

logger = logging.getLogger(__name__)

STATE_KINDS = ("vacuum", "fock", "squeezed", "coherent", "cat")


# ---------------------------------------------------------------------------
# Specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SqueezedVacuumSpec:
    """Squeezing parameter xi = r exp(i epsilon); the squeezed axis is x(epsilon/2)."""

    r: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.r) or self.r < 0:
            raise ValueError(f"Squeezing modulus must be finite and >= 0, got {self.r}")

    @classmethod
    def aligned(cls, r: float, angle: float) -> "SqueezedVacuumSpec":
        """Squeezed along x(angle)."""
        return cls(r, 2 * angle)

    @classmethod
    def locked_to_pump(cls, r: float, pump_phase: float) -> "SqueezedVacuumSpec":
        """Squeeze phase following the pump so the homodyne axis phi + pi/2 is squeezed."""
        return cls(r, float(np.mod(2 * pump_phase + np.pi, 2 * np.pi)))

    @property
    def squeezed_variance(self) -> float:
        return float(np.exp(-2 * self.r) / 2)

    def quadrature_variance(self, angle: float) -> float:
        rel = angle - self.epsilon / 2
        return float(
            (np.exp(-2 * self.r) * np.cos(rel) ** 2 + np.exp(2 * self.r) * np.sin(rel) ** 2) / 2
        )


@dataclass(frozen=True)
class StateSpec:
    """Single-mode pure state description shared by the grid and the Fock oracle."""

    kind: str = "vacuum"
    n: int = 0
    r: float = 0.0
    epsilon: float = 0.0
    alpha: complex = 0j

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise ValueError(f"Unknown state kind '{self.kind}'. Available: {', '.join(STATE_KINDS)}")
        if self.n < 0:
            raise ValueError(f"Fock number must be >= 0, got {self.n}")
        object.__setattr__(self, "alpha", complex(self.alpha))
        if self.kind == "squeezed":
            SqueezedVacuumSpec(self.r, self.epsilon)

    @property
    def squeezing(self) -> SqueezedVacuumSpec:
        return SqueezedVacuumSpec(self.r, self.epsilon)

    def build(self, grid: QuadratureGrid, angle: float = 0.0) -> QuadratureWavefunction:
        if self.kind == "vacuum":
            return make_vacuum(grid, angle)
        if self.kind == "fock":
            return make_fock(grid, angle, self.n)
        if self.kind == "squeezed":
            return make_squeezed_vacuum(grid, angle, self.squeezing)
        if self.kind == "coherent":
            return make_coherent(grid, angle, self.alpha)
        return make_cat(grid, angle, self.alpha)

    def describe(self) -> str:
        if self.kind == "fock":
            return f"fock n={self.n}"
        if self.kind == "squeezed":
            return f"squeezed r={self.r:g} eps={self.epsilon:g}"
        if self.kind in ("coherent", "cat"):
            return f"{self.kind} alpha={self.alpha:g}"
        return "vacuum"


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def hermite_functions(x: np.ndarray, n_max: int) -> np.ndarray:
    """Normalized Hermite functions h_0..h_{n_max} at x, shape (n_max + 1, len(x))."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h = np.empty((n_max + 1, x.size))
    h[0] = np.pi**-0.25 * np.exp(-(x**2) / 2)
    if n_max >= 1:
        h[1] = np.sqrt(2.0) * x * h[0]
    for n in range(1, n_max):
        h[n + 1] = np.sqrt(2.0 / (n + 1)) * x * h[n] - np.sqrt(n / (n + 1)) * h[n - 1]
    return h


def make_vacuum(grid: QuadratureGrid, angle: float = 0.0) -> QuadratureWavefunction:
    if grid.spacing > MAX_VACUUM_SPACING:
        raise ResolutionError(
            f"Grid spacing {grid.spacing:.3g} exceeds {MAX_VACUUM_SPACING} for the vacuum; add points"
        )
    amps = np.pi**-0.25 * np.exp(-grid.points**2 / 2)
    return QuadratureWavefunction(grid, amps, angle).normalized()


def make_squeezed_vacuum(
    grid: QuadratureGrid, angle: float, spec: SqueezedVacuumSpec
) -> QuadratureWavefunction:
    """Squeezed vacuum S(xi)|0> represented on the x(angle) axis."""
    if spec.squeezed_variance < 4 * grid.spacing**2:
        raise ResolutionError(
            f"Squeezed variance {spec.squeezed_variance:.3g} is narrower than the grid holds "
            f"(4 dx^2 = {4 * grid.spacing**2:.3g}); use at least "
            f"{int(np.ceil((grid.x_max - grid.x_min) / np.sqrt(spec.squeezed_variance / 4))) + 1} points"
        )
    width = np.sqrt(spec.quadrature_variance(angle))
    if 6 * width > grid.half_width:
        logger.warning(
            f"Squeezed state width {width:.3g} at angle {angle:.3f} crowds grid {grid.describe()}"
        )

    rotated = np.exp(1j * (spec.epsilon - 2 * angle))
    tau = rotated * np.tanh(spec.r)
    curvature = (1 + tau) / (1 - tau)
    prefactor = np.pi**-0.25 / np.sqrt(np.cosh(spec.r) - rotated * np.sinh(spec.r))
    amps = prefactor * np.exp(-0.5 * curvature * grid.points**2)
    return QuadratureWavefunction(grid, amps, angle).normalized()


def make_fock(grid: QuadratureGrid, angle: float, n: int) -> QuadratureWavefunction:
    if n < 0:
        raise ValueError(f"Fock number must be >= 0, got {n}")
    envelope = 2 * np.sqrt(2 * n + 1)
    if grid.half_width <= envelope:
        raise ResolutionError(
            f"Fock state n={n} needs |x| up to {envelope:.3g}; grid {grid.describe()} is too narrow"
        )
    amps = np.exp(-1j * n * angle) * hermite_functions(grid.points, n)[n]
    return QuadratureWavefunction(grid, amps, angle).normalized()


def _coherent_amplitudes(x: np.ndarray, alpha: complex) -> np.ndarray:
    re, im = alpha.real, alpha.imag
    return np.pi**-0.25 * np.exp(
        -((x - np.sqrt(2) * re) ** 2) / 2 + 1j * np.sqrt(2) * im * x - 1j * re * im
    )


def make_coherent(grid: QuadratureGrid, angle: float, alpha: complex) -> QuadratureWavefunction:
    """Coherent state |alpha>, with <x(angle)> = sqrt(2) Re(alpha exp(-i angle))."""
    local = complex(alpha) * np.exp(-1j * angle)
    centre = np.sqrt(2) * abs(local.real)
    if centre + 4 > grid.half_width:
        raise ResolutionError(
            f"Coherent state centred at {centre:.3g} does not fit grid {grid.describe()}"
        )
    amps = _coherent_amplitudes(grid.points, local)
    return QuadratureWavefunction(grid, amps, angle).normalized()


def make_cat(grid: QuadratureGrid, angle: float, alpha: complex) -> QuadratureWavefunction:
    """Even cat state proportional to |alpha> + |-alpha>."""
    plus = make_coherent(grid, angle, alpha)
    minus = make_coherent(grid, angle, -complex(alpha))
    return plus.with_amplitudes(plus.amplitudes + minus.amplitudes).normalized()
