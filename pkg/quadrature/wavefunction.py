import logging
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from config import NORM_TOLERANCE
from quadrature.grid import QuadratureGrid

logger = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
MAX_SHEAR_STEP = np.pi / 4


def wrap_angle(angle: float) -> float:
    """Angle reduced to [0, 2pi)."""
    return float(np.mod(angle, TWO_PI))


def wrap_difference(delta: float) -> float:
    """Angle difference reduced to (-pi, pi]."""
    wrapped = float(np.mod(delta + np.pi, TWO_PI) - np.pi)
    return np.pi if wrapped == -np.pi else wrapped


# ---------------------------------------------------------------------------
# Wavefunction type
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuadratureWavefunction:
    """Complex amplitudes psi(x_k; theta) on a uniform quadrature grid."""

    grid: QuadratureGrid
    amplitudes: np.ndarray
    angle: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n_points,):
            raise ValueError(
                f"Amplitude array has shape {amps.shape}, grid expects ({self.grid.n_points},)"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "angle", wrap_angle(self.angle))

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.spacing)

    def normalized(self) -> "QuadratureWavefunction":
        norm = self.norm()
        if norm <= 0:
            raise ValueError("Cannot normalize a wavefunction with zero norm")
        return self.with_amplitudes(self.amplitudes / np.sqrt(norm))

    def is_normalized(self, tol: float = NORM_TOLERANCE) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def with_amplitudes(self, amplitudes: np.ndarray, angle: float | None = None) -> "QuadratureWavefunction":
        return QuadratureWavefunction(self.grid, amplitudes, self.angle if angle is None else angle)

    def at(self, points: np.ndarray) -> np.ndarray:
        """Band-limited (trigonometric) interpolation of the amplitudes at arbitrary points."""
        return spectral_evaluate(self.amplitudes, self.grid, np.asarray(points, dtype=float))


# ---------------------------------------------------------------------------
# Spectral helpers
# ---------------------------------------------------------------------------

def _nyquist_index(n: int) -> int | None:
    return n // 2 if n % 2 == 0 else None


def spectral_evaluate(values: np.ndarray, grid: QuadratureGrid, points: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of grid samples at points.

    values may be 1D (one function) or 2D with functions along the last axis.
    Points outside [x_min, x_max] evaluate to zero rather than to a periodic image.
    """
    n = grid.n_points
    coeffs = sfft.fft(values, axis=-1)
    pts = np.atleast_1d(points)
    offsets = pts - grid.x_min
    basis = np.exp(1j * np.outer(offsets, grid.wavenumbers))
    nyq = _nyquist_index(n)
    if nyq is not None:
        basis[:, nyq] = np.cos(np.pi / grid.spacing * offsets)
    basis[(pts < grid.x_min) | (pts > grid.x_max)] = 0.0
    result = coeffs @ basis.T / n
    return result if np.ndim(points) else result[..., 0]


def spectral_shift(values: np.ndarray, grid: QuadratureGrid, shifts: np.ndarray) -> np.ndarray:
    """Rows f(x + d) for every shift d, by phase ramps in Fourier space.

    Returns an array of shape (len(shifts), n_points).
    """
    coeffs = sfft.fft(values)
    ramps = np.exp(1j * np.outer(shifts, grid.wavenumbers))
    nyq = _nyquist_index(grid.n_points)
    if nyq is not None:
        ramps[:, nyq] = np.cos(np.pi / grid.spacing * np.asarray(shifts))
    return sfft.ifft(ramps * coeffs[None, :], axis=1)


def _fractional_fourier(amplitudes: np.ndarray, grid: QuadratureGrid, delta: float) -> np.ndarray:
    """Apply exp(-i delta n) to grid amplitudes.

    Each step of at most pi/4 is the shear factorization
    exp(-i t x^2/2) exp(-i s p^2/2) exp(-i t x^2/2) with t = tan(step/2),
    s = sin(step), which equals exp(-i step (x^2 + p^2)/2) exactly.
    """
    delta = wrap_difference(delta)
    if delta == 0.0:
        return np.array(amplitudes, dtype=complex)

    n_steps = int(np.ceil(abs(delta) / MAX_SHEAR_STEP))
    step = delta / n_steps
    x = grid.points
    k = grid.wavenumbers
    chirp_x = np.exp(-0.5j * np.tan(step / 2) * x**2)
    chirp_p = np.exp(-0.5j * np.sin(step) * k**2)

    out = np.asarray(amplitudes, dtype=complex)
    for _ in range(n_steps):
        out = chirp_x * sfft.ifft(chirp_p * sfft.fft(chirp_x * out))
    # exp(-i delta n) = exp(i delta/2) exp(-i delta (x^2 + p^2)/2)
    return out * np.exp(0.5j * delta)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def rotate_representation(psi: QuadratureWavefunction, new_angle: float) -> QuadratureWavefunction:
    """Same physical state, represented on the x(new_angle) eigenbasis."""
    delta = wrap_difference(new_angle - psi.angle)
    amps = _fractional_fourier(psi.amplitudes, psi.grid, delta)
    return QuadratureWavefunction(psi.grid, amps, new_angle)


def rotate_state(psi: QuadratureWavefunction, delta: float) -> QuadratureWavefunction:
    """Physically rotate the state by exp(-i delta n), keeping the representation angle."""
    amps = _fractional_fourier(psi.amplitudes, psi.grid, delta)
    return psi.with_amplitudes(amps)


def displace(psi: QuadratureWavefunction, x0: float, p0: float = 0.0) -> QuadratureWavefunction:
    """Weyl displacement exp(i(p0 x - x0 p)) along the representation axes."""
    shifted = spectral_shift(psi.amplitudes, psi.grid, np.array([-x0]))[0]
    x = psi.grid.points
    amps = shifted * np.exp(1j * p0 * (x - x0 / 2))
    return psi.with_amplitudes(amps).normalized()


def marginal(psi: QuadratureWavefunction) -> np.ndarray:
    """Probability density |psi(x_k)|^2; sums to one after multiplying by the spacing."""
    return np.abs(psi.amplitudes) ** 2


def _check_compatible(psi: QuadratureWavefunction, phi: QuadratureWavefunction):
    if psi.grid != phi.grid:
        raise ValueError(f"Grid mismatch: {psi.grid.describe()} vs {phi.grid.describe()}")
    if not np.isclose(np.cos(psi.angle - phi.angle), 1.0, atol=1e-12):
        raise ValueError(
            f"Representation angle mismatch: {psi.angle:.6f} vs {phi.angle:.6f}; rotate one first"
        )


def inner_product(psi: QuadratureWavefunction, phi: QuadratureWavefunction) -> complex:
    """<psi|phi> on a shared grid and representation angle."""
    _check_compatible(psi, phi)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes) * psi.grid.spacing)


def fidelity(psi: QuadratureWavefunction, phi: QuadratureWavefunction) -> float:
    return abs(inner_product(psi, phi)) ** 2


def mean_and_variance(psi: QuadratureWavefunction) -> tuple[float, float]:
    density = marginal(psi) * psi.grid.spacing
    x = psi.grid.points
    total = density.sum()
    mean = float(np.sum(x * density) / total)
    variance = float(np.sum((x - mean) ** 2 * density) / total)
    return mean, variance
