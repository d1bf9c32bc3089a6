"""Marginal recovery and filtered back-projection of the recorded meter data.

At pump phase phi the meter density is the signal density of x(phi - pi/2),
stretched by kappa and blurred by the squeezed meter kernel. Undoing the
stretch gives one projection of the Wigner function per phase; the
projections are ramp filtered and smeared back over phase space.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy.signal import resample

from config import (
    BACKPROJECTION_UPSAMPLE,
    DETECTOR_SPACING,
    MIN_TOMOGRAPHY_PHASES,
    WIGNER_EXTENT,
    WIGNER_POINTS,
)
from quadrature.grid import QuadratureGrid
from quadrature.wavefunction import QuadratureWavefunction, marginal, rotate_representation
from tomography.plan import TomographyDataset, TomographyPlan, angular_weights
from wigner.transform import WignerGrid

logger = logging.getLogger(__name__)

DEFAULT_REGULARIZATION = 1e-3
SOURCES = ("auto", "samples", "exact")


@dataclass
class ReconstructedMarginal:
    pump_phase: float
    quadrature_angle: float
    x: np.ndarray
    density: np.ndarray
    source: str
    deconvolved: bool = False

    @property
    def spacing(self) -> float:
        return float(self.x[1] - self.x[0])

    def total(self) -> float:
        return float(np.sum(self.density) * self.spacing)


def l1_distance(x: np.ndarray, density: np.ndarray, reference_x: np.ndarray, reference_density: np.ndarray) -> float:
    """Integral of |density - reference| over the uniform axis x; the reference is interpolated."""
    reference = np.interp(x, reference_x, reference_density, left=0.0, right=0.0)
    return float(np.sum(np.abs(density - reference)) * (x[1] - x[0]))


def signal_marginal(signal: QuadratureWavefunction, angle: float) -> tuple[np.ndarray, np.ndarray]:
    """True density of x(angle) on the signal grid."""
    rotated = rotate_representation(signal, angle)
    return rotated.grid.points, marginal(rotated)


# ---------------------------------------------------------------------------
# Marginals
# ---------------------------------------------------------------------------

def _resolve_source(dataset: TomographyDataset, source: str) -> str:
    if source not in SOURCES:
        raise ValueError(f"Unknown source '{source}'. Available: {', '.join(SOURCES)}")
    if source == "auto":
        return "samples" if dataset.has_samples else "exact"
    if source == "samples" and not dataset.has_samples:
        raise ValueError("Dataset holds no samples")
    if source == "exact" and not dataset.has_marginals:
        raise ValueError("Dataset holds no exact marginals")
    return source


def kernel_variance(plan: TomographyPlan) -> float:
    """Variance of the squeezed meter kernel in rescaled signal units."""
    return float(np.exp(-2 * plan.squeezing) / 2 / plan.kappa**2)


def wiener_deconvolve(density: np.ndarray, spacing: float, variance: float, regularization: float) -> np.ndarray:
    """Remove a zero-mean Gaussian blur of the given variance; clipped to >= 0 and renormalized."""
    n = density.size
    size = sfft.next_fast_len(2 * n)
    omega = 2 * np.pi * sfft.rfftfreq(size, d=spacing)
    transfer = np.exp(-0.5 * variance * omega**2)
    gain = transfer / (transfer**2 + regularization)
    restored = sfft.irfft(sfft.rfft(density, size) * gain, size)[:n]
    restored = np.clip(restored, 0.0, None)
    return restored / (restored.sum() * spacing)


def reconstruct_marginals(
    dataset: TomographyDataset,
    bins: str | int = "fd",
    source: str = "auto",
    deconvolve: bool = False,
    regularization: float = DEFAULT_REGULARIZATION,
) -> list[ReconstructedMarginal]:
    """Signal quadrature densities x_s = x_m / kappa, one per pump phase."""
    plan = dataset.plan
    if plan.kappa == 0:
        raise ValueError("Cannot rescale meter data recorded with kappa = 0")
    source = _resolve_source(dataset, source)

    results = []
    for phi in dataset.phases:
        if source == "samples":
            if phi not in dataset.samples:
                continue
            density, edges = np.histogram(dataset.samples[phi], bins=bins, density=True)
            centres = (edges[:-1] + edges[1:]) / 2
        else:
            if phi not in dataset.marginals:
                continue
            density, centres = dataset.marginals[phi], plan.meter_grid.points
        x = centres / plan.kappa
        rescaled = density * plan.kappa
        if deconvolve:
            rescaled = wiener_deconvolve(rescaled, x[1] - x[0], kernel_variance(plan), regularization)
        results.append(
            ReconstructedMarginal(phi, plan.quadrature_angle(phi), x, rescaled, source, deconvolve)
        )
    logger.info(f"Recovered {len(results)} marginals from {source}{' (deconvolved)' if deconvolve else ''}")
    return results


# ---------------------------------------------------------------------------
# Filtered back-projection
# ---------------------------------------------------------------------------

def ram_lak_kernel(size: int, spacing: float) -> np.ndarray:
    """Band-limited ramp filter impulse response on `size` taps in FFT (circular) order."""
    taps = np.rint(sfft.fftfreq(size, 1 / size)).astype(int)
    kernel = np.zeros(size)
    kernel[taps == 0] = 1 / (4 * spacing**2)
    odd = taps % 2 != 0
    kernel[odd] = -1 / (np.pi**2 * taps[odd] ** 2 * spacing**2)
    return kernel


def filter_projection(projection: np.ndarray, spacing: float, upsample: int = BACKPROJECTION_UPSAMPLE):
    """Ramp-filtered projection with a cosine window, band-limited upsampled.

    Returns (offsets, values) where offsets count from the first detector in
    units of the original spacing.
    """
    n = projection.size
    size = sfft.next_fast_len(2 * n)
    response = sfft.fft(ram_lak_kernel(size, spacing)).real * spacing
    omega = 2 * np.pi * sfft.fftfreq(size, d=spacing)
    response *= np.cos(omega * spacing / 2)
    filtered = sfft.ifft(sfft.fft(projection, size) * response).real
    fine = resample(filtered, upsample * size)
    keep = upsample * (n - 1) + 1
    return np.arange(keep) / upsample, fine[:keep]


def _detector_projections(dataset: TomographyDataset, source: str, detector_spacing: float):
    """(detector axis, projections) per phase, in rescaled signal units."""
    plan = dataset.plan
    if source == "exact":
        axis = plan.meter_grid.points / plan.kappa
        return axis, [dataset.marginals[phi] * plan.kappa for phi in dataset.phases]

    reach = plan.meter_grid.half_width / plan.kappa
    half_bins = int(np.floor(reach / detector_spacing))
    edges = (np.arange(-half_bins, half_bins + 2) - 0.5) * detector_spacing
    axis = (edges[:-1] + edges[1:]) / 2
    projections = [
        np.histogram(dataset.samples[phi] / plan.kappa, bins=edges, density=True)[0] for phi in dataset.phases
    ]
    return axis, projections


def reconstruct_wigner(
    dataset: TomographyDataset,
    extent: float = WIGNER_EXTENT,
    n_points: int = WIGNER_POINTS,
    source: str = "auto",
    detector_spacing: float = DETECTOR_SPACING,
) -> WignerGrid:
    """Signal Wigner function from the rescaled marginals by filtered back-projection."""
    phases = dataset.phases
    if len(phases) < MIN_TOMOGRAPHY_PHASES:
        logger.warning(f"Only {len(phases)} phases: back-projection would alias")
        raise ValueError(
            f"Need at least {MIN_TOMOGRAPHY_PHASES} pump phases spanning [0, pi) for back-projection, got {len(phases)}"
        )
    gaps = np.diff(np.append(phases, phases[0] + np.pi))
    max_gap = 2 * np.pi / MIN_TOMOGRAPHY_PHASES
    if gaps.max() > max_gap:
        raise ValueError(
            f"Pump phases leave a gap of {gaps.max():.3f} rad; back-projection needs every gap <= {max_gap:.3f} rad"
        )
    if dataset.plan.kappa == 0:
        raise ValueError("Cannot rescale meter data recorded with kappa = 0")
    source = _resolve_source(dataset, source)

    axis, projections = _detector_projections(dataset, source, detector_spacing)
    spacing = axis[1] - axis[0]
    weights = angular_weights(phases)

    grid_axis = QuadratureGrid(-extent, extent, n_points)
    xx, pp = np.meshgrid(grid_axis.points, grid_axis.points, indexing="ij")
    values = np.zeros_like(xx)
    for phi, weight, projection in zip(phases, weights, projections):
        angle = TomographyPlan.quadrature_angle(phi)
        offsets, filtered = filter_projection(projection, spacing)
        t = xx * np.cos(angle) + pp * np.sin(angle)
        values += weight * np.interp(t, axis[0] + offsets * spacing, filtered, left=0.0, right=0.0)

    logger.info(f"Back-projected {len(phases)} {source} projections onto {grid_axis.describe()} squared")
    return WignerGrid(grid_axis, grid_axis, values)
