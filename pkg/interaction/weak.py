import logging
from dataclasses import asdict, dataclass

import numpy as np

from config import WEAKNESS_RATIO
from interaction.base import InteractionConfig
from interaction.evolution import represent_at, average_conditional_fidelity, entangle, meter_distribution
from interaction.sampling import InverseCdfSampler
from quadrature.wavefunction import QuadratureWavefunction, mean_and_variance

logger = logging.getLogger(__name__)


@dataclass
class WeakMeasurementResult:
    estimate: float
    standard_error: float
    true_mean: float
    n_shots: int
    weakness_ratio: float
    weak_condition_met: bool
    conditional_fidelity: float
    meter_mean: float
    sample_mean: float

    @property
    def z_score(self) -> float:
        return (self.estimate - self.true_mean) / self.standard_error

    def to_dict(self) -> dict:
        return asdict(self)


def weak_measurement_estimate(
    signal: QuadratureWavefunction,
    meter: QuadratureWavefunction,
    cfg: InteractionConfig,
    n_shots: int,
    seed: int,
) -> WeakMeasurementResult:
    """Estimate <x_s(phi + pi/2)> from the mean shift of out-of-phase meter outcomes."""
    if cfg.kappa == 0:
        raise ValueError("Weak estimator needs kappa > 0; with no coupling the meter carries no signal")
    if n_shots < 2:
        raise ValueError(f"Need at least 2 shots, got {n_shots}")
    if not np.isclose(np.sin(cfg.delta), 1.0):
        logger.info(f"Weak estimate reads the out-of-phase quadrature; overriding homodyne angle ({cfg.describe()})")
        cfg = InteractionConfig.out_of_phase(cfg.kappa, cfg.pump_phase)

    signal = represent_at(signal, cfg.signal_angle)
    meter = represent_at(meter, cfg.homodyne_angle)
    true_mean, signal_var = mean_and_variance(signal)
    meter_mean, meter_var = mean_and_variance(meter)

    ratio = float(np.sqrt(meter_var) / (cfg.kappa * np.sqrt(signal_var)))
    weak = ratio >= WEAKNESS_RATIO
    if not weak:
        logger.warning(f"Weakness ratio {ratio:.2f} below {WEAKNESS_RATIO}; the meter disturbs the signal")

    state = entangle(signal, meter, cfg)
    sampler = InverseCdfSampler(state.meter_grid.points, meter_distribution(state))
    samples = sampler.sample(n_shots, np.random.default_rng(seed))

    # meter outcomes are shifted by -kappa sin(theta - phi) x_s
    slope = -cfg.shift_per_unit
    sample_mean = float(samples.mean())
    estimate = (sample_mean - meter_mean) / slope
    standard_error = float(samples.std(ddof=1) / np.sqrt(n_shots) / abs(slope))

    return WeakMeasurementResult(
        estimate=float(estimate),
        standard_error=standard_error,
        true_mean=true_mean,
        n_shots=n_shots,
        weakness_ratio=ratio,
        weak_condition_met=weak,
        conditional_fidelity=average_conditional_fidelity(state, signal),
        meter_mean=meter_mean,
        sample_mean=sample_mean,
    )
