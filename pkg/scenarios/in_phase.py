import logging

import numpy as np

from interaction.evolution import condition_on_outcome, entangle, meter_distribution
from output.writer import marginal_frame, wigner_frame
from quadrature.grid import QuadratureGrid
from quadrature.wavefunction import marginal
from scenarios.base import BaseScenario, ScenarioConfig, ScenarioResult
from scenarios.registry import register
from wigner.filter import conditional_wigner_direct, in_phase_conditional_wigner

logger = logging.getLogger(__name__)

WIGNER_AXIS = QuadratureGrid(-5.0, 5.0, 101)
OUTCOME_QUANTILES = (0.1, 0.3, 0.5, 0.7, 0.9)


def outcome_quantiles(points: np.ndarray, density: np.ndarray, quantiles=OUTCOME_QUANTILES) -> np.ndarray:
    """Meter grid points at the given quantiles of the outcome distribution."""
    cdf = np.cumsum(density)
    cdf /= cdf[-1]
    return points[np.searchsorted(cdf, quantiles)]


@register
class InPhaseScenario(BaseScenario):
    """Homodyne along the pump quadrature: the meter learns nothing and the signal density is untouched."""

    @property
    def name(self) -> str:
        return "in_phase"

    @property
    def description(self) -> str:
        return "theta = phi: meter marginal unchanged, signal Wigner only translated in momentum"

    def run(self, config: ScenarioConfig) -> ScenarioResult:
        cfg = config.interaction(default_offset=0.0)
        if not cfg.is_in_phase:
            logger.warning(f"Configured homodyne angle is not in phase ({cfg.describe()})")
        signal = config.signal.build(config.grid, cfg.signal_angle)
        meter = config.meter_spec(cfg.homodyne_angle).build(config.meter_grid, cfg.homodyne_angle)

        state = entangle(signal, meter, cfg)
        before = marginal(meter)
        after = meter_distribution(state)
        marginal_diff = float(np.max(np.abs(after - before)))

        outcomes = outcome_quantiles(config.meter_grid.points, after)
        prior = marginal(signal)
        frames = {"meter_marginal": marginal_frame(config.meter_grid.points, before=before, after=after)}
        columns = {"prior": prior}
        worst_tv = 0.0
        for i, x_m in enumerate(outcomes):
            density = marginal(condition_on_outcome(state, x_m).wavefunction)
            worst_tv = max(worst_tv, 0.5 * float(np.sum(np.abs(density - prior)) * config.grid.spacing))
            columns[f"outcome_{i}"] = density
        frames["signal_conditional_marginals"] = marginal_frame(config.grid.points, **columns)

        x_m = float(outcomes[len(outcomes) // 2])
        conditional = condition_on_outcome(state, x_m)
        direct = conditional_wigner_direct(conditional, WIGNER_AXIS)
        translated = in_phase_conditional_wigner(signal, cfg, x_m, WIGNER_AXIS)
        wigner_residual = float(np.max(np.abs(direct.values - translated.values)))
        frames["wigner_conditional"] = wigner_frame(direct)

        logger.info(
            f"In-phase: meter marginal diff {marginal_diff:.2e}, signal TV {worst_tv:.2e}, "
            f"Wigner translation residual {wigner_residual:.2e}"
        )
        return ScenarioResult(
            scenario=self.name,
            frames=frames,
            metrics={
                "meter_marginal_max_abs_diff": marginal_diff,
                "conditional_signal_max_tv": worst_tv,
                "wigner_translation_residual": wigner_residual,
                "wigner_outcome": x_m,
            },
            flags=[] if marginal_diff < 1e-8 else ["meter_marginal_changed"],
        )
