import logging

import numpy as np

from config import DEFAULT_SHOTS
from interaction.base import InteractionConfig
from interaction.evolution import entangle, meter_distribution
from interaction.weak import weak_measurement_estimate
from output.writer import marginal_frame
from quadrature.states import SqueezedVacuumSpec, make_squeezed_vacuum
from scenarios.base import BaseScenario, ScenarioConfig, ScenarioResult
from scenarios.registry import register

logger = logging.getLogger(__name__)

DEFAULT_METER_ANTISQUEEZING = 1.5


@register
class WeakScenario(BaseScenario):
    """Weak out-of-phase coupling with a broad meter; the mean meter shift estimates <x_s>."""

    requires_seed = True

    @property
    def name(self) -> str:
        return "weak"

    @property
    def description(self) -> str:
        return "weak coupling, broad meter: estimate <x_s(phi + pi/2)> from the mean outcome shift"

    def run(self, config: ScenarioConfig) -> ScenarioResult:
        self.validate(config)
        cfg = InteractionConfig.out_of_phase(config.kappa, config.pump_phase)
        shots = config.weak.get("shots", DEFAULT_SHOTS)
        r = config.weak.get("meter_squeezing", DEFAULT_METER_ANTISQUEEZING)

        signal = config.signal.build(config.grid, cfg.signal_angle)
        # squeezed along the pump quadrature, broad along the homodyne axis
        meter = make_squeezed_vacuum(config.meter_grid, cfg.homodyne_angle, SqueezedVacuumSpec.aligned(r, cfg.pump_phase))

        result = weak_measurement_estimate(signal, meter, cfg, shots, config.seed)
        recorded = meter_distribution(entangle(signal, meter, cfg))
        frames = {
            "meter_marginal": marginal_frame(
                config.meter_grid.points, before=np.abs(meter.amplitudes) ** 2, after=recorded
            )
        }
        flags = [] if result.weak_condition_met else ["weakness_condition_violated"]
        logger.info(
            f"Weak estimate {result.estimate:.4f} +/- {result.standard_error:.4f} "
            f"(true {result.true_mean:.4f}, z={result.z_score:.2f})"
        )
        return ScenarioResult(
            scenario=self.name,
            frames=frames,
            documents={"weak_estimate": result.to_dict()},
            metrics={**result.to_dict(), "z_score": result.z_score},
            flags=flags,
        )
