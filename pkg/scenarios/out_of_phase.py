import logging

import numpy as np

from interaction.evolution import average_conditional_fidelity, condition_on_outcome, entangle, meter_distribution
from output.writer import marginal_frame, wigner_frame
from quadrature.grid import QuadratureGrid
from quadrature.wavefunction import marginal
from scenarios.base import BaseScenario, ScenarioConfig, ScenarioResult
from scenarios.in_phase import outcome_quantiles
from scenarios.registry import register
from tomography.reconstruction import l1_distance, signal_marginal
from wigner.filter import conditional_wigner_direct, convolution_identity_check, filter_wigner

logger = logging.getLogger(__name__)

WIGNER_AXIS = QuadratureGrid(-5.0, 5.0, 101)


@register
class OutOfPhaseScenario(BaseScenario):
    """Homodyne a quarter period from the pump: the meter records a blurred, rescaled signal density."""

    @property
    def name(self) -> str:
        return "out_of_phase"

    @property
    def description(self) -> str:
        return "theta = phi + pi/2: meter marginal as rescaled signal density, filter and conditional Wigner"

    def run(self, config: ScenarioConfig) -> ScenarioResult:
        cfg = config.interaction(default_offset=np.pi / 2)
        signal = config.signal.build(config.grid, cfg.signal_angle)
        meter = config.meter_spec(cfg.homodyne_angle).build(config.meter_grid, cfg.homodyne_angle)

        state = entangle(signal, meter, cfg)
        recorded = meter_distribution(state)
        frames = {"meter_marginal": marginal_frame(config.meter_grid.points, density=recorded)}
        metrics = {"back_action_fidelity": average_conditional_fidelity(state, signal)}

        # delta-limit reading: x_s = -x_m / (kappa sin(theta - phi))
        c = cfg.shift_per_unit
        if c != 0:
            x = -config.meter_grid.points / c
            order = np.argsort(x)
            rescaled = recorded[order] * abs(c)
            truth_x, truth = signal_marginal(signal, cfg.signal_angle)
            metrics["rescaled_marginal_l1"] = l1_distance(x[order], rescaled, truth_x, truth)
            frames["rescaled_marginal"] = marginal_frame(
                x[order], recovered=rescaled, true=np.interp(x[order], truth_x, truth, left=0.0, right=0.0)
            )

        x_m = float(outcome_quantiles(config.meter_grid.points, recorded, (0.5,))[0])
        conditional = condition_on_outcome(state, x_m)
        frames["signal_conditional_marginal"] = marginal_frame(
            config.grid.points, prior=marginal(signal), posterior=marginal(conditional.wavefunction)
        )
        frames["wigner_conditional"] = wigner_frame(conditional_wigner_direct(conditional, WIGNER_AXIS))
        metrics["outcome"] = x_m

        filt = filter_wigner(meter, cfg, x_m, config.grid, WIGNER_AXIS, conditional.probability_density)
        flags = []
        if filt.grid is not None:
            frames["wigner_filter"] = wigner_frame(filt.grid)
            metrics["filter_path_residual"] = filt.path_residual
            if not filt.paths_agree:
                flags.append("filter_paths_disagree")
        metrics["convolution_residual"] = convolution_identity_check(signal, meter, cfg, x_m)

        logger.info(f"Out-of-phase run at x_m={x_m:.4f}: " + ", ".join(f"{k}={v:.3g}" for k, v in metrics.items()))
        return ScenarioResult(scenario=self.name, frames=frames, metrics=metrics, flags=flags)
