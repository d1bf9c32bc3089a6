import logging

import numpy as np
import pandas as pd

from output.writer import wigner_frame
from scenarios.base import BaseScenario, ScenarioConfig, ScenarioResult
from scenarios.registry import register
from tomography.acquisition import acquire
from tomography.plan import TomographyPlan
from tomography.reconstruction import l1_distance, reconstruct_marginals, reconstruct_wigner, signal_marginal
from wigner.transform import WignerGrid, wigner_transform

logger = logging.getLogger(__name__)


def true_wigner_on(signal, reference: WignerGrid) -> WignerGrid:
    """True signal Wigner function resampled onto the reconstruction grid."""
    exact = wigner_transform(signal, reference.p_axis)
    xx, pp = np.meshgrid(reference.x_axis.points, reference.p_axis.points, indexing="ij")
    return WignerGrid(reference.x_axis, reference.p_axis, exact.value_at(xx, pp))


@register
class TomographyScenario(BaseScenario):
    """Pump-phase sweep with a locked squeezed meter, marginal recovery and back-projection."""

    requires_seed = True

    @property
    def name(self) -> str:
        return "tomography"

    @property
    def description(self) -> str:
        return "endoscopic tomography: sampled homodyne sweep, rescaled marginals, filtered back-projection"

    def run(self, config: ScenarioConfig) -> ScenarioResult:
        self.validate(config)
        plan = TomographyPlan.uniform(
            config.tomography_phases,
            shots_per_phase=config.tomography_shots,
            squeezing=config.tomography_squeezing,
            kappa=config.kappa,
            seed=config.seed,
            meter_grid=config.meter_grid,
        )
        exact = config.tomography.get("exact", True)
        sampled = config.tomography.get("sampled", True)
        source = config.tomography.get("source", "auto")

        signal = config.signal.build(config.grid, 0.0)
        dataset = acquire(signal, plan, exact=exact, sampled=sampled, workers=config.workers)

        frames = {}
        if dataset.has_samples:
            frames["samples"] = dataset.samples_frame()
        if dataset.has_marginals:
            frames["meter_marginals"] = dataset.marginals_frame()

        recovered = reconstruct_marginals(dataset, source=source)
        errors = []
        rows = []
        for item in recovered:
            truth_x, truth = signal_marginal(signal, item.quadrature_angle)
            errors.append(l1_distance(item.x, item.density, truth_x, truth))
            rows.append(
                pd.DataFrame(
                    {
                        "phase [rad]": item.pump_phase,
                        "angle [rad]": item.quadrature_angle,
                        "x [quadrature]": item.x,
                        "density [1/quadrature]": item.density,
                    }
                )
            )
        frames["recovered_marginals"] = pd.concat(rows, ignore_index=True)

        wigner = reconstruct_wigner(dataset, source=source)
        truth = true_wigner_on(signal, wigner)
        frames["wigner_reconstructed"] = wigner_frame(wigner)
        frames["wigner_true"] = wigner_frame(truth)

        centre = wigner.value_at(np.array([0.0]), np.array([0.0]))[0]
        metrics = {
            "phases": plan.n_phases,
            "shots_per_phase": plan.shots_per_phase if sampled else 0,
            "marginal_l1_mean": float(np.mean(errors)),
            "marginal_l1_max": float(np.max(errors)),
            "wigner_min": wigner.minimum(),
            "wigner_origin": float(centre),
            "wigner_sup_error": float(np.max(np.abs(wigner.values - truth.values))),
            "wigner_normalization": wigner.normalization(),
        }
        logger.info(
            f"Tomography: min W {metrics['wigner_min']:.4f}, sup error {metrics['wigner_sup_error']:.4f}, "
            f"mean marginal L1 {metrics['marginal_l1_mean']:.4f}"
        )
        return ScenarioResult(
            scenario=self.name,
            frames=frames,
            documents={"dataset": dataset.sidecar()},
            metrics=metrics,
        )
