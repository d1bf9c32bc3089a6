import logging

import numpy as np
import pandas as pd

from audit.amplitude import AUDIT_OUTCOMES, build_probability_amplitude, no_information_audit, qnd_condition_check
from config import DEFAULT_FOCK_DIM, EIGENSTATE_PACKET_SQUEEZING
from fock.oracle import fock_from_spec
from interaction.evolution import condition_on_outcome, entangle
from quadrature.states import StateSpec
from quadrature.wavefunction import marginal
from scenarios.base import BaseScenario, ScenarioConfig, ScenarioResult
from scenarios.registry import register

logger = logging.getLogger(__name__)


@register
class QndAuditScenario(BaseScenario):
    """Probability-amplitude operator audit: QND commutator, amplitude identity and information gained."""

    @property
    def name(self) -> str:
        return "qnd_audit"

    @property
    def description(self) -> str:
        return "[Y, x_s] = 0 check and the no-information theorem for distribution-preserving readouts"

    def run(self, config: ScenarioConfig) -> ScenarioResult:
        cfg = config.interaction(default_offset=np.pi / 2)
        meter_spec = config.meter_spec(cfg.homodyne_angle)
        signal = config.signal.build(config.grid, cfg.signal_angle)
        meter = meter_spec.build(config.meter_grid, cfg.homodyne_angle)
        outcomes = config.audit.get("outcomes", list(AUDIT_OUTCOMES))

        report = no_information_audit(signal, meter, cfg)

        state = entangle(signal, meter, cfg)
        prior = marginal(signal)
        identity_residual = 0.0
        for outcome in outcomes:
            conditional = condition_on_outcome(state, outcome)
            amplitude = build_probability_amplitude(meter, cfg, outcome, config.grid)
            predicted = np.abs(amplitude.values) ** 2 * prior / amplitude.outcome_density(signal)
            identity_residual = max(
                identity_residual, float(np.max(np.abs(marginal(conditional.wavefunction) - predicted)))
            )

        # the truncated oracle cannot hold strongly squeezed meters; the commutator holds for any meter
        oracle_spec = meter_spec
        if meter_spec.kind == "squeezed":
            oracle_r = min(meter_spec.r, config.audit.get("oracle_squeezing", EIGENSTATE_PACKET_SQUEEZING))
            oracle_spec = StateSpec("squeezed", r=oracle_r, epsilon=meter_spec.epsilon)
        fock_meter = fock_from_spec(oracle_spec, config.audit.get("fock_dim", DEFAULT_FOCK_DIM))
        commutator = qnd_condition_check(cfg, fock_meter, outcomes)

        profile = pd.DataFrame(
            {"outcome [quadrature]": report.outcomes, "total_variation": report.total_variation}
        )
        flags = [] if report.consistent else ["information_without_disturbance"]
        if commutator >= 1e-6:
            flags.append("qnd_condition_violated")
        return ScenarioResult(
            scenario=self.name,
            frames={"total_variation_profile": profile},
            documents={"audit_report": report.to_dict()},
            metrics={
                "information_gained": report.information_gained,
                "max_total_variation": report.max_total_variation,
                "distribution_preserved": report.distribution_preserved,
                "qnd_commutator_residual": commutator,
                "amplitude_identity_residual": identity_residual,
            },
            flags=flags,
        )
