import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import rel_entr

from config import CONDITIONING_THRESHOLD
from fock.oracle import (
    FockOperator,
    FockVector,
    evolve_product_hamiltonian,
    quadrature_bras,
    quadrature_operator,
)
from interaction.base import InteractionConfig
from interaction.evolution import entangle, filter_amplitude, meter_distribution, represent_at
from quadrature.grid import QuadratureGrid
from quadrature.wavefunction import QuadratureWavefunction, mean_and_variance

logger = logging.getLogger(__name__)

PRESERVATION_TOLERANCE = 1e-6
AUDIT_OUTCOMES = (-1.0, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Probability-amplitude operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProbabilityAmplitudeOperator:
    """Y(x_s, x_m) = <x_m|U|psi_m>, diagonal in x_s(phi + pi/2) on the signal grid."""

    outcome: float
    values: np.ndarray
    signal_grid: QuadratureGrid
    config: InteractionConfig

    def apply(self, signal: QuadratureWavefunction) -> np.ndarray:
        signal = represent_at(signal, self.config.signal_angle)
        if signal.grid != self.signal_grid:
            raise ValueError("Signal grid does not match the operator grid")
        return self.values * signal.amplitudes

    def outcome_density(self, signal: QuadratureWavefunction) -> float:
        """W(x_m) = integral |Y|^2 |psi_s|^2 dx_s."""
        return float(np.sum(np.abs(self.apply(signal)) ** 2) * self.signal_grid.spacing)

    def as_matrix(self) -> np.ndarray:
        return np.diag(self.values)


def build_probability_amplitude(
    meter: QuadratureWavefunction, cfg: InteractionConfig, outcome: float, signal_grid: QuadratureGrid
) -> ProbabilityAmplitudeOperator:
    values = filter_amplitude(meter, cfg, outcome, signal_grid.points)
    return ProbabilityAmplitudeOperator(float(outcome), values, signal_grid, cfg)


def fock_probability_amplitude(
    meter: FockVector, cfg: InteractionConfig, outcome: float
) -> FockOperator:
    """Y in the truncated number basis, one column per evolved |n> (x) |psi_m>."""
    dim = meter.dim
    bra = quadrature_bras(np.array([outcome]), cfg.homodyne_angle, dim)[0]
    columns = []
    basis = np.eye(dim)
    for n in range(dim):
        # basis columns skip the leakage guard
        evolved = evolve_product_hamiltonian(
            FockVector(basis[n]), meter, cfg.kappa, cfg.pump_phase, cfg.homodyne_angle, monitor_leakage=False
        )
        columns.append(evolved.coefficients @ bra)
    return FockOperator(np.column_stack(columns))


def qnd_condition_check(
    cfg: InteractionConfig, meter: FockVector, outcomes=AUDIT_OUTCOMES
) -> float:
    """Largest spectral norm of [Y(x_m), x_s(phi + pi/2)] over the outcomes."""
    x_s = quadrature_operator(cfg.signal_angle, meter.dim)
    residual = 0.0
    for outcome in outcomes:
        y = fock_probability_amplitude(meter, cfg, outcome)
        residual = max(residual, float(np.linalg.norm(y.commutator(x_s).matrix, ord=2)))
    logger.info(f"QND commutator residual {residual:.2e} ({cfg.describe()})")
    return residual


# ---------------------------------------------------------------------------
# Information audit
# ---------------------------------------------------------------------------

@dataclass
class AuditReport:
    config: dict
    distribution_preserved: bool
    information_gained: float
    max_total_variation: float
    signal_estimate: float | None
    outcomes: list[float] = field(default_factory=list)
    total_variation: list[float] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        """A preserved distribution must come with no information."""
        return not self.distribution_preserved or self.information_gained < PRESERVATION_TOLERANCE

    def to_dict(self) -> dict:
        return {**asdict(self), "consistent": self.consistent}

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2))
        return path


def no_information_audit(
    signal: QuadratureWavefunction,
    meter: QuadratureWavefunction,
    cfg: InteractionConfig,
    threshold: float = CONDITIONING_THRESHOLD,
) -> AuditReport:
    """Total-variation change of the signal density per outcome and the signal/outcome mutual information."""
    state = entangle(signal, meter, cfg)
    joint = state.joint_density()
    dx_s = state.signal_grid.spacing
    dx_m = state.meter_grid.spacing

    prior = np.sum(joint, axis=1) * dx_m
    outcome_density = meter_distribution(state)
    informative = outcome_density > threshold

    posteriors = joint[:, informative] / outcome_density[informative]
    tv = 0.5 * np.sum(np.abs(posteriors - prior[:, None]), axis=0) * dx_s
    max_tv = float(tv.max(initial=0.0))
    preserved = max_tv < PRESERVATION_TOLERANCE

    independent = np.outer(prior, outcome_density)
    support = (joint > 0) & (independent > 0)
    information = float(np.sum(rel_entr(joint[support], independent[support])) * dx_s * dx_m)
    information = max(information, 0.0)

    estimate = None
    if cfg.shift_per_unit != 0:
        mean_outcome = float(np.sum(state.meter_grid.points * outcome_density) * dx_m)
        meter_mean, _ = mean_and_variance(represent_at(meter, cfg.homodyne_angle))
        estimate = (mean_outcome - meter_mean) / -cfg.shift_per_unit

    report = AuditReport(
        config={
            "kappa": cfg.kappa,
            "pump_phase": cfg.pump_phase,
            "homodyne_angle": cfg.homodyne_angle,
        },
        distribution_preserved=preserved,
        information_gained=information,
        max_total_variation=max_tv,
        signal_estimate=estimate,
        outcomes=state.meter_grid.points[informative].tolist(),
        total_variation=tv.tolist(),
    )
    if not report.consistent:
        logger.warning(f"Distribution preserved but {information:.2e} nats gained ({cfg.describe()})")
    logger.info(
        f"Audit ({cfg.describe()}): max TV {max_tv:.2e}, information {information:.3e} nats, "
        f"preserved={preserved}"
    )
    return report
