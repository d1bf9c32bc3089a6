"""Grid-versus-oracle identity suite behind `check` and the identity_checks scenario."""

import itertools
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from tqdm import tqdm

from fock.identities import baker_hausdorff_residual, displacement_identity_check, meter_displacement_check
from fock.oracle import (
    commutator_residual,
    evolve_product_hamiltonian,
    fock_from_spec,
    fock_to_grid,
    fock_vacuum,
    meter_quadrature_density,
    project_bipartite,
    rotation_operator,
)
from interaction.base import InteractionConfig
from interaction.evolution import condition_on_outcome, entangle, meter_distribution
from quadrature.grid import QuadratureGrid
from quadrature.states import StateSpec
from quadrature.wavefunction import marginal, rotate_representation
from scenarios.base import BaseScenario, ScenarioConfig, ScenarioResult
from scenarios.registry import register
from wigner.filter import convolution_identity_check, filter_wigner

logger = logging.getLogger(__name__)

ORACLE_DIM = 192  # squeezed (x) squeezed at kappa = 1 needs more than 128 levels
ORACLE_SIGNAL_GRID = QuadratureGrid(-16.0, 16.0, 512)
ORACLE_METER_GRID = QuadratureGrid(-24.0, 24.0, 1024)
FILTER_SIGNAL_GRID = QuadratureGrid(-8.0, 8.0, 256)
FILTER_METER_GRID = QuadratureGrid(-16.0, 16.0, 1024)
ROTATION_DIM = 64

VACUUM = StateSpec()
SQUEEZED = StateSpec("squeezed", r=1.0)
FOCK_ONE = StateSpec("fock", n=1)
COHERENT = StateSpec("coherent", alpha=0.8 - 0.4j)


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tolerance)


# ---------------------------------------------------------------------------
# Individual checks
# ---------------------------------------------------------------------------

def entangle_oracle_residual(
    signal: StateSpec,
    meter: StateSpec,
    cfg: InteractionConfig,
    signal_grid: QuadratureGrid = ORACLE_SIGNAL_GRID,
    meter_grid: QuadratureGrid = ORACLE_METER_GRID,
    dim: int = ORACLE_DIM,
) -> float:
    """Sup-norm gap between the grid entangled state and the projected Fock evolution."""
    grid_state = entangle(
        signal.build(signal_grid, cfg.signal_angle), meter.build(meter_grid, cfg.homodyne_angle), cfg
    )
    oracle = evolve_product_hamiltonian(
        fock_from_spec(signal, dim), fock_from_spec(meter, dim), cfg.kappa, cfg.pump_phase, cfg.homodyne_angle
    )
    projected = project_bipartite(oracle, signal_grid.points, meter_grid.points)
    amplitude_gap = float(np.max(np.abs(grid_state.amplitudes - projected)))
    density_gap = float(
        np.max(np.abs(meter_distribution(grid_state) - meter_quadrature_density(oracle, meter_grid.points)))
    )
    return max(amplitude_gap, density_gap)


def rotation_oracle_residual(
    spec: StateSpec, delta: float, grid: QuadratureGrid = FILTER_SIGNAL_GRID, dim: int = ROTATION_DIM
) -> float:
    """Gap between the fractional-Fourier turn of the grid state and exp(-i delta n) in the number basis."""
    vec = fock_from_spec(spec, dim)
    turned = rotate_representation(fock_to_grid(vec, grid, 0.0), delta)
    oracle = fock_to_grid(rotation_operator(delta, dim) @ vec, grid, 0.0)
    return float(np.max(np.abs(turned.amplitudes - oracle.amplitudes)))


def in_phase_residuals(kappa: float = 1.0, pump_phase: float = 0.3) -> tuple[float, float]:
    """(meter marginal change, worst conditional signal TV) for an in-phase readout."""
    cfg = InteractionConfig.in_phase(kappa, pump_phase)
    signal = FOCK_ONE.build(FILTER_SIGNAL_GRID, cfg.signal_angle)
    meter = VACUUM.build(FILTER_METER_GRID, cfg.homodyne_angle)
    state = entangle(signal, meter, cfg)
    marginal_gap = float(np.max(np.abs(meter_distribution(state) - marginal(meter))))
    prior = marginal(signal)
    tv = max(
        0.5 * float(np.sum(np.abs(marginal(condition_on_outcome(state, x_m).wavefunction) - prior)))
        * FILTER_SIGNAL_GRID.spacing
        for x_m in (-1.0, 0.0, 1.0)
    )
    return marginal_gap, tv


def _filter_case(delta: float) -> tuple[float, float]:
    cfg = InteractionConfig(1.0, 0.0, delta)
    signal = VACUUM.build(FILTER_SIGNAL_GRID, cfg.signal_angle)
    meter = SQUEEZED.build(FILTER_METER_GRID, cfg.homodyne_angle)
    x_m = 0.25
    state = entangle(signal, meter, cfg)
    density = condition_on_outcome(state, x_m).probability_density
    filt = filter_wigner(meter, cfg, x_m, FILTER_SIGNAL_GRID, probability_density=density)
    return filt.path_residual, convolution_identity_check(signal, meter, cfg, x_m)


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------

def run_identity_suite(quick: bool = False) -> list[CheckResult]:
    """Every grid/oracle identity with its tolerance. quick trims the sweeps to their corners."""
    results = [CheckResult("fock [x, p] = i on low levels", commutator_residual(), 1e-12)]

    betas = (-2.0, 2.0) if quick else np.linspace(-2, 2, 5)
    deltas = (0.0, np.pi / 2) if quick else (0.0, np.pi / 6, np.pi / 4, np.pi / 2, 2 * np.pi / 3)
    xs = (-2.0, 2.0) if quick else np.linspace(-2, 2, 5)
    worst = 0.0
    for beta, delta, x in tqdm(list(itertools.product(betas, deltas, xs)), desc="Displacement identity"):
        worst = max(worst, displacement_identity_check(beta, 0.0, delta, x))
    results.append(CheckResult("displacement of quadrature eigenstates", worst, 1e-5))

    worst = max(baker_hausdorff_residual(1.0, 0.0, delta) for delta in deltas)
    results.append(CheckResult("displacement factorization", worst, 1e-8))
    results.append(
        CheckResult("meter displacement", meter_displacement_check(fock_vacuum(), 1.0, 0.0, np.pi / 2), 1e-5)
    )

    signals = (VACUUM, FOCK_ONE) if quick else (VACUUM, SQUEEZED, FOCK_ONE)
    meters = (VACUUM,) if quick else (VACUUM, SQUEEZED)
    kappas = (1.0,) if quick else (0.5, 1.0)
    offsets = (0.0, np.pi / 2) if quick else (0.0, np.pi / 4, np.pi / 2)
    cases = list(itertools.product(signals, meters, kappas, offsets))
    worst = 0.0
    for signal, meter, kappa, offset in tqdm(cases, desc="Entangled state vs oracle"):
        cfg = InteractionConfig(kappa, 0.0, offset)
        worst = max(worst, entangle_oracle_residual(signal, meter, cfg))
    results.append(CheckResult("entangled state vs Fock evolution", worst, 1e-5))

    rotations = [(FOCK_ONE, np.pi / 2), (COHERENT, 1.1)] if quick else [
        (spec, delta) for spec in (VACUUM, FOCK_ONE, COHERENT) for delta in (0.7, np.pi / 2, 2.0)
    ]
    worst = max(rotation_oracle_residual(spec, delta) for spec, delta in rotations)
    results.append(CheckResult("grid rotation vs number-basis rotation", worst, 1e-6))

    marginal_gap, tv = in_phase_residuals()
    results.append(CheckResult("in-phase meter marginal unchanged", marginal_gap, 1e-8))
    results.append(CheckResult("in-phase signal density unchanged", tv, 1e-8))

    path_worst, conv_worst = 0.0, 0.0
    for delta in tqdm((np.pi / 2,) if quick else (np.pi / 6, np.pi / 4, np.pi / 2), desc="Filter Wigner"):
        path, conv = _filter_case(delta)
        path_worst, conv_worst = max(path_worst, path), max(conv_worst, conv)
    results.append(CheckResult("filter Wigner paths agree", path_worst, 1e-6))
    results.append(CheckResult("conditional Wigner convolution", conv_worst, 1e-5))

    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.warning(f"{len(failed)} identity checks failed: {failed}")
    return results


def checks_frame(results: list[CheckResult]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "check": [r.name for r in results],
            "residual": [r.residual for r in results],
            "tolerance": [r.tolerance for r in results],
            "passed": [r.passed for r in results],
        }
    )


@register
class IdentityChecksScenario(BaseScenario):
    """Runs the identity suite and records its residuals."""

    @property
    def name(self) -> str:
        return "identity_checks"

    @property
    def description(self) -> str:
        return "displacement identities, grid vs Fock evolution, in-phase theorem, Wigner convolution"

    def run(self, config: ScenarioConfig) -> ScenarioResult:
        results = run_identity_suite()
        return ScenarioResult(
            scenario=self.name,
            frames={"checks": checks_frame(results)},
            metrics={r.name: r.residual for r in results},
            flags=[f"failed: {r.name}" for r in results if not r.passed],
        )
