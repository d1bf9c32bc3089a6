import logging
from concurrent.futures import ThreadPoolExecutor, as_completed

import numpy as np
from tqdm import tqdm

from config import PHASE_WORKERS
from interaction.evolution import average_conditional_fidelity, entangle, meter_distribution
from interaction.sampling import InverseCdfSampler, spawn_generators
from quadrature.states import make_squeezed_vacuum
from quadrature.wavefunction import QuadratureWavefunction
from tomography.plan import TomographyDataset, TomographyPlan

logger = logging.getLogger(__name__)


def _locked_meter(plan: TomographyPlan, pump_phase: float) -> QuadratureWavefunction:
    cfg = plan.interaction(pump_phase)
    return make_squeezed_vacuum(plan.meter_grid, cfg.homodyne_angle, plan.meter_spec(pump_phase))


def marginal_at_phase(signal: QuadratureWavefunction, plan: TomographyPlan, pump_phase: float) -> np.ndarray:
    """Exact meter density W(x_m) on plan.meter_grid after coupling a fresh locked meter at this pump phase."""
    state = entangle(signal, _locked_meter(plan, pump_phase), plan.interaction(pump_phase))
    return meter_distribution(state)


def sample_homodyne(
    signal: QuadratureWavefunction,
    plan: TomographyPlan,
    pump_phase: float,
    n_shots: int,
    seed: int | np.random.SeedSequence | np.random.Generator,
    density: np.ndarray | None = None,
) -> np.ndarray:
    """n_shots i.i.d. homodyne outcomes; the signal is re-prepared for every shot.

    density, when given, is the already computed marginal_at_phase for this pump phase.
    """
    if n_shots < 1:
        raise ValueError(f"n_shots must be >= 1, got {n_shots}")
    if density is None:
        density = marginal_at_phase(signal, plan, pump_phase)
    sampler = InverseCdfSampler(plan.meter_grid.points, density)
    return sampler.sample(n_shots, np.random.default_rng(seed))


def back_action_fidelity(signal: QuadratureWavefunction, plan: TomographyPlan, pump_phase: float) -> float:
    """Outcome-averaged fidelity of the post-measurement signal with the input."""
    state = entangle(signal, _locked_meter(plan, pump_phase), plan.interaction(pump_phase))
    return average_conditional_fidelity(state, signal)


def _acquire_one(
    signal: QuadratureWavefunction,
    plan: TomographyPlan,
    pump_phase: float,
    rng: np.random.Generator,
    exact: bool,
    sampled: bool,
) -> tuple[float, np.ndarray | None, np.ndarray | None]:
    density = marginal_at_phase(signal, plan, pump_phase)
    samples = None
    if sampled:
        samples = sample_homodyne(signal, plan, pump_phase, plan.shots_per_phase, rng, density=density)
    return pump_phase, density if exact else None, samples


def acquire(
    signal: QuadratureWavefunction,
    plan: TomographyPlan,
    exact: bool = True,
    sampled: bool = True,
    workers: int = PHASE_WORKERS,
) -> TomographyDataset:
    """
    Run the whole pump-phase sweep.

    Every phase gets its own generator spawned from plan.seed, so the result
    does not depend on worker count or completion order.
    """
    if not (exact or sampled):
        raise ValueError("Nothing to acquire: enable exact marginals, sampling, or both")

    generators = spawn_generators(plan.seed, plan.n_phases)
    marginals: dict[float, np.ndarray] = {}
    samples: dict[float, np.ndarray] = {}

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        futures = {
            executor.submit(_acquire_one, signal, plan, phi, rng, exact, sampled): phi
            for phi, rng in zip(plan.phases, generators)
        }
        for future in tqdm(as_completed(futures), total=len(futures), desc="Acquiring phases"):
            phi, density, outcomes = future.result()
            if density is not None:
                marginals[phi] = density
            if outcomes is not None:
                samples[phi] = outcomes

    ordered = plan.phases
    logger.info(
        f"Acquired {plan.n_phases} phases (kappa={plan.kappa:g}, r={plan.squeezing:g}"
        f"{f', {plan.shots_per_phase} shots each' if sampled else ''})"
    )
    return TomographyDataset(
        plan,
        samples={phi: samples[phi] for phi in ordered if phi in samples},
        marginals={phi: marginals[phi] for phi in ordered if phi in marginals},
    )
