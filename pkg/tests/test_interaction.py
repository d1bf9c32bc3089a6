import numpy as np
import pytest
from scipy.stats import norm

from interaction.base import InteractionConfig
from interaction.evolution import (
    average_conditional_fidelity,
    condition_on_outcome,
    entangle,
    gamma_phase,
    meter_distribution,
)
from interaction.sampling import InverseCdfSampler, spawn_generators
from interaction.weak import weak_measurement_estimate
from quadrature.grid import QuadratureGrid, ResolutionError
from quadrature.states import SqueezedVacuumSpec, StateSpec, make_squeezed_vacuum
from quadrature.wavefunction import marginal
from scenarios.identity_checks import COHERENT, SQUEEZED, entangle_oracle_residual, rotation_oracle_residual

VACUUM = StateSpec()
FOCK_ONE = StateSpec("fock", n=1)


def test_coupling_from_physical_parameters():
    cfg = InteractionConfig.from_physical(sigma=0.25, t=2.0, pump_phase=0.1)
    assert cfg.kappa == pytest.approx(1.0)
    assert cfg.homodyne_angle == pytest.approx(0.1 + np.pi / 2)
    assert cfg.shift_per_unit == pytest.approx(1.0)


def test_coupling_validation():
    with pytest.raises(ValueError):
        InteractionConfig(-0.5)
    assert InteractionConfig.in_phase(1.0, 0.3).is_in_phase
    assert not InteractionConfig.out_of_phase(1.0, 0.3).is_in_phase


def test_gamma_phase_in_phase_is_bilinear():
    cfg = InteractionConfig.in_phase(0.8, 0.3)
    x_s, x_m = np.array([-1.5, 0.5, 2.0]), np.array([0.7, -2.0, 1.1])
    assert np.allclose(gamma_phase(x_s, x_m, cfg), 0.8 * x_s * x_m, atol=1e-12)


def test_gamma_phase_vanishes_out_of_phase():
    cfg = InteractionConfig.out_of_phase(1.3, 0.3)
    x_s, x_m = np.meshgrid(np.linspace(-3, 3, 7), np.linspace(-4, 4, 9))
    assert np.max(np.abs(gamma_phase(x_s, x_m, cfg))) < 1e-12


@pytest.mark.parametrize("cfg", [InteractionConfig(1.0, 0.2, 1.0), InteractionConfig(0.5, 0.0, np.pi / 4)])
def test_gamma_phase_zero_at_origin(cfg):
    assert np.allclose(gamma_phase(0.0, np.linspace(-5, 5, 11), cfg), 0.0)
    # (kappa x_s / 2)^2 sin 2 delta + kappa x_s x_m cos delta
    expected = (cfg.kappa / 2) ** 2 * np.sin(2 * cfg.delta) + 2 * cfg.kappa * np.cos(cfg.delta)
    assert gamma_phase(1.0, 2.0, cfg) == pytest.approx(expected)


def test_in_phase_meter_marginal_unchanged(signal_grid, meter_grid):
    cfg = InteractionConfig.in_phase(1.0, 0.3)
    meter = VACUUM.build(meter_grid, cfg.homodyne_angle)
    state = entangle(FOCK_ONE.build(signal_grid, cfg.signal_angle), meter, cfg)
    assert np.max(np.abs(meter_distribution(state) - marginal(meter))) < 1e-10


def test_in_phase_conditioning_keeps_signal_density(signal_grid, meter_grid):
    cfg = InteractionConfig.in_phase(1.0, 0.3)
    signal = FOCK_ONE.build(signal_grid, cfg.signal_angle)
    state = entangle(signal, VACUUM.build(meter_grid, cfg.homodyne_angle), cfg)
    conditional = condition_on_outcome(state, meter_grid.points[530])
    assert np.allclose(marginal(conditional.wavefunction), marginal(signal), atol=1e-10)


def test_out_of_phase_vacua_give_unit_variance_outcomes(signal_grid, meter_grid):
    cfg = InteractionConfig.out_of_phase(1.0)
    state = entangle(VACUUM.build(signal_grid, cfg.signal_angle), VACUUM.build(meter_grid, cfg.homodyne_angle), cfg)
    assert np.allclose(meter_distribution(state), norm.pdf(meter_grid.points), atol=1e-8)


def test_out_of_phase_shift_tracks_signal_mean(signal_grid, meter_grid):
    cfg = InteractionConfig.out_of_phase(0.5)
    # <x(pi/2)> = sqrt(2) Im(alpha) = 1
    signal = StateSpec("coherent", alpha=1j / np.sqrt(2)).build(signal_grid, cfg.signal_angle)
    state = entangle(signal, VACUUM.build(meter_grid, cfg.homodyne_angle), cfg)
    mean = np.sum(meter_grid.points * meter_distribution(state)) * meter_grid.spacing
    assert mean == pytest.approx(-0.5, abs=1e-8)


def test_conditioning_guards(signal_grid, meter_grid):
    cfg = InteractionConfig.out_of_phase(1.0)
    state = entangle(VACUUM.build(signal_grid, cfg.signal_angle), VACUUM.build(meter_grid, cfg.homodyne_angle), cfg)
    with pytest.raises(ValueError, match="outside meter grid"):
        condition_on_outcome(state, 20.0)
    with pytest.raises(ValueError, match="too rare"):
        condition_on_outcome(state, 15.9)
    assert condition_on_outcome(state, 0.4).wavefunction.is_normalized(1e-9)


def test_no_coupling_leaves_signal_intact(signal_grid, meter_grid):
    cfg = InteractionConfig(0.0, 0.0, np.pi / 2)
    signal = FOCK_ONE.build(signal_grid, cfg.signal_angle)
    state = entangle(signal, VACUUM.build(meter_grid, cfg.homodyne_angle), cfg)
    assert average_conditional_fidelity(state, signal) == pytest.approx(1.0, abs=1e-10)


def test_strong_coupling_disturbs_signal(signal_grid, meter_grid):
    cfg = InteractionConfig.out_of_phase(1.0)
    signal = FOCK_ONE.build(signal_grid, cfg.signal_angle)
    state = entangle(signal, VACUUM.build(meter_grid, cfg.homodyne_angle), cfg)
    assert average_conditional_fidelity(state, signal) < 0.95


def test_shift_past_meter_grid_raises(signal_grid):
    cfg = InteractionConfig.out_of_phase(3.0)
    narrow = QuadratureGrid(-4.0, 4.0, 256)
    with pytest.raises(ResolutionError, match="widen the meter grid"):
        entangle(VACUUM.build(signal_grid, cfg.signal_angle), VACUUM.build(narrow, cfg.homodyne_angle), cfg)


def test_inverse_cdf_sampler_moments():
    x = np.linspace(-8, 8, 1001)
    sampler = InverseCdfSampler(x, norm.pdf(x))
    samples = sampler.sample(200_000, np.random.default_rng(11))
    assert samples.mean() == pytest.approx(0.0, abs=0.01)
    assert samples.std() == pytest.approx(1.0, abs=0.01)
    assert sampler.cdf(np.array([0.0]))[0] == pytest.approx(0.5, abs=1e-6)


def test_inverse_cdf_sampler_rejects_empty_density():
    with pytest.raises(ValueError):
        InverseCdfSampler(np.linspace(0, 1, 10), np.zeros(10))


def test_spawned_generators_are_reproducible():
    first = [g.random(3) for g in spawn_generators(5, 3)]
    second = [g.random(3) for g in spawn_generators(5, 3)]
    assert all(np.array_equal(a, b) for a, b in zip(first, second))
    assert not np.array_equal(first[0], first[1])


def test_weak_estimate_recovers_signal_mean(signal_grid):
    cfg = InteractionConfig.out_of_phase(0.2)
    wide = QuadratureGrid(-32.0, 32.0, 1024)
    meter = make_squeezed_vacuum(wide, cfg.homodyne_angle, SqueezedVacuumSpec.aligned(1.5, cfg.pump_phase))
    signal = StateSpec("coherent", alpha=1j / np.sqrt(2)).build(signal_grid, cfg.signal_angle)

    result = weak_measurement_estimate(signal, meter, cfg, 100_000, seed=7)
    assert result.weak_condition_met
    assert result.true_mean == pytest.approx(1.0, abs=1e-6)
    assert abs(result.estimate - result.true_mean) < 3 * result.standard_error
    assert result.conditional_fidelity >= 0.99


def test_weak_estimate_needs_coupling(signal_grid, meter_grid):
    cfg = InteractionConfig(0.0, 0.0, np.pi / 2)
    with pytest.raises(ValueError, match="kappa > 0"):
        weak_measurement_estimate(VACUUM.build(signal_grid), VACUUM.build(meter_grid), cfg, 100, seed=1)


@pytest.mark.parametrize("signal", [VACUUM, SQUEEZED, FOCK_ONE], ids=["vacuum", "squeezed", "fock1"])
@pytest.mark.parametrize("meter", [VACUUM, SQUEEZED], ids=["vacuum", "squeezed"])
def test_entangled_state_matches_fock_evolution(signal, meter):
    worst = max(
        entangle_oracle_residual(signal, meter, InteractionConfig(kappa, 0.0, offset))
        for kappa in (0.5, 1.0)
        for offset in (0.0, np.pi / 4, np.pi / 2)
    )
    assert worst < 1e-5


@pytest.mark.parametrize("spec", [VACUUM, FOCK_ONE, COHERENT])
@pytest.mark.parametrize("delta", [0.7, np.pi / 2, 2.0])
def test_grid_rotation_matches_oracle_rotation(spec, delta):
    assert rotation_oracle_residual(spec, delta) < 1e-6
