import numpy as np
import pytest
from scipy.integrate import cumulative_trapezoid
from scipy.stats import kstest

from quadrature.grid import QuadratureGrid
from quadrature.states import StateSpec
from quadrature.wavefunction import marginal, rotate_state
from tomography.acquisition import acquire, back_action_fidelity, marginal_at_phase, sample_homodyne
from tomography.plan import TomographyDataset, TomographyPlan, angular_weights
from tomography.reconstruction import (
    l1_distance,
    ram_lak_kernel,
    reconstruct_marginals,
    reconstruct_wigner,
    signal_marginal,
)

WIDE_METER = QuadratureGrid(-16.0, 16.0, 1024)
FINE_METER = QuadratureGrid(-12.0, 12.0, 1024)


def _moments(x, density):
    dx = x[1] - x[0]
    mean = np.sum(x * density) * dx
    return mean, np.sum((x - mean) ** 2 * density) * dx


@pytest.fixture(scope="module")
def fock_one_dataset():
    grid = QuadratureGrid(-8.0, 8.0, 256)
    plan = TomographyPlan.uniform(32, shots_per_phase=1, squeezing=2.5, kappa=1.0, seed=3, meter_grid=FINE_METER)
    signal = StateSpec("fock", n=1).build(grid)
    return signal, acquire(signal, plan, exact=True, sampled=False)


def test_uniform_angular_weights():
    assert np.allclose(angular_weights(np.arange(8) * np.pi / 8), np.pi / 8)


def test_irregular_angular_weights_cover_half_turn():
    weights = angular_weights([0.0, 0.2, 1.0, 2.5])
    assert weights.sum() == pytest.approx(np.pi)
    assert weights[1] == pytest.approx(0.5)


def test_plan_validation():
    with pytest.raises(ValueError, match=r"\[0, pi\)"):
        TomographyPlan((0.0, np.pi))
    with pytest.raises(ValueError, match="increasing"):
        TomographyPlan((0.5, 0.2))
    with pytest.raises(ValueError):
        TomographyPlan((0.0,), kappa=-1.0)
    assert TomographyPlan.quadrature_angle(np.pi / 2) == pytest.approx(0.0)


def test_plan_overrides_keep_meter_grid():
    plan = TomographyPlan.uniform(4, meter_grid=WIDE_METER)
    changed = plan.with_overrides(shots_per_phase=10)
    assert changed.shots_per_phase == 10
    assert changed.meter_grid == WIDE_METER
    assert changed.phases == plan.phases


@pytest.mark.parametrize(
    "pump_phase, signal_variance", [(np.pi / 2, np.exp(-1.0) / 2), (0.0, np.exp(1.0) / 2)]
)
def test_meter_records_stretched_signal_quadrature(signal_grid, pump_phase, signal_variance):
    plan = TomographyPlan((0.0, np.pi / 2), squeezing=1.0, kappa=1.0, meter_grid=WIDE_METER)
    # squeezed along x(0), stretched along x(pi/2)
    signal = StateSpec("squeezed", r=0.5).build(signal_grid)
    mean, variance = _moments(WIDE_METER.points, marginal_at_phase(signal, plan, pump_phase))
    assert mean == pytest.approx(0.0, abs=1e-8)
    assert variance == pytest.approx(signal_variance + np.exp(-2.0) / 2, rel=1e-6)


def test_acquisition_is_independent_of_worker_count(signal_grid):
    plan = TomographyPlan.uniform(3, shots_per_phase=500, squeezing=1.0, seed=42, meter_grid=WIDE_METER)
    signal = StateSpec("fock", n=1).build(signal_grid)
    serial = acquire(signal, plan, exact=False, workers=1)
    parallel = acquire(signal, plan, exact=False, workers=3)
    assert list(serial.samples) == list(plan.phases)
    for phi in plan.phases:
        assert np.array_equal(serial.samples[phi], parallel.samples[phi])


def test_acquire_needs_something_to_do(signal_grid):
    plan = TomographyPlan.uniform(2, meter_grid=WIDE_METER)
    with pytest.raises(ValueError, match="Nothing to acquire"):
        acquire(StateSpec().build(signal_grid), plan, exact=False, sampled=False)


def test_dataset_validation():
    plan = TomographyPlan.uniform(2, meter_grid=WIDE_METER)
    with pytest.raises(ValueError, match="not part of the plan"):
        TomographyDataset(plan, samples={0.3: np.zeros(4)})
    with pytest.raises(ValueError, match="integrates"):
        TomographyDataset(plan, marginals={0.0: np.ones(WIDE_METER.n_points)})


def test_dataset_persistence(tmp_path):
    plan = TomographyPlan.uniform(3, shots_per_phase=5, seed=9, meter_grid=WIDE_METER)
    rng = np.random.default_rng(0)
    dataset = TomographyDataset(plan, samples={phi: rng.normal(size=5) for phi in plan.phases})
    dataset.save(tmp_path)

    loaded = TomographyDataset.load(tmp_path)
    assert loaded.plan == plan
    assert loaded.shot_counts == dataset.shot_counts
    for phi in plan.phases:
        assert np.allclose(loaded.samples[phi], dataset.samples[phi], rtol=1e-11)


def test_marginal_recovery_and_deconvolution(signal_grid):
    plan = TomographyPlan((0.0, np.pi / 2), squeezing=1.0, kappa=1.0, meter_grid=WIDE_METER)
    signal = StateSpec("fock", n=1).build(signal_grid)
    dataset = acquire(signal, plan, exact=True, sampled=False)

    plain = reconstruct_marginals(dataset, source="exact")
    sharp = reconstruct_marginals(dataset, source="exact", deconvolve=True)
    for blurred, restored in zip(plain, sharp):
        truth_x, truth = signal_marginal(signal, blurred.quadrature_angle)
        assert blurred.total() == pytest.approx(1.0, abs=1e-6)
        blurred_l1 = l1_distance(blurred.x, blurred.density, truth_x, truth)
        restored_l1 = l1_distance(restored.x, restored.density, truth_x, truth)
        assert blurred_l1 < 0.2
        assert restored_l1 < 0.5 * blurred_l1


def test_marginal_recovery_needs_coupling():
    plan = TomographyPlan.uniform(2, kappa=0.0, meter_grid=WIDE_METER)
    with pytest.raises(ValueError, match="kappa = 0"):
        reconstruct_marginals(TomographyDataset(plan))


def test_ramp_filter_has_no_dc_response():
    assert abs(ram_lak_kernel(4096, 0.1).sum()) * 0.1**2 < 1e-3


def test_back_projection_needs_enough_phases(signal_grid):
    plan = TomographyPlan.uniform(8, squeezing=1.0, meter_grid=WIDE_METER)
    dataset = acquire(StateSpec().build(signal_grid), plan, sampled=False)
    with pytest.raises(ValueError, match="at least 16"):
        reconstruct_wigner(dataset)


def test_back_projection_needs_phases_across_half_turn(signal_grid):
    bunched = TomographyPlan(tuple(np.linspace(0.0, 0.19, 16)), squeezing=1.0, meter_grid=WIDE_METER)
    dataset = acquire(StateSpec().build(signal_grid), bunched, sampled=False)
    with pytest.raises(ValueError, match="gap"):
        reconstruct_wigner(dataset)


def test_back_projection_recovers_single_photon(fock_one_dataset):
    _, dataset = fock_one_dataset
    wigner = reconstruct_wigner(dataset, source="exact")
    origin = wigner.value_at(np.array([0.0]), np.array([0.0]))[0]
    assert origin < -0.25
    assert origin == pytest.approx(-1 / np.pi, abs=0.03)
    assert wigner.minimum() < -0.25


def test_recovered_marginals_match_signal(fock_one_dataset):
    signal, dataset = fock_one_dataset
    for item in reconstruct_marginals(dataset)[::8]:
        truth_x, truth = signal_marginal(signal, item.quadrature_angle)
        assert l1_distance(item.x, item.density, truth_x, truth) < 0.02


@pytest.mark.parametrize("delta", [0.3, np.pi / 4, 1.2])
def test_pump_phase_selects_rotated_quadrature(signal_grid, delta):
    plan = TomographyPlan((0.0,), squeezing=1.0, kappa=1.0, meter_grid=WIDE_METER)
    signal = StateSpec("coherent", alpha=1.0 + 0.5j).build(signal_grid)
    direct = marginal_at_phase(signal, plan, 0.9)
    rotated = marginal_at_phase(rotate_state(signal, delta), plan, 0.9 - delta)
    assert np.allclose(direct, rotated, atol=1e-6)


def test_sharper_meter_gives_sharper_marginals(signal_grid):
    signal = StateSpec("fock", n=1).build(signal_grid)
    errors = []
    for r in (0.5, 1.0, 1.5, 2.0, 2.5):
        plan = TomographyPlan((0.0,), squeezing=r, kappa=1.0, meter_grid=FINE_METER)
        (item,) = reconstruct_marginals(acquire(signal, plan, exact=True, sampled=False), source="exact")
        truth_x, truth = signal_marginal(signal, item.quadrature_angle)
        errors.append(l1_distance(item.x, item.density, truth_x, truth))
    assert all(b < a for a, b in zip(errors, errors[1:]))


@pytest.mark.parametrize("squeezing", [1.0, 2.5])
def test_squeezed_meter_disturbs_the_signal(signal_grid, squeezing):
    plan = TomographyPlan((0.0,), squeezing=squeezing, kappa=1.0, meter_grid=FINE_METER)
    signal = StateSpec("fock", n=1).build(signal_grid)
    assert back_action_fidelity(signal, plan, 0.0) < 1 - 1e-4


def test_symmetric_state_reconstructs_symmetrically(fock_one_dataset):
    _, dataset = fock_one_dataset
    wigner = reconstruct_wigner(dataset, source="exact")
    angles = np.linspace(0.0, 2 * np.pi, 12, endpoint=False)
    ring = wigner.value_at(np.cos(angles), np.sin(angles))
    assert np.ptp(ring) < 0.01


def test_sampled_marginals_converge_to_exact(signal_grid):
    signal = StateSpec("fock", n=1).build(signal_grid)
    errors = []
    for shots in (1_000, 10_000, 100_000):
        plan = TomographyPlan((0.0,), shots_per_phase=shots, squeezing=2.5, seed=11, meter_grid=FINE_METER)
        dataset = acquire(signal, plan, exact=True, sampled=True)
        (sampled,) = reconstruct_marginals(dataset, source="samples")
        (exact,) = reconstruct_marginals(dataset, source="exact")
        errors.append(l1_distance(sampled.x, sampled.density, exact.x, exact.density))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 0.1


def test_homodyne_samples_of_vacuum(signal_grid):
    n = 100_000
    plan = TomographyPlan((0.0,), squeezing=2.5, kappa=1.0, meter_grid=FINE_METER)
    signal = StateSpec().build(signal_grid)
    samples = sample_homodyne(signal, plan, 0.0, n, seed=21)

    # vacuum variance 1/2 plus the squeezed kernel e^{-2r}/2
    assert samples.var() == pytest.approx(0.5 + np.exp(-5.0) / 2, abs=3 * 0.5 * np.sqrt(2 / n))

    density = marginal_at_phase(signal, plan, 0.0)
    cdf = cumulative_trapezoid(density, FINE_METER.points, initial=0.0)
    cdf /= cdf[-1]
    assert kstest(samples, lambda x: np.interp(x, FINE_METER.points, cdf)).statistic < 1.63 / np.sqrt(n)


def test_homodyne_samples_are_seeded(signal_grid):
    plan = TomographyPlan((0.0,), squeezing=1.0, meter_grid=WIDE_METER)
    signal = StateSpec("fock", n=1).build(signal_grid)
    first = sample_homodyne(signal, plan, 0.4, 500, seed=9)
    assert np.array_equal(first, sample_homodyne(signal, plan, 0.4, 500, seed=9))
    assert not np.array_equal(first, sample_homodyne(signal, plan, 0.4, 500, seed=10))
    with pytest.raises(ValueError, match="n_shots"):
        sample_homodyne(signal, plan, 0.4, 0, seed=9)


@pytest.fixture(scope="module")
def sampled_plan():
    return TomographyPlan.uniform(32, shots_per_phase=100_000, squeezing=2.5, kappa=1.0, seed=2024, meter_grid=FINE_METER)


def test_sampled_reconstruction_shows_negativity(sampled_plan):
    signal = StateSpec("fock", n=1).build(QuadratureGrid(-8.0, 8.0, 256))
    dataset = acquire(signal, sampled_plan, exact=False, sampled=True)
    assert reconstruct_wigner(dataset, source="samples").minimum() < -0.25


def test_sampled_reconstruction_of_vacuum(sampled_plan):
    signal = StateSpec().build(QuadratureGrid(-8.0, 8.0, 256))
    dataset = acquire(signal, sampled_plan, exact=False, sampled=True)
    wigner = reconstruct_wigner(dataset, source="samples")
    xx, pp = np.meshgrid(wigner.x_axis.points, wigner.p_axis.points, indexing="ij")
    assert np.max(np.abs(wigner.values - np.exp(-(xx**2) - pp**2) / np.pi)) < 0.02
