import numpy as np
import pytest

from interaction.base import InteractionConfig
from interaction.evolution import condition_on_outcome, entangle
from quadrature.grid import QuadratureGrid, induced_momentum_grid
from quadrature.states import StateSpec
from quadrature.wavefunction import marginal
from wigner.filter import (
    conditional_wigner_direct,
    convolution_identity_check,
    filter_wigner,
    in_phase_conditional_wigner,
)
from wigner.transform import PURE_STATE_BOUND, WignerGrid, wigner_transform

P_AXIS = QuadratureGrid(-5.0, 5.0, 101)


def test_vacuum_wigner(odd_grid):
    w = wigner_transform(StateSpec().build(odd_grid))
    centre = odd_grid.n_points // 2
    assert w.values[centre, centre] == pytest.approx(1 / np.pi, abs=1e-8)
    assert w.normalization() == pytest.approx(1.0, abs=1e-8)
    assert w.purity() == pytest.approx(1 / (2 * np.pi), rel=1e-6)


def test_single_photon_is_negative_at_origin(odd_grid):
    w = wigner_transform(StateSpec("fock", n=1).build(odd_grid))
    centre = odd_grid.n_points // 2
    assert w.values[centre, centre] == pytest.approx(-1 / np.pi, abs=1e-8)
    assert w.minimum() == pytest.approx(-1 / np.pi, abs=1e-8)
    assert w.bound_violation() < 1e-9


def test_marginals_reproduce_densities(odd_grid):
    psi = StateSpec("cat", alpha=1.5).build(odd_grid)
    w = wigner_transform(psi)
    assert np.allclose(w.marginal_x(), marginal(psi), atol=1e-8)


def test_explicit_momentum_axis_matches_fft(odd_grid):
    psi = StateSpec("squeezed", r=0.4, epsilon=0.9).build(odd_grid)
    fast = wigner_transform(psi)
    explicit = wigner_transform(psi, induced_momentum_grid(odd_grid))
    assert np.allclose(fast.values, explicit.values, atol=1e-10)


def test_value_lookup_off_grid_is_zero(odd_grid):
    w = wigner_transform(StateSpec().build(odd_grid), P_AXIS)
    assert w.value_at(np.array([20.0]), np.array([0.0]))[0] == 0.0
    assert w.value_at(np.array([0.0]), np.array([0.0]))[0] == pytest.approx(PURE_STATE_BOUND, abs=1e-8)


def test_wigner_grid_shape_check(odd_grid):
    with pytest.raises(ValueError, match="shape"):
        WignerGrid(odd_grid, P_AXIS, np.zeros((3, 3)))


def test_in_phase_conditional_is_a_momentum_translation(signal_grid, meter_grid):
    cfg = InteractionConfig.in_phase(1.0, 0.3)
    signal = StateSpec("fock", n=1).build(signal_grid, cfg.signal_angle)
    meter = StateSpec("squeezed", r=0.5).build(meter_grid, cfg.homodyne_angle)
    x_m = meter_grid.points[540]
    conditional = condition_on_outcome(entangle(signal, meter, cfg), x_m)

    direct = conditional_wigner_direct(conditional, P_AXIS)
    translated = in_phase_conditional_wigner(signal, cfg, x_m, P_AXIS)
    assert np.max(np.abs(direct.values - translated.values)) < 1e-8


def test_in_phase_translation_rejects_other_angles(signal_grid):
    cfg = InteractionConfig.out_of_phase(1.0)
    with pytest.raises(ValueError, match="not in phase"):
        in_phase_conditional_wigner(StateSpec().build(signal_grid, cfg.signal_angle), cfg, 0.0)


def test_in_phase_filter_is_flagged_as_translation(signal_grid, meter_grid):
    cfg = InteractionConfig.in_phase(2.0)
    filt = filter_wigner(StateSpec().build(meter_grid, cfg.homodyne_angle), cfg, 0.5, signal_grid)
    assert filt.in_phase
    assert filt.grid is None
    assert filt.momentum_shift == pytest.approx(1.0)


@pytest.mark.parametrize("delta", [np.pi / 4, np.pi / 2])
def test_filter_paths_and_convolution(signal_grid, meter_grid, delta):
    cfg = InteractionConfig(1.0, 0.0, delta)
    signal = StateSpec().build(signal_grid, cfg.signal_angle)
    meter = StateSpec("squeezed", r=1.0).build(meter_grid, cfg.homodyne_angle)
    x_m = 0.25
    density = condition_on_outcome(entangle(signal, meter, cfg), x_m).probability_density

    filt = filter_wigner(meter, cfg, x_m, signal_grid, probability_density=density)
    assert filt.paths_agree
    assert convolution_identity_check(signal, meter, cfg, x_m) < 1e-5


def test_convolution_needs_symmetric_axis(signal_grid, meter_grid):
    cfg = InteractionConfig.out_of_phase(1.0)
    signal = StateSpec().build(signal_grid, cfg.signal_angle)
    meter = StateSpec().build(meter_grid, cfg.homodyne_angle)
    with pytest.raises(ValueError, match="symmetric"):
        convolution_identity_check(signal, meter, cfg, 0.0, QuadratureGrid(-5.0, 5.0, 100))
