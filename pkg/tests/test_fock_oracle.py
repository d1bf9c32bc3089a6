import numpy as np
import pytest
from scipy.stats import norm

from fock.identities import (
    baker_hausdorff_residual,
    displacement_identity_check,
    eigenstate_phase,
    meter_displacement_check,
    shifted_eigenvalue,
)
from fock.oracle import (
    commutator_residual,
    evolve_product_hamiltonian,
    fock_coherent,
    fock_from_spec,
    fock_number,
    fock_squeezed,
    fock_to_grid,
    fock_vacuum,
    meter_quadrature_density,
    number_operator,
    quadrature_operator,
    reduced_signal_purity,
    rotation_operator,
)
from quadrature.states import SqueezedVacuumSpec, StateSpec
from quadrature.wavefunction import fidelity, rotate_representation


def test_canonical_commutator():
    assert commutator_residual(32) < 1e-12


def test_quadrature_operator_is_hermitian():
    assert quadrature_operator(0.7, 16).is_hermitian()


@pytest.mark.parametrize(
    "spec",
    [
        StateSpec(),
        StateSpec("fock", n=2),
        StateSpec("squeezed", r=0.5, epsilon=0.3),
        StateSpec("coherent", alpha=0.8 - 0.4j),
        StateSpec("cat", alpha=1.2),
    ],
)
@pytest.mark.parametrize("angle", [0.0, 1.1])
def test_number_basis_matches_grid(signal_grid, spec, angle):
    projected = fock_to_grid(fock_from_spec(spec, 64), signal_grid, angle)
    assert fidelity(projected, spec.build(signal_grid, angle)) > 1 - 1e-9


def test_fock_number_is_exact_on_grid(signal_grid):
    projected = fock_to_grid(fock_number(2, 32), signal_grid, 0.5)
    direct = StateSpec("fock", n=2).build(signal_grid, 0.5)
    assert np.allclose(projected.amplitudes, direct.amplitudes, atol=1e-10)


def test_squeezed_vacuum_photon_number():
    vec = fock_squeezed(SqueezedVacuumSpec(0.4, 1.0), 64)
    assert vec.expectation(number_operator(64)).real == pytest.approx(np.sinh(0.4) ** 2, rel=1e-10)


def test_truncation_guards():
    with pytest.raises(ValueError):
        fock_number(40, 32)
    with pytest.raises(ValueError, match="leaks"):
        fock_coherent(6.0, 32)


def test_eigen_and_krylov_evolution_agree():
    signal = fock_number(1, 32)
    meter = fock_squeezed(SqueezedVacuumSpec(0.3), 32)
    eigen = evolve_product_hamiltonian(signal, meter, 0.5, 0.2, 0.2 + np.pi / 2, method="eigen")
    krylov = evolve_product_hamiltonian(signal, meter, 0.5, 0.2, 0.2 + np.pi / 2, method="krylov")
    assert np.max(np.abs(eigen.coefficients - krylov.coefficients)) < 1e-9
    assert eigen.norm() == pytest.approx(1.0, abs=1e-9)


def test_unknown_evolution_method():
    with pytest.raises(ValueError, match="Unknown evolution method"):
        evolve_product_hamiltonian(fock_vacuum(16), fock_vacuum(16), 1.0, 0.0, 0.0, method="taylor")


def test_coupling_entangles():
    signal, meter = fock_number(1, 48), fock_vacuum(48)
    assert reduced_signal_purity(evolve_product_hamiltonian(signal, meter, 0.0, 0.0, np.pi / 2)) == pytest.approx(1.0)
    assert reduced_signal_purity(evolve_product_hamiltonian(signal, meter, 1.0, 0.0, np.pi / 2)) < 0.9


def test_shifted_eigenvalue_quarter_period():
    assert shifted_eigenvalue(0.3, 1.2, np.pi / 2) == pytest.approx(0.3 - 1.2)


@pytest.mark.parametrize("delta", [0.0, np.pi / 6, np.pi / 2, 2 * np.pi / 3])
def test_displacement_of_eigenstate_packets(delta):
    assert displacement_identity_check(1.5, 0.0, delta, -1.0) < 1e-5


@pytest.mark.parametrize("delta", [np.pi / 4, np.pi / 2])
def test_displacement_factorization(delta):
    assert baker_hausdorff_residual(1.0, 0.0, delta) < 1e-8


def test_meter_displacement():
    assert meter_displacement_check(fock_vacuum(), 1.0, 0.0, np.pi / 2) < 1e-5


def test_eigenstate_phase():
    # quarter period, beta = 1: eigenvalue 0.5 moves to -0.5 with no phase
    assert shifted_eigenvalue(0.5, 1.0, np.pi / 2) == pytest.approx(-0.5)
    assert eigenstate_phase(0.5, 1.0, np.pi / 2) == pytest.approx(0.0, abs=1e-12)
    assert eigenstate_phase(0.5, 1.0, 0.0) == pytest.approx(-0.5)


@pytest.mark.parametrize(
    "spec, delta",
    [(StateSpec("fock", n=1), np.pi / 2), (StateSpec("coherent", alpha=0.8 - 0.4j), 1.1), (StateSpec(), 0.7)],
)
def test_grid_rotation_matches_number_basis_rotation(signal_grid, spec, delta):
    vec = fock_from_spec(spec, 64)
    rotated = rotate_representation(fock_to_grid(vec, signal_grid, 0.0), delta)
    oracle = fock_to_grid(rotation_operator(delta, 64) @ vec, signal_grid, 0.0)
    assert np.allclose(rotated.amplitudes, oracle.amplitudes, atol=1e-7)


def test_oracle_meter_density_for_coupled_vacua():
    state = evolve_product_hamiltonian(fock_vacuum(48), fock_vacuum(48), 1.0, 0.0, np.pi / 2)
    points = np.linspace(-4, 4, 81)
    assert np.allclose(meter_quadrature_density(state, points), norm.pdf(points), atol=1e-8)


def test_leaky_evolution_is_reported(caplog):
    with caplog.at_level("WARNING", logger="fock.oracle"):
        state = evolve_product_hamiltonian(fock_number(1, 16), fock_vacuum(16), 1.5, 0.0, np.pi / 2)
    assert state.leakage > 1e-8
    assert "leaks" in caplog.text


def test_quiet_evolution_for_ample_truncation(caplog):
    with caplog.at_level("WARNING", logger="fock.oracle"):
        evolve_product_hamiltonian(fock_vacuum(64), fock_vacuum(64), 0.5, 0.0, np.pi / 2)
    assert "leaks" not in caplog.text
