import logging

import numpy as np

from config import DEFAULT_FOCK_DIM, EIGENSTATE_PACKET_SQUEEZING, LEAKAGE_FLAG
from fock.oracle import (
    FockVector,
    displacement_operator,
    fock_number,
    fock_squeezed,
    momentum_operator,
    quadrature_operator,
    wavefunction_from_fock,
)
from quadrature.states import SqueezedVacuumSpec

logger = logging.getLogger(__name__)

SAMPLE_WINDOW = 6.0
SAMPLE_POINTS = 241


def shifted_eigenvalue(x: float, beta: float, delta: float) -> float:
    """Eigenvalue of exp(-i beta x(theta)) |x(theta')> on the theta' axis, delta = theta' - theta."""
    return x - beta * np.sin(delta)


def eigenstate_phase(x: float, beta: float, delta: float) -> float:
    """Phase acquired by |x(theta')> under exp(-i beta x(theta))."""
    return beta**2 / 4 * np.sin(2 * delta) - beta * x * np.cos(delta)


def _sample_points() -> np.ndarray:
    return np.linspace(-SAMPLE_WINDOW, SAMPLE_WINDOW, SAMPLE_POINTS)


def _displacement_residual(
    vec: FockVector, beta: float, operator_angle: float, representation_angle: float
) -> float:
    """Sup-norm gap between the oracle exp(-i beta x(operator_angle)) vec and the shift-and-phase form.

    Closed form in the representation_angle basis, delta = representation_angle - operator_angle:
    out(y) = in(y + beta sin delta) exp(-i[(beta^2/4) sin 2 delta + beta y cos delta]).
    """
    evolved = quadrature_operator(operator_angle, vec.dim).exp_hermitian(beta) @ vec
    if evolved.leakage() > LEAKAGE_FLAG:
        logger.warning(f"Displacement check leaks {evolved.leakage():.2e}; residual untrusted")

    delta = representation_angle - operator_angle
    y = _sample_points()
    # each source point x lands on shifted_eigenvalue(x) = y
    x = y + beta * np.sin(delta)
    oracle = wavefunction_from_fock(evolved, y, representation_angle)
    source = wavefunction_from_fock(vec, x, representation_angle)
    return float(np.max(np.abs(oracle - source * np.exp(1j * eigenstate_phase(x, beta, delta)))))


def eigenstate_packet(
    x: float, angle: float, r: float = EIGENSTATE_PACKET_SQUEEZING, dim: int = DEFAULT_FOCK_DIM
) -> FockVector:
    """Displaced squeezed state narrow along x(angle) and centred at x."""
    squeezed = fock_squeezed(SqueezedVacuumSpec.aligned(r, angle), dim)
    alpha = x / np.sqrt(2) * np.exp(1j * angle)
    return (displacement_operator(alpha, dim) @ squeezed).normalized()


def displacement_identity_check(
    beta: float,
    theta: float,
    theta_prime: float,
    x: float,
    dim: int = DEFAULT_FOCK_DIM,
    packet_squeezing: float = EIGENSTATE_PACKET_SQUEEZING,
) -> float:
    """Residual of exp(-i beta x(theta)) acting on a packet centred at eigenvalue x of x(theta')."""
    if abs(x) > 5 or abs(beta) > 4:
        raise ValueError(f"Need |x| <= 5 and |beta| <= 4 to stay inside the truncation, got x={x}, beta={beta}")
    packet = eigenstate_packet(x, theta_prime, packet_squeezing, dim)
    return _displacement_residual(packet, beta, theta, theta_prime)


def meter_displacement_check(
    meter: FockVector, beta: float, pump_phase: float, homodyne_angle: float
) -> float:
    """Meter displaced by exp(-i beta x_m(phi)) and read on the x_m(theta) axis."""
    return _displacement_residual(meter, beta, pump_phase, homodyne_angle)


def baker_hausdorff_residual(
    beta: float, theta: float, theta_prime: float, dim: int = DEFAULT_FOCK_DIM, basis_levels: int = 8
) -> float:
    """exp(-i beta x(theta)) against exp(-i beta c x(theta')) exp(i beta s p(theta')) exp(-i beta^2 sin(2 delta)/4).

    Compared on the low Fock states |0>..|basis_levels-1>, lower half of the truncation only.
    """
    delta = theta_prime - theta
    c, s = np.cos(delta), np.sin(delta)
    direct = quadrature_operator(theta, dim).exp_hermitian(beta).matrix
    factored = (
        quadrature_operator(theta_prime, dim).exp_hermitian(beta * c).matrix
        @ momentum_operator(theta_prime, dim).exp_hermitian(-beta * s).matrix
        * np.exp(-1j * beta**2 / 4 * np.sin(2 * delta))
    )
    keep = dim // 2
    worst = 0.0
    for n in range(basis_levels):
        column = fock_number(n, dim).amplitudes
        gap = (direct @ column - factored @ column)[:keep]
        worst = max(worst, float(np.max(np.abs(gap))))
    return worst
