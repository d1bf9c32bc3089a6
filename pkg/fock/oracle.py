"""Truncated number-basis oracle.

Every grid-level identity in the simulator is cross-checked against brute-force
linear algebra in the Fock basis. Conventions match the grid:
x(theta) = (a e^{-i theta} + a^dag e^{i theta}) / sqrt(2) and
<x(theta)|n> = e^{-i n theta} h_n(x).
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, expm
from scipy.special import gammaln

from config import DEFAULT_FOCK_DIM, LEAKAGE_ACCEPT, LEAKAGE_FLAG, LEAKAGE_LEVELS
from fock.krylov import krylov_expmv
from quadrature.grid import QuadratureGrid
from quadrature.states import SqueezedVacuumSpec, StateSpec, hermite_functions
from quadrature.wavefunction import QuadratureWavefunction

logger = logging.getLogger(__name__)

OPERATOR_PADDING = 32


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FockVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1:
            raise ValueError(f"FockVector needs a 1D amplitude array, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "FockVector":
        return FockVector(self.amplitudes / np.sqrt(self.norm()))

    def leakage(self, levels: int = LEAKAGE_LEVELS) -> float:
        """Population of the top truncation levels."""
        return float(np.sum(np.abs(self.amplitudes[-levels:]) ** 2))

    def expectation(self, op: "FockOperator") -> complex:
        return complex(np.vdot(self.amplitudes, op.matrix @ self.amplitudes))


@dataclass(frozen=True, eq=False)
class FockOperator:
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"FockOperator needs a square matrix, got shape {mat.shape}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(self.matrix @ other.matrix)
        if isinstance(other, FockVector):
            return FockVector(self.matrix @ other.amplitudes)
        return NotImplemented

    def commutator(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.matrix @ other.matrix - other.matrix @ self.matrix)

    def dagger(self) -> "FockOperator":
        return FockOperator(self.matrix.conj().T)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, atol=tol))

    def exp_hermitian(self, beta: float) -> "FockOperator":
        """exp(-i beta A) for Hermitian A, through its eigendecomposition."""
        values, vectors = eigh(self.matrix)
        return FockOperator((vectors * np.exp(-1j * beta * values)) @ vectors.conj().T)


@dataclass(frozen=True, eq=False)
class BipartiteFockVector:
    """Coefficients C[n, k] of sum C |n>_s |k>_m after the product evolution."""

    coefficients: np.ndarray
    signal_angle: float
    meter_angle: float
    leakage: float = 0.0

    @property
    def dim(self) -> int:
        return self.coefficients.shape[0]

    @property
    def flagged(self) -> bool:
        return self.leakage > LEAKAGE_FLAG

    def norm(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

def annihilation(dim: int = DEFAULT_FOCK_DIM) -> FockOperator:
    return FockOperator(np.diag(np.sqrt(np.arange(1, dim)), k=1))


def creation(dim: int = DEFAULT_FOCK_DIM) -> FockOperator:
    return annihilation(dim).dagger()


def number_operator(dim: int = DEFAULT_FOCK_DIM) -> FockOperator:
    return FockOperator(np.diag(np.arange(dim, dtype=float)))


def quadrature_operator(theta: float, dim: int = DEFAULT_FOCK_DIM) -> FockOperator:
    a = annihilation(dim).matrix
    return FockOperator((a * np.exp(-1j * theta) + a.conj().T * np.exp(1j * theta)) / np.sqrt(2))


def momentum_operator(theta: float, dim: int = DEFAULT_FOCK_DIM) -> FockOperator:
    """p(theta) = x(theta + pi/2)."""
    a = annihilation(dim).matrix
    return FockOperator((a * np.exp(-1j * theta) - a.conj().T * np.exp(1j * theta)) / (1j * np.sqrt(2)))


def rotation_operator(delta: float, dim: int = DEFAULT_FOCK_DIM) -> FockOperator:
    """exp(-i delta n)."""
    return FockOperator(np.diag(np.exp(-1j * delta * np.arange(dim))))


def _padded_exponential(generator: np.ndarray, dim: int) -> FockOperator:
    return FockOperator(expm(generator)[:dim, :dim])


def squeeze_operator(spec: SqueezedVacuumSpec, dim: int = DEFAULT_FOCK_DIM) -> FockOperator:
    """S(xi) = exp[(xi* a^2 - xi a^dag^2)/2], exponentiated in a padded space and truncated."""
    big = dim + OPERATOR_PADDING
    a = annihilation(big).matrix
    xi = spec.r * np.exp(1j * spec.epsilon)
    generator = (np.conj(xi) * a @ a - xi * a.conj().T @ a.conj().T) / 2
    return _padded_exponential(generator, dim)


def displacement_operator(alpha: complex, dim: int = DEFAULT_FOCK_DIM) -> FockOperator:
    big = dim + OPERATOR_PADDING
    a = annihilation(big).matrix
    return _padded_exponential(alpha * a.conj().T - np.conj(alpha) * a, dim)


def commutator_residual(dim: int = DEFAULT_FOCK_DIM) -> float:
    """max |[a, a^dag] - 1| on the lower (dim - 1) block."""
    comm = annihilation(dim).commutator(creation(dim)).matrix[: dim - 1, : dim - 1]
    return float(np.max(np.abs(comm - np.eye(dim - 1))))


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

def _accept(vec: FockVector, label: str) -> FockVector:
    leak = vec.leakage()
    if leak > LEAKAGE_ACCEPT:
        raise ValueError(
            f"{label} leaks {leak:.2e} into the top {LEAKAGE_LEVELS} of {vec.dim} levels; raise the truncation"
        )
    return vec


def fock_number(n: int, dim: int = DEFAULT_FOCK_DIM) -> FockVector:
    if not 0 <= n < dim:
        raise ValueError(f"Fock number {n} outside truncation {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return _accept(FockVector(amps), f"Fock state n={n}")


def fock_vacuum(dim: int = DEFAULT_FOCK_DIM) -> FockVector:
    return fock_number(0, dim)


def fock_coherent(alpha: complex, dim: int = DEFAULT_FOCK_DIM) -> FockVector:
    n = np.arange(dim)
    alpha = complex(alpha)
    if alpha == 0:
        return fock_vacuum(dim)
    log_mag = n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1) - abs(alpha) ** 2 / 2
    amps = np.exp(log_mag + 1j * n * np.angle(alpha))
    return _accept(FockVector(amps), f"Coherent state alpha={alpha:g}")


def fock_squeezed(spec: SqueezedVacuumSpec, dim: int = DEFAULT_FOCK_DIM) -> FockVector:
    """Analytic coefficients of S(xi)|0>: even levels only."""
    amps = np.zeros(dim, dtype=complex)
    amps[0] = 1 / np.sqrt(np.cosh(spec.r))
    ratio = -np.exp(1j * spec.epsilon) * np.tanh(spec.r)
    for m in range(2, dim, 2):
        amps[m] = amps[m - 2] * ratio * np.sqrt((m - 1) / m)
    return _accept(FockVector(amps), f"Squeezed vacuum r={spec.r:g}")


def fock_cat(alpha: complex, dim: int = DEFAULT_FOCK_DIM) -> FockVector:
    plus = fock_coherent(alpha, dim).amplitudes
    minus = fock_coherent(-complex(alpha), dim).amplitudes
    return FockVector(plus + minus).normalized()


def fock_from_spec(spec: StateSpec, dim: int = DEFAULT_FOCK_DIM) -> FockVector:
    if spec.kind == "vacuum":
        return fock_vacuum(dim)
    if spec.kind == "fock":
        return fock_number(spec.n, dim)
    if spec.kind == "squeezed":
        return fock_squeezed(spec.squeezing, dim)
    if spec.kind == "coherent":
        return fock_coherent(spec.alpha, dim)
    return fock_cat(spec.alpha, dim)


# ---------------------------------------------------------------------------
# Projection onto quadrature eigenstates
# ---------------------------------------------------------------------------

def quadrature_bras(points: np.ndarray, angle: float, dim: int) -> np.ndarray:
    """Matrix of <x(angle)|n>, shape (len(points), dim)."""
    h = hermite_functions(points, dim - 1)
    return (h * np.exp(-1j * angle * np.arange(dim))[:, None]).T


def wavefunction_from_fock(vec: FockVector, points: np.ndarray, angle: float) -> np.ndarray:
    return quadrature_bras(points, angle, vec.dim) @ vec.amplitudes


def fock_to_grid(vec: FockVector, grid: QuadratureGrid, angle: float) -> QuadratureWavefunction:
    return QuadratureWavefunction(grid, wavefunction_from_fock(vec, grid.points, angle), angle)


def project_bipartite(
    state: BipartiteFockVector, signal_points: np.ndarray, meter_points: np.ndarray
) -> np.ndarray:
    """Psi(x_s, x_m) with the signal at state.signal_angle and the meter at state.meter_angle."""
    bra_s = quadrature_bras(signal_points, state.signal_angle, state.dim)
    bra_m = quadrature_bras(meter_points, state.meter_angle, state.dim)
    return bra_s @ state.coefficients @ bra_m.T


def meter_quadrature_density(state: BipartiteFockVector, points: np.ndarray) -> np.ndarray:
    """Density of the meter quadrature x(meter_angle), traced over the signal."""
    bra_m = quadrature_bras(points, state.meter_angle, state.dim)
    rows = state.coefficients @ bra_m.T
    return np.sum(np.abs(rows) ** 2, axis=0)


def reduced_signal_purity(state: BipartiteFockVector) -> float:
    rho = state.coefficients @ state.coefficients.conj().T
    return float(np.real(np.trace(rho @ rho)))


# ---------------------------------------------------------------------------
# Product-Hamiltonian evolution
# ---------------------------------------------------------------------------

def evolve_product_hamiltonian(
    signal: FockVector,
    meter: FockVector,
    kappa: float,
    pump_phase: float,
    homodyne_angle: float,
    method: str = "eigen",
    monitor_leakage: bool = True,
) -> BipartiteFockVector:
    """exp(-i kappa x_s(phi + pi/2) x_m(phi)) applied to signal (x) meter.

    method="eigen" diagonalizes the two single-mode factors; method="krylov"
    uses the Arnoldi action on the flattened bipartite vector. Neither forms
    the dense bipartite exponential.
    """
    if signal.dim != meter.dim:
        raise ValueError(f"Signal and meter truncations differ: {signal.dim} vs {meter.dim}")
    if not np.isfinite(kappa):
        raise ValueError(f"Coupling must be finite, got {kappa}")
    dim = signal.dim
    x_s = quadrature_operator(pump_phase + np.pi / 2, dim).matrix
    x_m = quadrature_operator(pump_phase, dim).matrix
    initial = np.outer(signal.amplitudes, meter.amplitudes)

    if method == "eigen":
        lam, v_s = eigh(x_s)
        mu, v_m = eigh(x_m)
        rotated = v_s.conj().T @ initial @ v_m.conj()
        rotated *= np.exp(-1j * kappa * np.outer(lam, mu))
        final = v_s @ rotated @ v_m.T
    elif method == "krylov":
        def matvec(flat):
            return (x_s @ flat.reshape(dim, dim) @ x_m.T).ravel()

        bound = 2 * dim + 1  # ||x|| <= sqrt(2 dim + 1) on the truncation
        final = krylov_expmv(matvec, initial.ravel(), kappa, norm_estimate=bound).reshape(dim, dim)
    else:
        raise ValueError(f"Unknown evolution method '{method}'. Available: eigen, krylov")

    leak = max(
        float(np.sum(np.abs(final[-LEAKAGE_LEVELS:, :]) ** 2)),
        float(np.sum(np.abs(final[:, -LEAKAGE_LEVELS:]) ** 2)),
    )
    if monitor_leakage and leak > LEAKAGE_FLAG:
        logger.warning(f"Bipartite evolution leaks {leak:.2e} into the truncation edge; result untrusted")
    elif monitor_leakage and leak > LEAKAGE_ACCEPT:
        logger.warning(f"Bipartite evolution leaks {leak:.2e} into the top {LEAKAGE_LEVELS} of {dim} levels; raise the truncation")
    return BipartiteFockVector(
        coefficients=final,
        signal_angle=float(np.mod(pump_phase + np.pi / 2, 2 * np.pi)),
        meter_angle=float(np.mod(homodyne_angle, 2 * np.pi)),
        leakage=leak,
    )
