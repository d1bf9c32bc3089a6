import logging
from typing import Callable

import numpy as np
from scipy.linalg import expm

logger = logging.getLogger(__name__)

MAX_STEP_PHASE = 4.0  # |dt| * ||A|| per Arnoldi step


def krylov_expmv(
    matvec: Callable[[np.ndarray], np.ndarray],
    v: np.ndarray,
    time: float,
    norm_estimate: float,
    krylov_dim: int = 30,
    tol: float = 1e-13,
) -> np.ndarray:
    """exp(-i time A) v for Hermitian A given only through matvec.

    The interval is split so each step has |dt| * norm_estimate <= MAX_STEP_PHASE,
    and each step is an Arnoldi projection with a dense exponential of the
    small Hessenberg matrix.
    """
    u = np.asarray(v, dtype=complex)
    if time == 0 or not np.any(u):
        return u.copy()
    n_steps = max(1, int(np.ceil(abs(time) * norm_estimate / MAX_STEP_PHASE)))
    dt = time / n_steps
    for _ in range(n_steps):
        u = _arnoldi_step(matvec, u, dt, krylov_dim, tol)
    return u


def _arnoldi_step(matvec, v: np.ndarray, dt: float, m_max: int, tol: float) -> np.ndarray:
    beta = np.linalg.norm(v)
    basis = np.zeros((v.size, m_max + 1), dtype=complex)
    hess = np.zeros((m_max + 1, m_max), dtype=complex)
    basis[:, 0] = v / beta

    for m in range(1, m_max + 1):
        w = matvec(basis[:, m - 1])
        for j in range(m):
            hess[j, m - 1] = np.vdot(basis[:, j], w)
            w = w - hess[j, m - 1] * basis[:, j]
        h_next = np.linalg.norm(w)
        hess[m, m - 1] = h_next

        small = expm(-1j * dt * hess[:m, :m])[:, 0]
        # a posteriori residual of the projected solution
        residual = beta * abs(dt) * h_next * abs(small[m - 1])
        if h_next < 1e-14 or residual < tol:
            return beta * basis[:, :m] @ small
        basis[:, m] = w / h_next

    logger.warning(f"Krylov step did not converge in {m_max} vectors (residual {residual:.2e})")
    return beta * basis[:, :m_max] @ small
