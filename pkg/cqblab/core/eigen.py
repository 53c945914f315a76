"""Cyclic Jacobi eigensolver for dense Hermitian matrices."""
import logging
import math
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

OFF_DIAGONAL_TOL = 1e-13
MAX_SWEEPS = 60


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Eigenpairs in ascending order; vectors are the columns."""
    values: np.ndarray
    vectors: np.ndarray
    sweeps: int
    converged: bool

    @property
    def min(self) -> float:
        return float(self.values[0])

    @property
    def max(self) -> float:
        return float(self.values[-1])


def hermitian_residual(m: np.ndarray) -> float:
    """Largest entry of M - M^dagger, relative to the largest entry of M."""
    scale = float(np.max(np.abs(m), initial=0.0))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T))) / scale


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(
    m: np.ndarray,
    tol: float = OFF_DIAGONAL_TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> EigenResult:
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of a_pq, then applies the real
    symmetric rotation that zeroes it.

    Args:
        m: Hermitian matrix
        tol: Stop when the off-diagonal norm is below tol * ||M||_F
        max_sweeps: Upper bound on full sweeps over the upper triangle

    Returns:
        EigenResult with ascending eigenvalues and orthonormal eigenvectors
    """
    a = np.array(m, dtype=complex)
    a = (a + a.conj().T) / 2
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    target = tol * float(np.linalg.norm(a))
    sweeps = 0
    converged = _off_norm(a) <= target
    while not converged and sweeps < max_sweeps:
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                w = phase.conjugate()
                u = np.array([[c, s], [-s * w, c * w]])
                cols = [p, q]
                a[:, cols] = a[:, cols] @ u
                a[cols, :] = u.conj().T @ a[cols, :]
                a[p, q] = 0.0
                a[q, p] = 0.0
                v[:, cols] = v[:, cols] @ u
        converged = _off_norm(a) <= target
    if not converged:
        logger.warning(
            "Jacobi did not converge in %d sweeps (off-diagonal %.3e)",
            max_sweeps,
            _off_norm(a),
        )
    values = np.real(np.diag(a))
    order = np.argsort(values, kind="stable")
    logger.debug("Jacobi on %dx%d: %d sweeps", n, n, sweeps)
    return EigenResult(
        values=values[order], vectors=v[:, order], sweeps=sweeps, converged=converged
    )
