"""Fixed-size (3x3) complex linear algebra and density-matrix helpers.

All matrices are plain ``numpy`` arrays of shape ``(3, 3)`` and dtype
``complex128``; a density matrix is simply such an array that passes
:func:`dm_validate`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError

DIM = 3

TRACE_TOL = 1e-9
HERMITICITY_TOL = 1e-12
EIGENVALUE_TOL = 1e-8


@dataclass(frozen=True)
class ValidationReport:
    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float
    ok: bool


def as_matrix3(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.shape != (DIM, DIM):
        raise InputError(f"expected a 3x3 matrix, got shape {a.shape}")
    return a


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def dm_pure(level: int) -> np.ndarray:
    """Projector onto the bare level ``level`` (1-based)."""
    if level not in (1, 2, 3):
        raise InputError(f"level must be 1, 2 or 3, got {level!r}")
    rho = np.zeros((DIM, DIM), dtype=complex)
    rho[level - 1, level - 1] = 1.0
    return rho


def dm_from_ket(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def rehermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _fix_phase(v: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    # first non-negligible component made real and positive
    for c in v:
        if abs(c) > eps:
            return v * (abs(c) / c)
    return v


def eig3_hermitian(m, tol: float = 1e-13, max_sweeps: int = 100):
    """Eigen-decomposition of a Hermitian 3x3 matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    m : array_like
        Hermitian 3x3 matrix (checked to within 1e-10).
    tol : float
        Convergence threshold on the off-diagonal Frobenius norm, relative to
        ``max(1, ||m||_F)``.
    max_sweeps : int
        Cap on full cyclic sweeps over the three pivots.

    Returns
    -------
    eigenvalues : ndarray, shape (3,)
        Real eigenvalues in ascending order.
    eigenvectors : ndarray, shape (3, 3)
        Orthonormal eigenvectors as columns, each with its first nonzero
        component real and positive.
    """
    a = as_matrix3(m).copy()
    if hermiticity_error(a) > 1e-10:
        raise InputError("eig3_hermitian requires a Hermitian matrix")
    a = rehermitize(a)
    v = np.eye(DIM, dtype=complex)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))

    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * (abs(a[0, 1]) ** 2 + abs(a[0, 2]) ** 2 + abs(a[1, 2]) ** 2))
        if off < threshold:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p, q]
            r = abs(apq)
            if r == 0.0:
                continue
            # phase rotation makes a[p, q] real, then a real Jacobi rotation zeroes it
            phase = apq / r
            zeta = (a[q, q].real - a[p, p].real) / (2.0 * r)
            t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
            c = 1.0 / np.hypot(1.0, t)
            s = t * c
            rot = np.eye(DIM, dtype=complex)
            rot[p, p] = c
            rot[q, q] = c / phase
            rot[p, q] = s
            rot[q, p] = -s / phase
            a = rot.conj().T @ a @ rot
            a[p, q] = a[q, p] = 0.0
            v = v @ rot
    else:
        raise NumericError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    w = a.diagonal().real
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    for k in range(DIM):
        v[:, k] = _fix_phase(v[:, k])
    return w, v


def dm_validate(
    rho,
    trace_tol: float = TRACE_TOL,
    hermiticity_tol: float = HERMITICITY_TOL,
    eigenvalue_tol: float = EIGENVALUE_TOL,
) -> ValidationReport:
    rho = as_matrix3(rho)
    if not np.all(np.isfinite(rho)):
        return ValidationReport(np.inf, np.inf, -np.inf, False)
    trace_error = float(abs(np.trace(rho) - 1.0))
    herm = hermiticity_error(rho)
    w, _ = eig3_hermitian(rehermitize(rho))
    min_eig = float(w[0])
    ok = trace_error <= trace_tol and herm <= hermiticity_tol and min_eig >= -eigenvalue_tol
    return ValidationReport(trace_error, herm, min_eig, ok)
