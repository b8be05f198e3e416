"""Dense complex-matrix primitives for Hermitian operators.

Everything here works on plain ``numpy`` arrays (square, n <= 8 in practice).
All decompositions are exact dense methods; no iterative estimators.
"""

from __future__ import annotations

import numpy as np

from .errors import DerivativeNotTraceless, NonHermitianInput, SingularState

HERMITICITY_TOL = 1e-12
DENSITY_TRACE_TOL = 1e-12
DENSITY_EIG_FLOOR = -1e-12
SUPPORT_TOL = 1e-10


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Return (A + A^dag) / 2."""
    return 0.5 * (a + a.conj().T)


def require_hermitian(h: np.ndarray, name: str = "operator") -> np.ndarray:
    """Validate the Hermiticity invariant and return the input as complex."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NonHermitianInput(f"{name} must be a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise NonHermitianInput(f"{name} has non-finite entries")
    scale = 1.0 + np.max(np.abs(h), initial=0.0)
    defect = np.max(np.abs(h - h.conj().T), initial=0.0)
    if defect > HERMITICITY_TOL * scale:
        raise NonHermitianInput(f"{name} is not Hermitian: defect {defect:.3e}")
    return h


def require_density(rho: np.ndarray, name: str = "rho") -> np.ndarray:
    """Validate unit trace and positivity (up to the eigenvalue floor)."""
    rho = require_hermitian(rho, name)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > DENSITY_TRACE_TOL:
        raise NonHermitianInput(f"{name} has trace {tr!r}, expected 1")
    w = np.linalg.eigvalsh(rho)
    if w[0] < DENSITY_EIG_FLOOR:
        raise NonHermitianInput(f"{name} has negative eigenvalue {w[0]:.3e}")
    return rho


def eig_hermitian(h: np.ndarray, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Spectral decomposition of a Hermitian matrix.

    Returns eigenvalues sorted descending and the matching eigenvector
    columns with a deterministic phase: the largest-magnitude component of
    each eigenvector (lowest index on ties) is made real and positive.
    """
    if check:
        h = require_hermitian(h)
    w, v = np.linalg.eigh(hermitian_part(h))
    order = np.argsort(w)[::-1]
    w = w[order]
    v = v[:, order]
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if abs(pivot) > 0:
            col *= np.conj(pivot) / abs(pivot)
    return w, v


def state_eigensystem(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spectral decomposition of a density matrix, tiny negatives clamped to 0."""
    w, v = eig_hermitian(rho, check=False)
    return np.clip(w, 0.0, None), v


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values, ||A||_1 = Tr sqrt(A^dag A)."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def op_norm_inf(a: np.ndarray) -> float:
    """Spectral radius, the maximum |eigenvalue| of the matrix.

    This is the norm appearing in the quantumness measure; its arguments
    (i Q^-1 U and friends) are similar to Hermitian matrices, so the
    spectrum is real and the value agrees with the Hermitian-route
    evaluation.
    """
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(a))))


def tracenorm_antisym(m: np.ndarray) -> float:
    """Trace norm of a real antisymmetric matrix (closed form for d <= 3)."""
    d = m.shape[0]
    if d == 1:
        return 0.0
    if d == 2:
        return 2.0 * abs(float(m[0, 1]))
    if d == 3:
        return 2.0 * float(np.hypot(np.hypot(m[1, 2], m[0, 2]), m[0, 1]))
    return trace_norm(m)


def sld_solve(
    rho: np.ndarray,
    drho: np.ndarray,
    support_tol: float = SUPPORT_TOL,
    check: bool = True,
) -> np.ndarray:
    """Symmetric logarithmic derivative L solving d_rho = (L rho + rho L) / 2.

    In the eigenbasis of rho, L_ij = 2 (drho)_ij / (p_i + p_j) on the
    support (p_i + p_j > support_tol) and 0 elsewhere; the kernel-sector
    choice makes Tr[rho L^2] minimal and matches the pure-state SLD.
    """
    if check:
        rho = require_density(rho)
        drho = require_hermitian(drho, "drho")
        tr = np.trace(drho)
        if abs(tr) > 1e-10:
            raise DerivativeNotTraceless(f"Tr drho = {tr!r}, expected 0")
    if support_tol <= 0:
        raise ValueError("support_tol must be positive")
    w, v = state_eigensystem(rho)
    m = v.conj().T @ drho @ v
    denom = w[:, None] + w[None, :]
    keep = denom > support_tol
    coeff = np.zeros_like(m)
    coeff[keep] = 2.0 * m[keep] / denom[keep]
    return hermitian_part(v @ coeff @ v.conj().T)


def rld_solve(rho: np.ndarray, drho: np.ndarray, check: bool = True) -> np.ndarray:
    """Right logarithmic derivative L^R = rho^-1 drho (full-rank rho only)."""
    if check:
        rho = require_density(rho)
        drho = require_hermitian(drho, "drho")
    w = np.linalg.eigvalsh(rho)
    if w[0] <= 1e-10:
        raise SingularState(f"rho is rank deficient (min eigenvalue {w[0]:.3e}); RLD undefined")
    return np.linalg.solve(rho, np.asarray(drho, dtype=complex))


def spd_sqrt(w_mat: np.ndarray) -> np.ndarray:
    """Spectral square root of a symmetric positive definite matrix."""
    vals, vecs = np.linalg.eigh(np.asarray(w_mat, dtype=float))
    if vals[0] <= 1e-12:
        raise ValueError(f"matrix is not positive definite (min eigenvalue {vals[0]:.3e})")
    return (vecs * np.sqrt(vals)) @ vecs.T


def require_weight(w_mat: np.ndarray, d: int | None = None) -> np.ndarray:
    """Validate a positive definite symmetric weight matrix."""
    w_mat = np.asarray(w_mat, dtype=float)
    if w_mat.ndim != 2 or w_mat.shape[0] != w_mat.shape[1]:
        raise ValueError(f"weight matrix must be square, got shape {w_mat.shape}")
    if d is not None and w_mat.shape[0] != d:
        raise ValueError(f"weight matrix has dimension {w_mat.shape[0]}, expected {d}")
    if np.max(np.abs(w_mat - w_mat.T), initial=0.0) > 1e-10 * (1 + np.max(np.abs(w_mat))):
        raise ValueError("weight matrix must be symmetric")
    if np.linalg.eigvalsh(w_mat)[0] <= 1e-12:
        raise ValueError("weight matrix must be positive definite")
    return 0.5 * (w_mat + w_mat.T)
