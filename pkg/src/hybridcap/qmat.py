"""Dense complex Hermitian linear algebra kernel.

Everything downstream (states, POVMs, entropies, optimizers) funnels its
spectral computations through :func:`herm_eig`, a cyclic Jacobi sweep for
Hermitian matrices.  Dimensions in this library are small (<= ~128), so a
simple deterministic solver beats pulling in a tuned LAPACK path: two calls
on bit-identical input give bit-identical output.

Complex entries are numpy ``complex128``, i.e. explicit (re, im) pairs of
IEEE-754 doubles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NegativeEigenvalue, NoConvergence, NonHermitianInput

# Uniform PSD tolerance policy: eigenvalues in [PSD_FLOOR, 0] are clamped
# to zero, anything below PSD_FLOOR is an error.
PSD_FLOOR = -1e-9

_MAX_SWEEPS = 100
_OFFDIAG_STOP = 1e-12


@dataclass(frozen=True)
class HermEigResult:
    """Spectral decomposition A = V diag(w) V† with w ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_complex_matrix(a) -> np.ndarray:
    """Coerce input to a square complex128 matrix."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def validate_hermitian(a, tol: float) -> bool:
    """True iff max|A - A†| <= tol."""
    m = as_complex_matrix(a)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def herm_eig(a) -> HermEigResult:
    """Diagonalize a Hermitian matrix by cyclic Jacobi sweeps.

    Eigenvalues are returned ascending; column k of the eigenvector matrix
    belongs to eigenvalue k.  Raises NonHermitianInput if the input is not
    Hermitian within 1e-8, NoConvergence if the off-diagonal mass has not
    dropped below 1e-12 * ||A||_F after 100 sweeps.
    """
    m = as_complex_matrix(a)
    if not validate_hermitian(m, 1e-8):
        raise NonHermitianInput("matrix deviates from A† by more than 1e-8")

    d = m.shape[0]
    A = (m + m.conj().T) / 2.0
    V = np.eye(d, dtype=np.complex128)
    scale = float(np.linalg.norm(A))
    if scale == 0.0 or d == 1:
        w = np.real(np.diag(A)).copy()
        return HermEigResult(w, V)

    converged = False
    for _ in range(_MAX_SWEEPS):
        off = _offdiag_norm(A)
        if off < _OFFDIAG_STOP * scale:
            converged = True
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                mag = abs(apq)
                if mag < 1e-18 * scale:
                    continue
                phase = apq / mag
                tau = (A[q, q].real - A[p, p].real) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # Unitary U: U[p,p]=c, U[p,q]=s, U[q,p]=-conj(phase)s, U[q,q]=conj(phase)c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - (phase * s) * rq
                A[q, :] = s * rp + (phase * c) * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - (np.conj(phase) * s) * cq
                A[:, q] = s * cp + (np.conj(phase) * c) * cq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - (np.conj(phase) * s) * vq
                V[:, q] = s * vp + (np.conj(phase) * c) * vq
    else:
        converged = _offdiag_norm(A) < _OFFDIAG_STOP * scale
    if not converged:
        raise NoConvergence(f"Jacobi sweeps exceeded {_MAX_SWEEPS}")

    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return HermEigResult(w[order].copy(), V[:, order].copy())


def _offdiag_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.linalg.norm(off))


def clamp_psd_eigenvalues(w: np.ndarray) -> np.ndarray:
    """Apply the library-wide PSD policy to an eigenvalue vector."""
    if np.min(w) < PSD_FLOOR:
        raise NegativeEigenvalue(f"eigenvalue {np.min(w):.3e} below {PSD_FLOOR}")
    return np.where(w < 0.0, 0.0, w)


def matrix_sqrt_psd(a) -> np.ndarray:
    """Hermitian PSD square root B with B·B ≈ A.

    Eigenvalues in [-1e-9, 0] are clamped to zero; more negative ones raise
    NegativeEigenvalue.
    """
    res = herm_eig(a)
    w = clamp_psd_eigenvalues(res.eigenvalues)
    V = res.eigenvectors
    B = (V * np.sqrt(w)) @ V.conj().T
    return (B + B.conj().T) / 2.0
