"""Small dense complex linear algebra used by every other module.

Everything here works on plain ``numpy`` arrays of complex128. Matrix
comparisons always go through an explicit tolerance (never exact float
equality); the package-wide default is ``DEFAULT_TOL = 1e-9``.

Qubit index convention: qubit 0 is the leftmost tensor factor, so for a
register of ``n`` qubits the basis state ``|q0 q1 ... q_{n-1}>`` has flat
index ``q0*2^{n-1} + ... + q_{n-1}``.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

DEFAULT_TOL = 1e-9


class PhysicsError(ValueError):
    """A mathematical or physical validity check failed."""


def dag(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def is_hermitian(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and np.abs(a - dag(a)).max() <= tol


def check_unitary(u: np.ndarray, tol: float = DEFAULT_TOL, name: str = "operator") -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise PhysicsError(f"{name} must be a square matrix, got shape {u.shape}")
    err = np.abs(dag(u) @ u - np.eye(u.shape[0])).max()
    if err > tol:
        raise PhysicsError(f"{name} is not unitary (deviation {err:.3e} > {tol:.1e})")
    return u


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product (dimensions multiply)."""
    return np.kron(np.asarray(a), np.asarray(b))


def num_qubits_of(dim: int) -> int:
    """Number of qubits for a register of dimension ``dim`` (must be 2**n)."""
    n = int(dim).bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise PhysicsError(f"dimension {dim} is not a power of two")
    return n


def partial_trace(m: np.ndarray, keep: Iterable[int], num_qubits: int | None = None) -> np.ndarray:
    """Reduce a multi-qubit operator to the qubits in ``keep``.

    ``m`` is a square 2^n x 2^n matrix; ``keep`` lists qubit indices to
    retain, returned in ascending index order. The trace is preserved.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise PhysicsError(f"partial_trace needs a square matrix, got shape {m.shape}")
    n = num_qubits_of(m.shape[0])
    if num_qubits is not None and num_qubits != n:
        raise PhysicsError(f"dimension {m.shape[0]} does not match {num_qubits} qubits")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise PhysicsError(f"keep indices {keep} out of range for {n} qubits")
    t = m.reshape((2,) * (2 * n))
    traced = 0
    for q in range(n):
        if q not in keep:
            axis = q - traced
            t = np.trace(t, axis1=axis, axis2=axis + (n - traced))
            traced += 1
    d = 2 ** len(keep)
    return t.reshape(d, d)


def herm_eig(h: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with real eigenvalues ``w`` sorted descending and
    orthonormal eigenvectors as the columns of ``v`` (``h @ v[:,i] =
    w[i] * v[:,i]``). Raises if ``h`` deviates from Hermiticity by more
    than ``tol``.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        dev = np.abs(h - dag(h)).max()
        raise PhysicsError(f"matrix is not Hermitian (deviation {dev:.3e} > {tol:.1e})")
    w, v = np.linalg.eigh((h + dag(h)) / 2)
    return w[::-1].copy(), v[:, ::-1].copy()


def psd_sqrt(p: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; anything below
    ``-10*tol`` is rejected as genuinely negative.
    """
    w, v = herm_eig(p, tol)
    if w.min() < -10 * tol:
        raise PhysicsError(f"matrix is not PSD (eigenvalue {w.min():.3e})")
    w = np.clip(w, 0.0, None)
    s = (v * np.sqrt(w)) @ dag(v)
    return (s + dag(s)) / 2
