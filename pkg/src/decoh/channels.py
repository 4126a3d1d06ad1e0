"""Qubit channels in the left-right (Pauli transfer) representation.

Conventions used throughout (tests depend on them):

* A channel is a real 4x4 matrix ``E`` with ``E[k,l] = Tr(S_k E[S_l]) / 2``
  over the operator basis ``S_j = W sigma_j W^dag`` of a
  :class:`DecoherenceBasis` ``W``. Trace preservation means row 0 equals
  ``(1, 0, 0, 0)``; the channel is unital iff column 0 is ``(1, 0, 0, 0)``.
* States are Bloch vectors, ``rho = (I + r . S) / 2``; the channel acts as
  the affine map ``r -> T r + t`` with ``T = E[1:, 1:]`` and ``t = E[1:, 0]``.
* The in-plane rotation is ``R(phi) = [[cos phi, sin phi], [-sin phi,
  cos phi]]``, so a basis-preserving damping of strength ``lam`` with phase
  ``phi`` multiplies the upper off-diagonal matrix element of rho (in the
  basis) by ``lam * exp(i phi)``.
* Choi matrices are unnormalized (trace 2), assembled block-wise with the
  column index on the input side: ``C[(j,m),(k,n)] = <e_m| E[|e_j><e_k|]
  |e_n>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import atan2, cos, hypot, pi, sin

import numpy as np

from .linalg import DEFAULT_TOL, PhysicsError, check_unitary, dag, herm_eig

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

TWO_PI = 2 * pi


@dataclass(frozen=True)
class DecoherenceBasis:
    """Orthonormal single-qubit basis fixing the axis of a decoherence channel.

    ``w`` is a 2x2 unitary whose columns are the basis states; the derived
    operators ``S_j = w sigma_j w^dag`` obey the Pauli algebra.
    """

    w: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))

    def __post_init__(self):
        w = check_unitary(self.w, name="basis matrix")
        object.__setattr__(self, "w", w)

    @classmethod
    def computational(cls) -> "DecoherenceBasis":
        return cls(np.eye(2, dtype=complex))

    @classmethod
    def from_axis(cls, axis: np.ndarray) -> "DecoherenceBasis":
        """Basis whose third operator points along the Bloch ``axis``."""
        u = np.asarray(axis, dtype=float)
        norm = np.linalg.norm(u)
        if norm < 1e-12:
            raise PhysicsError("axis vector must be nonzero")
        u = u / norm
        theta = np.arccos(np.clip(u[2], -1.0, 1.0))
        alpha = atan2(u[1], u[0])
        c, s = cos(theta / 2), sin(theta / 2)
        w = np.array(
            [[c, -s * np.exp(-1j * alpha)], [s * np.exp(1j * alpha), c]],
            dtype=complex,
        )
        return cls(w)

    def states(self) -> tuple[np.ndarray, np.ndarray]:
        """The two basis vectors (columns of ``w``)."""
        return self.w[:, 0].copy(), self.w[:, 1].copy()

    def s_ops(self) -> np.ndarray:
        """Stack of the four operators ``S_0..S_3``."""
        return np.einsum("ab,jbc,dc->jad", self.w, SIGMA, self.w.conj())

    def axis(self) -> np.ndarray:
        """Bloch axis of ``S_3``."""
        s3 = self.s_ops()[3]
        return np.array([np.trace(s3 @ SIGMA[j]).real / 2 for j in (1, 2, 3)])


@dataclass(frozen=True)
class DecoherenceParams:
    """Damping strength ``lam`` in [0, 1] and rotation angle ``phi`` in [0, 2pi).

    Negative ``lam`` is folded into the angle on construction
    (``-lam R(phi) = lam R(phi + pi)``).
    """

    lam: float
    phi: float = 0.0

    def __post_init__(self):
        lam, phi = float(self.lam), float(self.phi)
        if not (np.isfinite(lam) and np.isfinite(phi)):
            raise PhysicsError("parameters must be finite")
        if lam < 0:
            lam, phi = -lam, phi + pi
        if lam > 1 + 1e-12:
            raise PhysicsError(f"damping parameter {lam} outside [0, 1]")
        object.__setattr__(self, "lam", min(lam, 1.0))
        object.__setattr__(self, "phi", phi % TWO_PI)

    @property
    def a(self) -> float:
        return self.lam * cos(self.phi)

    @property
    def b(self) -> float:
        return self.lam * sin(self.phi)


def check_density_matrix(rho: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise PhysicsError(f"density matrix must be 2x2, got {rho.shape}")
    herm_dev = np.abs(rho - dag(rho)).max()
    if herm_dev > tol:
        raise PhysicsError(f"density matrix not Hermitian (deviation {herm_dev:.3e})")
    tr_dev = abs(np.trace(rho) - 1.0)
    if tr_dev > tol:
        raise PhysicsError(f"density matrix trace deviates from 1 by {tr_dev:.3e}")
    wmin = np.linalg.eigvalsh((rho + dag(rho)) / 2).min()
    if wmin < -tol:
        raise PhysicsError(f"density matrix not PSD (eigenvalue {wmin:.3e})")
    return rho


def to_bloch(rho: np.ndarray, basis: DecoherenceBasis | None = None,
             tol: float = DEFAULT_TOL) -> np.ndarray:
    """Bloch components ``r_j = Tr(rho S_j)`` for j = 1..3."""
    rho = check_density_matrix(rho, tol)
    s = (basis or DecoherenceBasis.computational()).s_ops()
    return np.array([np.trace(rho @ s[j]).real for j in (1, 2, 3)])


def from_bloch(r: np.ndarray, basis: DecoherenceBasis | None = None,
               tol: float = DEFAULT_TOL) -> np.ndarray:
    """State ``(I + r . S) / 2`` from a Bloch vector of length <= 1."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise PhysicsError("Bloch vector must have 3 components")
    if np.linalg.norm(r) > 1 + tol:
        raise PhysicsError(f"Bloch vector length {np.linalg.norm(r):.6f} exceeds 1")
    s = (basis or DecoherenceBasis.computational()).s_ops()
    return (s[0] + r[0] * s[1] + r[1] * s[2] + r[2] * s[3]) / 2


def plane_rotation(phi: float) -> np.ndarray:
    return np.array([[cos(phi), sin(phi)], [-sin(phi), cos(phi)]])


def identity_transfer() -> np.ndarray:
    return np.eye(4)


def check_trace_preserving(e: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    if e.shape != (4, 4):
        raise PhysicsError(f"transfer matrix must be 4x4, got {e.shape}")
    dev = np.abs(e[0] - np.array([1.0, 0, 0, 0])).max()
    if dev > tol:
        raise PhysicsError(f"transfer matrix is not trace preserving (row-0 deviation {dev:.3e})")
    return e


def is_unital(e: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return np.abs(np.asarray(e)[1:, 0]).max() <= tol


def make_decoherence_channel(p: DecoherenceParams) -> np.ndarray:
    """Transfer matrix ``diag(1, lam R(phi), 1)`` in the channel's own basis."""
    e = np.eye(4)
    e[1:3, 1:3] = p.lam * plane_rotation(p.phi)
    return e


def apply(e: np.ndarray, rho: np.ndarray, basis: DecoherenceBasis | None = None,
          tol: float = DEFAULT_TOL) -> np.ndarray:
    """Act with the channel on a state: ``r -> T r + t`` in the given basis."""
    e = check_trace_preserving(e, tol)
    basis = basis or DecoherenceBasis.computational()
    r = to_bloch(rho, basis, tol)
    v = e @ np.concatenate(([1.0], r))
    out = from_bloch(v[1:], basis, tol=np.inf)
    wmin = np.linalg.eigvalsh((out + dag(out)) / 2).min()
    if wmin < -tol:
        raise PhysicsError(
            f"channel output is not PSD (eigenvalue {wmin:.3e}); input matrix is not CP"
        )
    return out


def apply_linear(e: np.ndarray, op: np.ndarray,
                 basis: DecoherenceBasis | None = None) -> np.ndarray:
    """Linear extension of the channel to arbitrary 2x2 operators."""
    s = (basis or DecoherenceBasis.computational()).s_ops()
    coeff = np.einsum("ab,jba->j", np.asarray(op, dtype=complex), s)
    return np.einsum("j,jab->ab", np.asarray(e) @ coeff, s) / 2


def transfer_from_map(fn, basis: DecoherenceBasis | None = None) -> np.ndarray:
    """Tomography: transfer matrix of a linear map given as a callable on 2x2 operators."""
    s = (basis or DecoherenceBasis.computational()).s_ops()
    e = np.empty((4, 4))
    for l in range(4):
        out = fn(s[l])
        for k in range(4):
            e[k, l] = np.trace(s[k] @ out).real / 2
    return e


def compose(e1: np.ndarray, e2: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Channel that applies ``e2`` first, then ``e1`` (matrix product)."""
    return check_trace_preserving(e1, tol) @ check_trace_preserving(e2, tol)


def power(p: DecoherenceParams, n: int) -> np.ndarray:
    """n-fold self-composition, ``diag(1, lam^n R(n phi), 1)``."""
    if n < 0:
        raise PhysicsError("power requires n >= 0")
    if n == 0:
        return identity_transfer()
    e = np.eye(4)
    e[1:3, 1:3] = p.lam**n * plane_rotation((n * p.phi) % TWO_PI)
    return e


def interpolate(p: DecoherenceParams, t: float, tau: float = 1.0) -> np.ndarray:
    """Continuous semigroup member ``diag(1, lam^{t/tau} R(t phi / tau), 1)``.

    Defined for ``lam > 0``; the half-way points between the integer powers
    exist only when the logarithm of ``lam`` does.
    """
    if p.lam <= 0:
        raise PhysicsError("no continuous interpolation for lam = 0 (instantaneous damping)")
    if tau <= 0:
        raise PhysicsError("time scale tau must be positive")
    if t < 0:
        raise PhysicsError("time must be nonnegative")
    x = t / tau
    e = np.eye(4)
    e[1:3, 1:3] = p.lam**x * plane_rotation(x * p.phi)
    return e


def convex_mix(e1: np.ndarray, e2: np.ndarray, mu: float,
               tol: float = DEFAULT_TOL) -> np.ndarray:
    """Entrywise mixture ``mu e1 + (1 - mu) e2``."""
    if not 0.0 <= mu <= 1.0:
        raise PhysicsError(f"mixing weight {mu} outside [0, 1]")
    return mu * check_trace_preserving(e1, tol) + (1 - mu) * check_trace_preserving(e2, tol)


def transfer_to_choi(e: np.ndarray, basis: DecoherenceBasis | None = None,
                     tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unnormalized Choi matrix (trace 2); PSD iff the channel is CP."""
    e = check_trace_preserving(e, tol)
    basis = basis or DecoherenceBasis.computational()
    w = basis.w
    c = np.zeros((4, 4), dtype=complex)
    for j in range(2):
        for k in range(2):
            op = np.outer(w[:, j], w[:, k].conj())
            out = dag(w) @ apply_linear(e, op, basis) @ w
            c[2 * j: 2 * j + 2, 2 * k: 2 * k + 2] = out
    return c


def is_completely_positive(e: np.ndarray, basis: DecoherenceBasis | None = None,
                           tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """CP verdict plus witness (the minimal Choi eigenvalue)."""
    c = transfer_to_choi(e, basis, tol)
    wmin = float(herm_eig(c, tol=1e-7)[0].min())
    return wmin >= -tol, wmin


def tetrahedron_contains(lams: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Facet test for diagonal unital channels ``diag(1, l1, l2, l3)``.

    CP holds iff ``(l1, l2, l3)`` lies in the tetrahedron with vertices
    (1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1), i.e. ``|l1 +- l2| <= |1 +- l3|``.
    """
    l1, l2, l3 = np.asarray(lams, dtype=float)
    return bool(abs(l1 + l2) <= 1 + l3 + tol and abs(l1 - l2) <= 1 - l3 + tol)


def svd_decompose(e: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split a unital channel into rotation * diag * rotation.

    Returns ``(r1, singulars, r2)`` with proper rotations (det +1); sign
    flips are folded into the singular values, which may be negative.
    """
    e = check_trace_preserving(e, tol)
    if not is_unital(e, tol):
        raise PhysicsError("svd_decompose requires a unital channel")
    t = e[1:, 1:]
    u, sv, vt = np.linalg.svd(t)
    d1 = np.sign(np.linalg.det(u))
    d2 = np.sign(np.linalg.det(vt))
    r1 = u @ np.diag([1.0, 1.0, d1])
    r2 = np.diag([1.0, 1.0, d2]) @ vt
    singulars = sv * np.array([1.0, 1.0, d1 * d2])
    return r1, singulars, r2


def bloch_rotation(basis: DecoherenceBasis) -> np.ndarray:
    """4x4 rotation relating S-basis components to computational-basis ones.

    ``E_comp = R E_basis R^T`` with ``R[m,k] = Tr(sigma_m S_k) / 2``.
    """
    s = basis.s_ops()
    return np.einsum("mab,kba->mk", SIGMA, s).real / 2


def to_computational(e: np.ndarray, basis: DecoherenceBasis) -> np.ndarray:
    """Re-express a transfer matrix given in ``basis`` in the computational basis."""
    r = bloch_rotation(basis)
    return r @ np.asarray(e) @ r.T


def classify_decoherence(
    e: np.ndarray, tol: float = DEFAULT_TOL
) -> tuple[DecoherenceBasis, DecoherenceParams] | None:
    """Decide whether a (computational-basis) transfer matrix is a decoherence channel.

    A decoherence channel preserves populations along one Bloch axis ``u``
    (``T u = u`` and ``T^T u = u``, zero translation) and strictly damps the
    orthogonal plane by ``lam R(phi)`` with ``lam < 1``. Returns the basis
    built from ``u`` and the extracted parameters, or ``None`` — in
    particular for unitary channels (``lam = 1``).

    The recovered axis is sign-canonicalized (largest-magnitude component
    positive); flipping the axis maps ``phi -> -phi``.
    """
    e = np.asarray(e, dtype=float)
    if e.shape != (4, 4):
        raise PhysicsError(f"transfer matrix must be 4x4, got {e.shape}")
    if np.abs(e[0] - np.array([1.0, 0, 0, 0])).max() > tol:
        return None
    if not is_unital(e, tol):
        return None
    t = e[1:, 1:]

    # Fixed axis: common unit eigenvector of T and T^T, found as the null
    # direction of a symmetric PSD combination (numerically stable).
    d = t - np.eye(3)
    m = d.T @ d + d @ d.T
    w, v = herm_eig(m.astype(complex), tol=1e-7)
    if w[-1] > tol:
        return None
    u = v[:, -1].real
    u = u / np.linalg.norm(u)
    i = int(np.argmax(np.abs(u)))
    if u[i] < 0:
        u = -u

    # Right-handed frame for the damped plane.
    v1 = np.zeros(3)
    v1[(i + 1) % 3] = 1.0
    v1 = v1 - (v1 @ u) * u
    v1 = v1 / np.linalg.norm(v1)
    v2 = np.cross(u, v1)
    b = np.array([[v1 @ t @ v1, v1 @ t @ v2], [v2 @ t @ v1, v2 @ t @ v2]])

    a_c = (b[0, 0] + b[1, 1]) / 2
    b_c = (b[0, 1] - b[1, 0]) / 2
    lam = hypot(a_c, b_c)
    if lam >= 1 - tol:
        return None
    phi = atan2(b_c, a_c) % TWO_PI

    # Residual check: the channel must have no structure beyond the
    # damped plane plus the preserved axis.
    t_rec = lam * (
        cos(phi) * (np.outer(v1, v1) + np.outer(v2, v2))
        + sin(phi) * (np.outer(v1, v2) - np.outer(v2, v1))
    ) + np.outer(u, u)
    if np.abs(t - t_rec).max() > max(tol, 1e3 * np.finfo(float).eps):
        return None

    return DecoherenceBasis.from_axis(u), DecoherenceParams(lam, phi)
