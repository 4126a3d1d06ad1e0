"""Collision model: repeated controlled-U interactions with fresh reservoir qubits.

Each collision conjugates ``rho (x) xi`` with ``U = P0 (x) V0 + P1 (x) V1``
(system controls, reservoir is the target, ``P_j`` projectors onto the
control basis) and traces out the reservoir qubit. The induced single-qubit
map damps the off-diagonal element by ``<X>_xi = Tr(X xi)`` per collision,
where ``X = V1^dag V0``; populations in the control basis are exactly
preserved.
"""

from __future__ import annotations

from cmath import phase
from dataclasses import dataclass, field
from math import acos

import numpy as np

from .channels import (
    DecoherenceBasis,
    DecoherenceParams,
    check_density_matrix,
    make_decoherence_channel,
    transfer_from_map,
)
from .linalg import DEFAULT_TOL, PhysicsError, check_unitary, dag, kron, partial_trace


@dataclass(frozen=True)
class CollisionSpec:
    """One collision: target rotations ``v0``/``v1``, reservoir state ``xi``, control basis."""

    v0: np.ndarray
    v1: np.ndarray
    xi: np.ndarray
    basis: DecoherenceBasis = field(default_factory=DecoherenceBasis.computational)

    def __post_init__(self):
        object.__setattr__(self, "v0", check_unitary(self.v0, name="v0"))
        object.__setattr__(self, "v1", check_unitary(self.v1, name="v1"))
        object.__setattr__(self, "xi", check_density_matrix(self.xi))


@dataclass(frozen=True)
class XOperator:
    """``X = V1^dag V0`` together with its reservoir mean value."""

    x: np.ndarray
    mean: complex

    @property
    def lam(self) -> float:
        return abs(self.mean)

    @property
    def phi(self) -> float:
        return phase(self.mean) % (2 * np.pi)

    @property
    def a(self) -> float:
        """Real part of the mean; the diagonal entry of the induced Bloch block."""
        return self.mean.real

    @property
    def b(self) -> float:
        """Imaginary part of the mean; the off-diagonal entry of the induced Bloch block."""
        return self.mean.imag

    def params(self) -> DecoherenceParams:
        return DecoherenceParams(self.lam, self.phi)


def build_unitary(spec: CollisionSpec) -> np.ndarray:
    """4x4 controlled-U matrix ``P0 (x) v0 + P1 (x) v1`` in the control basis."""
    e0, e1 = spec.basis.states()
    p0 = np.outer(e0, e0.conj())
    p1 = np.outer(e1, e1.conj())
    return kron(p0, spec.v0) + kron(p1, spec.v1)


def x_operator(spec: CollisionSpec) -> XOperator:
    x = dag(spec.v1) @ spec.v0
    return XOperator(x, complex(np.trace(x @ spec.xi)))


def induced_channel(spec: CollisionSpec) -> np.ndarray:
    """Transfer matrix of the single-collision map, from the closed form.

    Equals ``make_decoherence_channel(|mean|, arg mean)`` in the control
    basis; tomography of the conjugate-and-trace map gives the same matrix.
    """
    return make_decoherence_channel(x_operator(spec).params())


def collision_channel_tomography(spec: CollisionSpec) -> np.ndarray:
    """Brute-force transfer matrix: conjugate with the full unitary, trace, tomograph."""
    u = build_unitary(spec)
    udag = dag(u)

    def one_collision(op: np.ndarray) -> np.ndarray:
        return partial_trace(u @ kron(op, spec.xi) @ udag, keep=[0])

    return transfer_from_map(one_collision, spec.basis)


def simulate_collisions(spec: CollisionSpec, rho0: np.ndarray, n: int) -> list[np.ndarray]:
    """State trajectory ``[rho_0, rho_1, ..., rho_n]`` under repeated collisions.

    Each step is a fresh-reservoir conjugation with the full 4x4 unitary
    followed by a partial trace (no closed form is used here).
    """
    if n < 0:
        raise PhysicsError("collision count must be nonnegative")
    rho = check_density_matrix(rho0).copy()
    u = build_unitary(spec)
    udag = dag(u)
    traj = [rho]
    for _ in range(n):
        rho = partial_trace(u @ kron(rho, spec.xi) @ udag, keep=[0])
        rho = (rho + dag(rho)) / 2
        traj.append(rho)
    return traj


def check_controlled_form(
    u: np.ndarray,
    basis: DecoherenceBasis | None = None,
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray] | None:
    """Extract ``(v0, v1)`` if the 4x4 unitary is block diagonal in the control basis.

    Block phases are canonicalized (first nonzero entry of each block made
    real positive). Returns ``None`` for non-controlled unitaries.
    """
    u = check_unitary(u, tol=max(tol, 1e-9), name="bipartite unitary")
    if u.shape != (4, 4):
        raise PhysicsError(f"expected a 4x4 unitary, got {u.shape}")
    basis = basis or DecoherenceBasis.computational()
    wi = kron(dag(basis.w), np.eye(2))
    ub = wi @ u @ dag(wi)
    if np.abs(ub[:2, 2:]).max() > tol or np.abs(ub[2:, :2]).max() > tol:
        return None
    return _fix_block_phase(ub[:2, :2], tol), _fix_block_phase(ub[2:, 2:], tol)


def _fix_block_phase(v: np.ndarray, tol: float) -> np.ndarray:
    for entry in v.flat:
        if abs(entry) > tol:
            return v * (abs(entry) / entry)
    raise PhysicsError("zero block in controlled decomposition")


def design_collision(target: DecoherenceParams) -> CollisionSpec:
    """Collision realizing the target channel.

    Uses ``v1 = I`` and ``v0 = diag(exp(i(phi + d)), exp(i(phi - d)))`` with
    ``d = arccos(lam)``, colliding with the pure reservoir state
    ``|+><+|`` (the equal-weight mixture of the eigenvectors of ``X``), so
    that ``<X> = lam exp(i phi)`` exactly.
    """
    delta = acos(min(max(target.lam, 0.0), 1.0))
    v0 = np.diag(
        [np.exp(1j * (target.phi + delta)), np.exp(1j * (target.phi - delta))]
    ).astype(complex)
    xi = np.full((2, 2), 0.5, dtype=complex)
    return CollisionSpec(v0=v0, v1=np.eye(2, dtype=complex), xi=xi)
