"""Entanglement generated while a qubit decoheres through collisions.

The joint state after ``n`` collisions of a system qubit (amplitudes
``alpha``, ``beta`` in the control basis) with ``N`` reservoir qubits all
prepared in a pure state ``|psi>`` is

    alpha |e0> |psi_0>^n |psi>^(N-n)  +  beta |e1> |psi_1>^n |psi>^(N-n)

with ``psi_j = V_j psi``. Bipartite entanglement is measured by the
concurrence (squared: the pair tangle), one-vs-rest entanglement by the
tangle ``4 det rho_j``, and the monogamy residual ``Delta_j = tau_j -
sum_k tau_jk`` is nonnegative for every qubit; its average over the
register quantifies intrinsic multipartite entanglement.

The overlap ``|<psi_0|psi_1>|`` equals the damping rate ``lam`` of the
induced channel, which ties the entanglement curves to the decoherence
rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable

import numpy as np

from .channels import SIGMA, check_density_matrix
from .collisions import CollisionSpec, build_unitary
from .linalg import DEFAULT_TOL, PhysicsError, dag, herm_eig, kron, psd_sqrt

MAX_STATEVECTOR_QUBITS = 20
MAX_ALLPAIRS_QUBITS = 12

_SYSY = kron(SIGMA[2], SIGMA[2])


@dataclass(frozen=True)
class PureMultiQubitState:
    """Normalized statevector over ``num_qubits`` qubits (qubit 0 = system)."""

    amplitudes: np.ndarray
    num_qubits: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.num_qubits:
            raise PhysicsError(
                f"{amps.size} amplitudes do not fit {self.num_qubits} qubits"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-8:
            raise PhysicsError(f"state norm {norm:.3e} deviates from 1")
        object.__setattr__(self, "amplitudes", amps / norm)


@dataclass(frozen=True)
class EntanglementReport:
    """Tangles and monogamy residuals for one register snapshot.

    ``delta_j`` entries are clamped at zero from below; ``raw_delta_j``
    keeps the unclamped values for diagnostics.
    """

    n: int | None
    tau0: float
    tau_k: tuple[float, ...]
    tau_0k: tuple[float, ...]
    tau_jk_max: float
    delta_j: tuple[float, ...]
    delta: float
    raw_delta_j: tuple[float, ...]

    @property
    def sum_tau_0k(self) -> float:
        return float(sum(self.tau_0k))


def tangle(rho1: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """One-qubit tangle ``4 det rho`` (equivalently ``2 (1 - Tr rho^2)``)."""
    rho1 = check_density_matrix(rho1, tol)
    value = 4.0 * np.linalg.det(rho1).real
    return float(min(max(value, 0.0), 1.0))


def concurrence(rho2: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """Two-qubit concurrence from the spin-flipped spectrum.

    Diagonalizes the Hermitian product ``sqrt(rho) rho~ sqrt(rho)`` (same
    spectrum as ``rho rho~``), so only Hermitian eigensolves are needed.
    """
    rho2 = np.asarray(rho2, dtype=complex)
    if rho2.shape != (4, 4):
        raise PhysicsError(f"concurrence needs a 4x4 density matrix, got {rho2.shape}")
    if np.abs(rho2 - dag(rho2)).max() > tol or abs(np.trace(rho2) - 1.0) > tol:
        raise PhysicsError("invalid two-qubit density matrix")
    if np.linalg.eigvalsh((rho2 + dag(rho2)) / 2).min() < -tol:
        raise PhysicsError("two-qubit density matrix not PSD")
    rho2 = (rho2 + dag(rho2)) / 2
    flipped = _SYSY @ rho2.conj() @ _SYSY
    root = psd_sqrt(rho2, tol)
    w, _ = herm_eig(root @ flipped @ root, tol=1e-7)
    lams = np.sqrt(np.clip(w, 0.0, None))
    return float(max(0.0, lams[0] - lams[1] - lams[2] - lams[3]))


def reduced_state(state: PureMultiQubitState, keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix of the kept qubits (ascending index order)."""
    keep = sorted(set(int(k) for k in keep))
    n = state.num_qubits
    if any(k < 0 or k >= n for k in keep):
        raise PhysicsError(f"keep indices {keep} out of range for {n} qubits")
    rest = [q for q in range(n) if q not in keep]
    psi = state.amplitudes.reshape((2,) * n)
    psi = np.transpose(psi, keep + rest).reshape(2 ** len(keep), 2 ** len(rest))
    return psi @ psi.conj().T


def _pure_reservoir_state(spec: CollisionSpec, tol: float = 1e-8) -> np.ndarray:
    w, v = herm_eig(spec.xi, tol=1e-7)
    if abs(w[0] - 1.0) > tol:
        raise PhysicsError(
            "reservoir state must be pure for the joint-state construction "
            f"(largest eigenvalue {w[0]:.6f})"
        )
    psi = v[:, 0]
    i = int(np.argmax(np.abs(psi)))
    return psi * (abs(psi[i]) / psi[i])


def _check_register(spec: CollisionSpec, alpha: complex, beta: complex,
                    num_reservoir: int, n: int) -> np.ndarray:
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-8:
        raise PhysicsError("|alpha|^2 + |beta|^2 must equal 1")
    if not 0 <= n <= num_reservoir:
        raise PhysicsError(f"collision count {n} outside [0, {num_reservoir}]")
    if num_reservoir + 1 > MAX_STATEVECTOR_QUBITS:
        raise PhysicsError(
            f"register of {num_reservoir + 1} qubits exceeds the "
            f"{MAX_STATEVECTOR_QUBITS}-qubit statevector cap"
        )
    return _pure_reservoir_state(spec)


def evolve_network(spec: CollisionSpec, alpha: complex, beta: complex,
                   num_reservoir: int, n: int) -> PureMultiQubitState:
    """Joint state after ``n`` collisions, by sequential gate application."""
    psi = _check_register(spec, alpha, beta, num_reservoir, n)
    e0, e1 = spec.basis.states()
    nq = num_reservoir + 1
    state = reduce(kron, [alpha * e0 + beta * e1] + [psi] * num_reservoir)
    u = build_unitary(spec)
    for k in range(1, n + 1):
        t = state.reshape((2,) * nq)
        t = np.moveaxis(t, (0, k), (0, 1))
        t = (u @ t.reshape(4, -1)).reshape((2, 2) + (2,) * (nq - 2))
        state = np.moveaxis(t, (0, 1), (0, k)).reshape(-1)
    return PureMultiQubitState(state, nq)


def assemble_network_state(spec: CollisionSpec, alpha: complex, beta: complex,
                           num_reservoir: int, n: int) -> PureMultiQubitState:
    """Joint state after ``n`` collisions, by direct closed-form assembly."""
    psi = _check_register(spec, alpha, beta, num_reservoir, n)
    e0, e1 = spec.basis.states()
    psi0, psi1 = spec.v0 @ psi, spec.v1 @ psi
    tail = [psi] * (num_reservoir - n)
    branch0 = reduce(kron, [e0] + [psi0] * n + tail)
    branch1 = reduce(kron, [e1] + [psi1] * n + tail)
    return PureMultiQubitState(alpha * branch0 + beta * branch1, num_reservoir + 1)


def analytic_reduced_states(spec: CollisionSpec, alpha: complex, beta: complex,
                            n: int, k: int = 1) -> dict[str, np.ndarray]:
    """Closed-form reduced states after ``n`` collisions.

    Returns the system state ``rho_0``, the state ``rho_k`` of a collided
    reservoir qubit, the pair ``rho_0k`` (system with qubit ``k <= n``) and
    the reservoir pair ``rho_jk``. Off-diagonal terms carry the full
    complex overlap ``<psi_1|psi_0> = <X>_psi``, so each operator equals
    the corresponding partial trace of the joint state.
    """
    if n < 1 or not 1 <= k <= n:
        raise PhysicsError(f"need 1 <= k <= n, got k={k}, n={n}")
    psi = _pure_reservoir_state(spec)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-8:
        raise PhysicsError("|alpha|^2 + |beta|^2 must equal 1")
    e0, e1 = spec.basis.states()
    psi0, psi1 = spec.v0 @ psi, spec.v1 @ psi
    x_mean = complex(np.vdot(psi1, psi0))
    pa, pb = abs(alpha) ** 2, abs(beta) ** 2
    cross = alpha * np.conj(beta)

    rho_0 = (
        pa * np.outer(e0, e0.conj())
        + pb * np.outer(e1, e1.conj())
        + cross * x_mean**n * np.outer(e0, e1.conj())
        + np.conj(cross * x_mean**n) * np.outer(e1, e0.conj())
    )
    rho_k = pa * np.outer(psi0, psi0.conj()) + pb * np.outer(psi1, psi1.conj())
    v00 = kron(e0, psi0)
    v11 = kron(e1, psi1)
    rho_0k = (
        pa * np.outer(v00, v00.conj())
        + pb * np.outer(v11, v11.conj())
        + cross * x_mean ** (n - 1) * np.outer(v00, v11.conj())
        + np.conj(cross * x_mean ** (n - 1)) * np.outer(v11, v00.conj())
    )
    w00 = kron(psi0, psi0)
    w11 = kron(psi1, psi1)
    rho_jk = pa * np.outer(w00, w00.conj()) + pb * np.outer(w11, w11.conj())
    return {"rho_0": rho_0, "rho_k": rho_k, "rho_0k": rho_0k, "rho_jk": rho_jk}


def analytic_tangles(overlap: float, alpha: complex, beta: complex,
                     n: int) -> EntanglementReport:
    """Closed-form tangles after ``n >= 1`` collisions.

    ``overlap = |<psi_0|psi_1>|``. System tangle ``4|ab|^2 (1 - ov^{2n})``,
    each collided reservoir qubit ``4|ab|^2 (1 - ov^2)``, each
    system-reservoir pair ``4|ab|^2 ov^{2(n-1)} (1 - ov^2)``; reservoir
    pairs are unentangled.
    """
    if not 0.0 <= overlap <= 1.0:
        raise PhysicsError(f"overlap {overlap} outside [0, 1]")
    if n < 1:
        raise PhysicsError("need at least one collision")
    ab2 = abs(alpha) ** 2 * abs(beta) ** 2
    ov2 = overlap * overlap
    tau0 = 4 * ab2 * (1 - ov2**n)
    tau_k = 4 * ab2 * (1 - ov2)
    tau_0k = 4 * ab2 * ov2 ** (n - 1) * (1 - ov2)
    raw = (tau0 - n * tau_0k,) + (tau_k - tau_0k,) * n
    clamped = tuple(max(0.0, d) for d in raw)
    return EntanglementReport(
        n=n,
        tau0=tau0,
        tau_k=(tau_k,) * n,
        tau_0k=(tau_0k,) * n,
        tau_jk_max=0.0,
        delta_j=clamped,
        delta=float(np.mean(clamped)),
        raw_delta_j=raw,
    )


def ckw_check(state: PureMultiQubitState, tol: float = DEFAULT_TOL,
              n: int | None = None) -> EntanglementReport:
    """Numerical tangles, pair tangles and monogamy residuals of a pure state."""
    nq = state.num_qubits
    if nq > MAX_ALLPAIRS_QUBITS:
        raise PhysicsError(
            f"all-pairs computation capped at {MAX_ALLPAIRS_QUBITS} qubits, got {nq}"
        )
    taus = [tangle(reduced_state(state, [j]), tol=1e-7) for j in range(nq)]
    pair = np.zeros((nq, nq))
    for j in range(nq):
        for k in range(j + 1, nq):
            c = concurrence(reduced_state(state, [j, k]), tol=1e-7)
            pair[j, k] = pair[k, j] = c * c
    raw = tuple(taus[j] - pair[j].sum() for j in range(nq))
    clamped = tuple(max(0.0, d) for d in raw)
    return EntanglementReport(
        n=n,
        tau0=taus[0],
        tau_k=tuple(taus[1:]),
        tau_0k=tuple(pair[0, 1:]),
        tau_jk_max=float(pair[1:, 1:].max()) if nq > 1 else 0.0,
        delta_j=clamped,
        delta=float(np.mean(clamped)),
        raw_delta_j=raw,
    )


def env_state_check(spec: CollisionSpec, alpha: complex, beta: complex,
                    num_reservoir: int, n: int, tol: float = 1e-10) -> bool:
    """Verify the reservoir is left in the two-branch product mixture.

    Tracing out the system qubit must give ``|alpha|^2 P(psi_0)^(x)n +
    |beta|^2 P(psi_1)^(x)n`` tensored with the untouched qubits — an
    explicit separable form, checked entrywise.
    """
    state = evolve_network(spec, alpha, beta, num_reservoir, n)
    env = reduced_state(state, keep=range(1, num_reservoir + 1))
    psi = _pure_reservoir_state(spec)
    psi0, psi1 = spec.v0 @ psi, spec.v1 @ psi
    p_psi = np.outer(psi, psi.conj())
    branch0 = reduce(kron, [np.outer(psi0, psi0.conj())] * n + [p_psi] * (num_reservoir - n)
                     ) if num_reservoir else np.eye(1, dtype=complex)
    branch1 = reduce(kron, [np.outer(psi1, psi1.conj())] * n + [p_psi] * (num_reservoir - n)
                     ) if num_reservoir else np.eye(1, dtype=complex)
    expected = abs(alpha) ** 2 * branch0 + abs(beta) ** 2 * branch1
    return bool(np.abs(env - expected).max() <= tol)
