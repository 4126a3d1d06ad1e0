"""Continuous-time description: generator, Lindblad coefficients, integration.

The discrete semigroup ``E^n`` extends to ``E_t = diag(1, lam^{t/tau}
R(t phi / tau), 1)``; its generator has the central block
``[[ln lam, phi], [-phi, ln lam]] / tau`` and zeros elsewhere. A general
trace-preserving generator ``G`` maps to Hamiltonian coefficients ``h_a``
and a coefficient matrix ``c_ab = d_ab - i e_ab`` via quarter sums and
differences of its entries; the evolution is completely positive
(Markovian) iff ``c`` is PSD, which for the population-preserving family
forces the block conditions ``a == d``, ``b == -c``, ``a < 0``.

Sign note: with the rotation convention used by :mod:`decoh.channels`
(off-diagonal matrix element multiplied by ``exp((ln lam + i phi) t / tau)``),
the surviving Hamiltonian coefficient is ``h_3 = -phi / (2 tau)`` and the
dissipative one is ``d_33 = -ln(lam) / (2 tau)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .channels import (
    SIGMA,
    DecoherenceBasis,
    DecoherenceParams,
    check_density_matrix,
    from_bloch,
    to_bloch,
)
from .linalg import DEFAULT_TOL, PhysicsError


@dataclass(frozen=True)
class LindbladSpec:
    """Hamiltonian coefficients ``h`` (over S_1..S_3) and coefficient matrix ``c = d - i e``."""

    h: np.ndarray
    c: np.ndarray

    @property
    def d(self) -> np.ndarray:
        return self.c.real

    @property
    def e(self) -> np.ndarray:
        return -self.c.imag

    def is_markovian(self, tol: float = DEFAULT_TOL) -> bool:
        return float(np.linalg.eigvalsh((self.c + self.c.conj().T) / 2).min()) >= -tol


@dataclass(frozen=True)
class DoubleCommutatorForm:
    """Evolution ``-i[H, rho] - (1 / 2 gamma) [H, [H, rho]]`` with ``H`` along S_3."""

    hamiltonian: np.ndarray
    gamma: float


def generator_from_params(p: DecoherenceParams, tau: float = 1.0) -> np.ndarray:
    """Generator whose exponential reproduces the interpolated channel family."""
    if tau <= 0:
        raise PhysicsError("time scale tau must be positive")
    if p.lam <= 0:
        raise PhysicsError(
            "no finite-rate generator for lam = 0: instantaneous damping is not "
            "reachable by a finite-rate semigroup at finite time"
        )
    g = np.zeros((4, 4))
    g[1:3, 1:3] = np.array([[log(p.lam), p.phi], [-p.phi, log(p.lam)]]) / tau
    return g


def _check_generator_shape(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.shape != (4, 4):
        raise PhysicsError(f"generator must be 4x4, got {g.shape}")
    return g


def generator_to_lindblad(g: np.ndarray, tol: float = DEFAULT_TOL) -> LindbladSpec:
    """Extract ``h_a``, ``d_ab``, ``e_ab`` from a trace-preserving generator.

    Quarter-difference rules give the Hamiltonian part and the translation
    part; quarter sums of the diagonal give the symmetric part.
    """
    g = _check_generator_shape(g)
    if np.abs(g[0]).max() > tol:
        raise PhysicsError("generator does not preserve the trace (row 0 nonzero)")
    h = np.array([g[3, 2] - g[2, 3], g[1, 3] - g[3, 1], g[2, 1] - g[1, 2]]) / 4
    e = np.zeros((3, 3))
    e[1, 2] = g[1, 0] / 4
    e[2, 0] = g[2, 0] / 4
    e[0, 1] = g[3, 0] / 4
    e = e - e.T
    d = np.empty((3, 3))
    d[0, 0] = g[1, 1] - g[2, 2] - g[3, 3]
    d[1, 1] = g[2, 2] - g[1, 1] - g[3, 3]
    d[2, 2] = g[3, 3] - g[1, 1] - g[2, 2]
    d[0, 1] = d[1, 0] = g[1, 2] + g[2, 1]
    d[1, 2] = d[2, 1] = g[2, 3] + g[3, 2]
    d[0, 2] = d[2, 0] = g[1, 3] + g[3, 1]
    d /= 4
    return LindbladSpec(h=h, c=d - 1j * e)


def validate_decoherence_generator(g: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[bool, str]:
    """Check that ``g`` generates population-preserving, contracting evolution.

    Requires zero outer rows and columns (trace and S_3 component
    preserved) and a central block ``[[a, b], [c, d]]`` with ``a == d``,
    ``b == -c`` and ``a < 0``; exactly these blocks make the coefficient
    matrix PSD with a strictly damping rate.
    """
    g = _check_generator_shape(g)
    outer = max(
        np.abs(g[0]).max(), np.abs(g[3]).max(), np.abs(g[:, 0]).max(), np.abs(g[:, 3]).max()
    )
    if outer > tol:
        return False, f"outer rows/columns nonzero (max {outer:.3e}): trace or population axis not preserved"
    a, b, c, d = g[1, 1], g[1, 2], g[2, 1], g[2, 2]
    if abs(a - d) > tol:
        return False, f"diagonal mismatch a != d ({a:.6g} vs {d:.6g}): coefficient matrix not PSD"
    if abs(b + c) > tol:
        return False, f"off-diagonal mismatch b != -c ({b:.6g} vs {-c:.6g}): coefficient matrix not PSD"
    if a >= -tol:
        return False, f"diagonal rate a = {a:.6g} not negative: no contraction"
    return True, "ok"


def _block_rates(g: np.ndarray, tol: float) -> tuple[float, float]:
    """(a, b) of a structurally valid central block; allows the unitary limit a = 0."""
    g = _check_generator_shape(g)
    outer = max(
        np.abs(g[0]).max(), np.abs(g[3]).max(), np.abs(g[:, 0]).max(), np.abs(g[:, 3]).max()
    )
    if outer > tol:
        raise PhysicsError("invalid generator: outer rows/columns nonzero")
    a, b, c, d = g[1, 1], g[1, 2], g[2, 1], g[2, 2]
    if abs(a - d) > tol or abs(b + c) > tol:
        raise PhysicsError("invalid generator: central block is not damping plus rotation")
    if a > tol:
        raise PhysicsError("invalid generator: off-diagonal growth (a > 0)")
    return float(min(a, 0.0)), float(b)


def evolve(
    g: np.ndarray,
    rho0: np.ndarray,
    t_grid,
    basis: DecoherenceBasis | None = None,
    method: str = "closed",
    step: float = 0.01,
    tol: float = DEFAULT_TOL,
) -> list[np.ndarray]:
    """States at the grid times under ``rho' = G[rho]``.

    ``method="closed"`` uses the exact solution (populations constant,
    off-diagonal element times ``exp((a + i b) t)``); ``method="rk4"`` is a
    classical fourth-order fixed-step integration of the Bloch components,
    kept as an independent route.
    """
    basis = basis or DecoherenceBasis.computational()
    a, b = _block_rates(g, tol)
    t_grid = [float(t) for t in t_grid]
    if any(t < 0 for t in t_grid):
        raise PhysicsError("negative time in grid")
    if any(t2 < t1 for t1, t2 in zip(t_grid, t_grid[1:])):
        raise PhysicsError("time grid must be nondecreasing")
    r0 = to_bloch(check_density_matrix(rho0, tol), basis, tol)

    states = []
    if method == "closed":
        for t in t_grid:
            scale = np.exp(a * t)
            ct, st = np.cos(b * t), np.sin(b * t)
            r = np.array(
                [
                    scale * (ct * r0[0] + st * r0[1]),
                    scale * (-st * r0[0] + ct * r0[1]),
                    r0[2],
                ]
            )
            states.append(from_bloch(r, basis, tol))
    elif method == "rk4":
        if step <= 0:
            raise PhysicsError("step must be positive")
        gb = np.asarray(g, dtype=float)[1:, 1:]
        r = r0.copy()
        t_now = 0.0
        for t in t_grid:
            span = t - t_now
            nsteps = max(1, int(np.ceil(span / step - 1e-12))) if span > 0 else 0
            h = span / nsteps if nsteps else 0.0
            for _ in range(nsteps):
                k1 = gb @ r
                k2 = gb @ (r + 0.5 * h * k1)
                k3 = gb @ (r + 0.5 * h * k2)
                k4 = gb @ (r + h * k3)
                r = r + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            t_now = t
            states.append(from_bloch(r, basis, tol))
    else:
        raise PhysicsError(f"unknown integration method {method!r}")
    return states


def apply_generator(g: np.ndarray, rho: np.ndarray,
                    basis: DecoherenceBasis | None = None) -> np.ndarray:
    """Time derivative ``G[rho]`` as a 2x2 operator (linear in ``rho``)."""
    s = (basis or DecoherenceBasis.computational()).s_ops()
    coeff = np.einsum("ab,jba->j", np.asarray(rho, dtype=complex), s)
    return np.einsum("j,jab->ab", np.asarray(g, dtype=float) @ coeff, s) / 2


def to_double_commutator(g: np.ndarray, tol: float = DEFAULT_TOL) -> DoubleCommutatorForm:
    """Rewrite a valid generator as ``-i[H, .] - (1 / 2 gamma)[H, [H, .]]``.

    ``H = -(b/2) S_3`` and ``gamma = -b^2 / (2a) > 0``; requires ``b != 0``
    (pure damping has no Hamiltonian part and the form degenerates).
    """
    g = _check_generator_shape(g)
    ok, why = validate_decoherence_generator(g, tol)
    if not ok:
        raise PhysicsError(f"invalid generator: {why}")
    a, b = g[1, 1], g[1, 2]
    if abs(b) <= tol:
        raise PhysicsError(
            "pure damping (b = 0): no Hamiltonian; use the dissipator "
            f"rate {-a / 2:.6g} with the population-axis operator directly"
        )
    return DoubleCommutatorForm(hamiltonian=(-b / 2) * SIGMA[3], gamma=-b * b / (2 * a))


def purity(rho: np.ndarray) -> float:
    return float(np.trace(rho @ rho).real)


def trajectory_rows(
    g: np.ndarray,
    rho0: np.ndarray,
    t_grid,
    basis: DecoherenceBasis | None = None,
    tol: float = DEFAULT_TOL,
) -> list[tuple[float, float, float, float, float]]:
    """Rows ``(t, r_x, r_y, r_z, purity)`` of the closed-form trajectory."""
    basis = basis or DecoherenceBasis.computational()
    states = evolve(g, rho0, t_grid, basis, method="closed", tol=tol)
    rows = []
    for t, rho in zip(t_grid, states):
        r = to_bloch(rho, basis, tol)
        rows.append((float(t), r[0], r[1], r[2], purity(rho)))
    return rows
