"""Discretized operators on small k-grids.

Vectors are ``psi~`` flattened node-major with the component index fastest,
so an operator on a grid with ``N`` nodes is a ``3N x 3N`` matrix. ``H`` acts
as multiplication by ``hbar c |k|``; every identity below is a finite matrix
identity, with the ``int d^3k/(2 pi)^3`` weight folded into the density
kernels.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .state import KGrid, PhotonStateK, bb_norm
from .units import NATURAL, Units

DEFAULT_NODE_CAP = 256


@dataclass(frozen=True)
class KernelOperator:
    grid: KGrid
    matrix: np.ndarray = field(repr=False)
    cap: int = DEFAULT_NODE_CAP

    def __post_init__(self):
        n = self.grid.size
        if n > self.cap:
            raise ValueError(f"grid has {n} nodes, above the operator cap of {self.cap}; pass cap= to allow it")
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (3 * n, 3 * n):
            raise ValueError(f"matrix must be {3 * n}x{3 * n}, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other: "KernelOperator") -> "KernelOperator":
        return KernelOperator(self.grid, self.matrix @ other.matrix, max(self.cap, other.cap))

    def apply(self, s: PhotonStateK) -> np.ndarray:
        return (self.matrix @ s.psi.reshape(-1)).reshape(s.psi.shape)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


def _node_diag(grid: KGrid, values) -> np.ndarray:
    return np.repeat(np.asarray(values, dtype=float).reshape(-1), 3)


def hamiltonian(grid: KGrid, units: Units = NATURAL, cap=DEFAULT_NODE_CAP) -> KernelOperator:
    return KernelOperator(grid, np.diag(_node_diag(grid, units.hbar * units.c * grid.norm)), cap)


def momentum_op(grid: KGrid, j: int, units: Units = NATURAL, cap=DEFAULT_NODE_CAP) -> KernelOperator:
    return KernelOperator(grid, np.diag(_node_diag(grid, units.hbar * grid.k[..., j])), cap)


def position_op(grid: KGrid, j: int, cap=DEFAULT_NODE_CAP) -> KernelOperator:
    """``x_j = i d/dk_j`` by central differences (zero outside the grid)."""
    n = grid.shape[j]
    h = grid.spacing[j]
    d1 = (np.eye(n, k=1) - np.eye(n, k=-1)) / (2.0 * h)
    mats = [np.eye(c) for c in grid.shape]
    mats[j] = 1j * d1
    m = np.kron(np.kron(mats[0], mats[1]), mats[2])
    return KernelOperator(grid, np.kron(m, np.eye(3)), cap)


def _h_weights(grid: KGrid) -> np.ndarray:
    # only ratios of H enter the adjoint, so hbar c drops out
    return _node_diag(grid, grid.norm)


def generalized_adjoint(g: KernelOperator) -> KernelOperator:
    """``g++ = H g^dagger H^-1``: entry ``(i, j)`` is ``|k_i| conj(g_ji) / |k_j|``."""
    h = _h_weights(g.grid)
    return KernelOperator(g.grid, h[:, None] * g.matrix.conj().T / h[None, :], g.cap)


def generalized_hermitian_residual(g: KernelOperator) -> float:
    d = np.abs(generalized_adjoint(g).matrix - g.matrix)
    scale = float(np.max(np.abs(g.matrix)))
    return float(np.max(d)) / scale if scale > 0 else 0.0


def is_generalized_hermitian(g: KernelOperator, tol: float = 1e-12) -> bool:
    return generalized_hermitian_residual(g) <= tol


# ----------------------------------------------------------------- density


@dataclass(frozen=True)
class DensityPair:
    rho: KernelOperator
    rho_h: KernelOperator


def density_from_pure(s: PhotonStateK, tol: float = 1e-8, cap=DEFAULT_NODE_CAP) -> DensityPair:
    """``rho = |psi><psi| H^-1`` and ``rho_H = H^-1/2 |psi><psi| H^-1/2``."""
    n = bb_norm(s)
    if abs(n - 1.0) > tol:
        raise ValueError(f"state must have unit BB norm (got {n:.12g})")
    g = s.grid
    v = s.psi.reshape(-1)
    w = _node_diag(g, g.measure / g.norm)
    rho = np.outer(v, v.conj() * w)
    r = np.sqrt(w) * v
    return DensityPair(KernelOperator(g, rho, cap), KernelOperator(g, np.outer(r, r.conj()), cap))


def observable_average(g: KernelOperator, d: DensityPair) -> float:
    """``Tr{g rho}``; the imaginary part is dropped after checking it is negligible."""
    val = np.trace(g.matrix @ d.rho.matrix)
    if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        raise ValueError(f"average has imaginary part {val.imag:.3g}; is the operator generalized Hermitian?")
    return float(val.real)


def observable_average_h(g: KernelOperator, d: DensityPair) -> complex:
    """``Tr{g_H rho_H}`` with ``g_H = H^-1/2 g H^1/2``."""
    h = np.sqrt(_h_weights(g.grid))
    gh = g.matrix * (h[None, :] / h[:, None])
    return complex(np.trace(gh @ d.rho_h.matrix))


def density_properties(d: DensityPair) -> dict:
    """Residuals of the four properties of ``rho`` and of ``rho_H``.

    ``rho`` is BB-positive when ``H^-1 rho`` is a positive semidefinite
    Hermitian matrix; the reported value is the most negative eigenvalue
    (clipped at zero) relative to the largest.
    """
    g = d.rho.grid
    rho, rh = d.rho.matrix, d.rho_h.matrix
    hinv = 1.0 / _h_weights(g)

    def psd_violation(m):
        herm = 0.5 * (m + m.conj().T)
        ev = np.linalg.eigvalsh(herm)
        top = max(float(np.max(np.abs(ev))), 1e-300)
        return max(0.0, -float(np.min(ev))) / top

    bb = hinv[:, None] * rho
    scale = float(np.max(np.abs(rho)))
    hscale = float(np.max(np.abs(rh)))
    sq = np.sqrt(hinv)
    return {
        "rho_generalized_hermitian": float(np.max(np.abs(generalized_adjoint(d.rho).matrix - rho))) / scale,
        "rho_trace": float(abs(np.trace(rho) - 1.0)),
        "rho_bb_positive": psd_violation(bb),
        "rho_bb_hermitian": float(np.max(np.abs(bb - bb.conj().T))) / float(np.max(np.abs(bb))),
        "rho_idempotent": float(np.max(np.abs(rho @ rho - rho))) / scale,
        "rhoH_hermitian": float(np.max(np.abs(rh - rh.conj().T))) / hscale,
        "rhoH_trace": float(abs(np.trace(rh) - 1.0)),
        "rhoH_positive": psd_violation(rh),
        "rhoH_idempotent": float(np.max(np.abs(rh @ rh - rh))) / hscale,
        "rhoH_similarity": float(np.max(np.abs(rho * (sq[:, None] / sq[None, :]) - rh))) / hscale,
    }


def evolve_density(d: DensityPair, dt: float, units: Units = NATURAL) -> DensityPair:
    """Conjugate both kernels by ``exp(-i H dt / hbar)``."""
    g = d.rho.grid
    ph = np.exp(-1j * units.c * _node_diag(g, g.norm) * dt)
    conj = lambda m: ph[:, None] * m * ph.conj()[None, :]
    cap = d.rho.cap
    return DensityPair(KernelOperator(g, conj(d.rho.matrix), cap), KernelOperator(g, conj(d.rho_h.matrix), cap))


def liouville_residual(d: DensityPair, dt: float, units: Units = NATURAL) -> float:
    """Relative mismatch of central-difference ``i hbar d rho/dt`` against ``[H, rho]``."""
    plus = evolve_density(d, dt, units).rho.matrix
    minus = evolve_density(d, -dt, units).rho.matrix
    lhs = 1j * units.hbar * (plus - minus) / (2.0 * dt)
    h = units.hbar * units.c * _node_diag(d.rho.grid, d.rho.grid.norm)
    rhs = h[:, None] * d.rho.matrix - d.rho.matrix * h[None, :]
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))
