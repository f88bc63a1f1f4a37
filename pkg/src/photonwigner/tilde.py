"""The dual ``(lambda, mu, k, l)`` representation and its twisted product.

A :class:`TildeField` holds the coefficients of an operator in the basis
``U(lambda, mu) D(k, l)``. The continuous variables sit on uniform axes whose
nodes are integer multiples of a step (so every axis contains the origin),
and integrals over them become sums weighted by the product of steps.

For a state on the offset k-grid the coefficients are exact finite sums: the
``p`` dependence lives on the nodes ``hbar k``, so ``lambda`` is periodic with
period ``2 pi / (hbar dk)`` and ``N`` samples per axis invert the transform
exactly, while the ``mu`` dependence is the lattice ``2 s dk`` of the mixed
field.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .grid import PHASE6, _D_N, _TABLE_ROWS, get_kernel, phase
from .state import KGrid, PhotonStateK
from .units import NATURAL, Units
from .wigner import WEYL_P, KernelP, PhaseSpaceField, SampleSpec, _check_nyquist, _require_weyl, mixed_node

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class DualAxis:
    """Nodes ``(lo + i) * step`` for ``i = 0 .. count - 1``; ``lo <= 0 < lo + count``."""

    step: float
    lo: int
    count: int

    def __post_init__(self):
        if not (np.isfinite(self.step) and self.step > 0):
            raise ValueError(f"step must be positive, got {self.step}")
        if self.count < 1 or not (self.lo <= 0 < self.lo + self.count):
            raise ValueError(f"axis with lo={self.lo}, count={self.count} does not contain the origin")

    @classmethod
    def symmetric(cls, step: float, half: int):
        return cls(float(step), -int(half), 2 * int(half) + 1)

    @property
    def zero(self) -> int:
        return -self.lo

    def nodes(self) -> np.ndarray:
        return (self.lo + np.arange(self.count)) * self.step


@dataclass(frozen=True)
class TildeField:
    """Coefficients with shape ``(*lambda counts, *mu counts, 3, 3)``; the last two axes are ``(k, l)``."""

    lam: tuple
    mu: tuple
    values: np.ndarray = field(repr=False)
    t: float = 0.0
    units: Units = NATURAL
    grid: KGrid | None = None

    def __post_init__(self):
        if len(self.lam) != 3 or len(self.mu) != 3:
            raise ValueError("need three lambda axes and three mu axes")
        v = np.asarray(self.values, dtype=complex)
        shape = tuple(a.count for a in self.lam + self.mu) + (3, 3)
        if v.shape != shape:
            raise ValueError(f"values must have shape {shape}, got {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def weight(self) -> float:
        return float(np.prod([a.step for a in self.lam + self.mu]))

    def at_origin(self, k: int = 0, l: int = 0) -> complex:
        idx = tuple(a.zero for a in self.lam + self.mu)
        return complex(self.values[idx + (k, l)])

    def with_values(self, values) -> "TildeField":
        return TildeField(self.lam, self.mu, values, self.t, self.units, self.grid)


# ----------------------------------------------------------------- forward


def lambda_axes(grid: KGrid, units: Units = NATURAL) -> tuple:
    """One full period of ``lambda`` per axis, ``N`` nodes with step ``2 pi / (N hbar dk)``."""
    return tuple(DualAxis(_TWO_PI / (n * units.hbar * h), -(n // 2), n) for n, h in zip(grid.shape, grid.spacing))


def mu_axes(grid: KGrid) -> tuple:
    """The shift lattice ``mu = 2 s dk`` with ``|s| <= N/2 - 1``."""
    return tuple(DualAxis.symmetric(2.0 * h, (n - 1) // 2) for n, h in zip(grid.shape, grid.spacing))


def _momentum_dft(grid: KGrid, lam: tuple, units: Units, sign: int) -> list:
    # exp(sign * i lambda_j p_j) on every (lambda_j, node_j) pair
    out = []
    for j in range(3):
        p = units.hbar * grid.axes[j].nodes()
        out.append(np.exp(sign * 1j * np.outer(lam[j].nodes(), p)))
    return out


def tilde_rho(s: PhotonStateK, t: float = 0.0, units: Units = NATURAL) -> TildeField:
    """Dual coefficients of the density operator of ``s`` at time ``t``.

    ``rho~~(lambda, -2 s dk, k, l) = hbar^3 dk^3 / (3 (2 pi)^6)
    sum_c exp(-i lambda.hbar k_c) Tr{D(k,l)^dagger g_c(s)}`` where ``g_c`` is
    the mixed field at node ``c``. The coefficients do not depend on the
    kernels, which enter only when a Wigner function is reconstructed.
    """
    grid = s.grid
    lam, mu = lambda_axes(grid, units), mu_axes(grid)
    top = np.array([a.zero for a in mu])
    # A[c, s, k, l] with the s axes reversed so that index i carries mu = (i - top) * 2 dk
    dconj = _D_N.conj()  # sum_ab conj(D[a, b]) g[a, b] = Tr{D^dagger g}
    acc = np.zeros(grid.shape + tuple(a.count for a in mu) + (3, 3), dtype=complex)
    for c in np.ndindex(*grid.shape):
        node = mixed_node(s, c, t, units)
        coef = np.einsum("klab,...ab->...kl", dconj, node.g)[::-1, ::-1, ::-1]
        sl = tuple(slice(tj - rj, tj + rj + 1) for tj, rj in zip(top, node.r))
        acc[c][sl] = coef
    e = _momentum_dft(grid, lam, units, -1)
    out = np.einsum("ia,abc...->ibc...", e[0], acc)
    out = np.einsum("jb,ibc...->ijc...", e[1], out)
    out = np.einsum("kc,ijc...->ijk...", e[2], out)
    out *= units.hbar**3 * grid.cell_volume / (3.0 * _TWO_PI**6)
    return TildeField(lam, mu, out, s.t + t, units, grid)


# ----------------------------------------------------------------- inverse


def rho_from_tilde(tf: TildeField, spec: SampleSpec, kernel="weyl67", P: KernelP = WEYL_P) -> PhaseSpaceField:
    """Wigner function ``1/(3 (2 pi hbar)^3) sum_kl K* int e^{i(lambda.p + mu.x)} e^{i(k phi_m + phi_l n)} rho~~``."""
    _require_weyl(P)
    if tf.grid is None:
        raise ValueError("the field carries no k-grid; sample it with tilde_rho")
    _check_nyquist(tf.grid, spec.x)
    K = get_kernel(kernel)
    u = tf.units
    p = u.hbar * tf.grid.k[tuple(spec.p_index.T)]
    x = spec.x
    v = tf.values
    for j in range(3):
        e = np.exp(1j * np.outer(p[:, j], tf.lam[j].nodes()))
        v = np.einsum("pa,pa...->p...", e, v) if j else np.einsum("pa,a...->p...", e, v)
    for j in range(3):
        e = np.exp(1j * np.outer(x[:, j], tf.mu[j].nodes()))
        v = np.einsum("xa,pxa...->px...", e, v) if j else np.einsum("xa,pa...->px...", e, v)
    v = v * (tf.weight * K.table.conj())
    grid_ph = np.array([[[[phase(2 * (k * m + l * n)) for l in range(3)] for k in range(3)]
                         for n in range(3)] for m in range(3)])
    rho = np.einsum("mnkl,pxkl->pxmn", grid_ph, v) / (3.0 * (_TWO_PI * u.hbar) ** 3)
    return PhaseSpaceField(p, x, tf.t, rho.real.copy(), rho.imag.copy(), K.name)


# ----------------------------------------------------------------- product


def _support(values, atol: float) -> list:
    """Per continuous axis, the (first, last) index where the field exceeds ``atol * max``."""
    mag = np.abs(values).max(axis=(-2, -1))
    top = float(mag.max())
    if top == 0.0:
        return None
    mask = mag > atol * top
    out = []
    for j in range(6):
        hit = np.nonzero(mask.any(axis=tuple(i for i in range(6) if i != j)))[0]
        out.append((int(hit[0]), int(hit[-1])))
    return out


def _grid_scatter(fv) -> np.ndarray:
    """``M[g, out]`` with ``(f [x] g)(out) = sum_g g~(g) M[g, out]`` for a fixed 3x3 ``f~``."""
    r = _TABLE_ROWS
    m = np.zeros((9, 9), dtype=complex)
    np.add.at(m, (3 * r[:, 4] + r[:, 5], 3 * r[:, 0] + r[:, 1]), PHASE6[r[:, 6]] * fv[r[:, 2], r[:, 3]])
    return m


def boxtimes_continuous(f: TildeField, g: TildeField, atol: float = 1e-12) -> TildeField:
    """Twisted convolution in ``(lambda, mu)`` combined with the grid table in ``(k, l)``.

    ``(f [x] g)(z) = sum_z' w f(z') exp{(i hbar/2)(lambda'.mu - lambda.mu')} g(z - z')``
    with ``w`` the product of axis steps. Entries below ``atol`` times the
    largest magnitude are treated as zero; the combined support of the two
    factors must fit on the axes, otherwise part of the product would fall
    off the grid and a ``ValueError`` is raised.
    """
    if f.lam != g.lam or f.mu != g.mu:
        raise ValueError("factors live on different (lambda, mu) axes")
    if f.units != g.units:
        raise ValueError("factors use different units")
    axes = f.lam + f.mu
    out = np.zeros_like(f.values)
    sf, sg = _support(f.values, atol), _support(g.values, atol)
    if sf is None or sg is None:
        return f.with_values(out)
    for j, a in enumerate(axes):
        lo = sf[j][0] + sg[j][0] - a.zero
        hi = sf[j][1] + sg[j][1] - a.zero
        if lo < 0 or hi >= a.count:
            raise ValueError(f"product support exceeds axis {j} ({a.count} nodes); widen the grid")
    hb = 0.5 * f.units.hbar
    nodes = [a.nodes() for a in axes]
    gflat = g.values.reshape(g.values.shape[:6] + (9,))
    mag = np.abs(f.values).max(axis=(-2, -1))
    for zp in zip(*np.nonzero(mag > atol * mag.max())):
        off = [i - a.zero for i, a in zip(zp, axes)]
        tgt = tuple(slice(max(o, 0), a.count + min(o, 0)) for o, a in zip(off, axes))
        src = tuple(slice(max(-o, 0), a.count - max(o, 0)) for o, a in zip(off, axes))
        ph = np.ones(1, dtype=complex)
        for j in range(6):
            # lambda axes meet mu', mu axes meet lambda'
            z = nodes[j][tgt[j]]
            fac = np.exp(-1j * hb * z * nodes[j + 3][zp[j + 3]]) if j < 3 else np.exp(1j * hb * z * nodes[j - 3][zp[j - 3]])
            ph = np.multiply.outer(ph, fac)
        ph = ph[0]
        contrib = (gflat[src] @ _grid_scatter(f.values[zp])) * ph[..., None]
        out[tgt] += contrib.reshape(contrib.shape[:6] + (3, 3))
    return f.with_values(out * f.weight)


def delta_field(like: TildeField, k: int = 0, l: int = 0, scale: float = 1.0) -> TildeField:
    """``scale`` times the continuous delta at the origin on the axes of ``like``, grid component ``(k, l)``."""
    v = np.zeros_like(like.values)
    idx = tuple(a.zero for a in like.lam + like.mu)
    v[idx + (k, l)] = scale / like.weight
    return like.with_values(v)


def gaussian_field(lam: tuple, mu: tuple, alpha: float, grid_weights=None, units: Units = NATURAL) -> TildeField:
    """``exp(-alpha (|lambda|^2 + |mu|^2))`` times a 3x3 grid table (default ``delta(0, 0)``)."""
    w = np.zeros((3, 3), dtype=complex)
    if grid_weights is None:
        w[0, 0] = 1.0
    else:
        w[:] = grid_weights
    r2 = reduce(np.add.outer, [a.nodes() ** 2 for a in lam + mu])
    return TildeField(lam, mu, np.exp(-alpha * r2)[..., None, None] * w, 0.0, units)


__all__ = [
    "DualAxis", "TildeField", "lambda_axes", "mu_axes", "tilde_rho", "rho_from_tilde",
    "boxtimes_continuous", "delta_field", "gaussian_field",
]
