"""Photon Wigner functions from a momentum-space state.

With ``P = 1`` the lambda-integral collapses onto ``p = hbar k`` and the
Wigner function becomes a mu-integral of products
``psi~_a(k - mu/2) conj(psi~_b(k + mu/2))``. On the offset k-grid the shifts
``mu/2 = s dk`` (``s`` an integer vector) land exactly on nodes, so the mu
integral is a sum over the lattice ``mu = 2 s dk`` with weight
``prod(2 dk)``. Consequently every Wigner function here is periodic in ``x``
with period ``pi / dk`` per axis, and the ``x`` integrals run over one
period.

The per-node array of those products (times the ``1/sqrt(|k-mu/2||k+mu/2|)``
weight and the retardation phase) is the *mixed field*; all Wigner
functions, marginals, constraint residuals and brackets are contractions of
it.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import product
from typing import Callable

import numpy as np

from .grid import KernelK, _D_N, get_kernel, phase, reweight_dual
from .state import KGrid, PhotonStateK
from .units import NATURAL, Units

_TWO_PI = 2.0 * np.pi


# ------------------------------------------------------------------ kernels


@dataclass(frozen=True)
class KernelP:
    """Continuous kernel evaluated at ``hbar lambda.mu / 2``; ``fn=None`` is the Weyl choice."""

    name: str = "weyl"
    fn: Callable | None = None

    def __call__(self, arg):
        arg = np.asarray(arg, dtype=float)
        if self.fn is None:
            return np.ones_like(arg, dtype=complex)
        return np.asarray(self.fn(arg), dtype=complex)

    def is_unimodular(self, probe=np.linspace(-50.0, 50.0, 2001), tol=1e-12) -> bool:
        return bool(np.all(np.abs(np.abs(self(probe)) - 1.0) <= tol))


WEYL_P = KernelP()


def _require_weyl(P: KernelP):
    if P.fn is not None:
        raise NotImplementedError("only the Weyl continuous kernel (P = 1) is supported")


def general_matrix(kernel) -> np.ndarray:
    """9x9 matrix mapping ``J_ab`` to ``(2 pi)^6 hbar^3 rho_W(m, n)`` for grid kernel ``K``.

    Entry ``[(m, n), (a, b)] = 1/9 sum_kl K(k,l) exp(-i(k phi_m + phi_l n)) D(k,l)[b, a]``
    with ``D`` in the n-basis, which is the grid part of the general
    formula summed over ``n'``.
    """
    K = get_kernel(kernel)
    T = np.zeros((3, 3, 3, 3), dtype=complex)
    for m, n, k, l in product(range(3), repeat=4):
        T[m, n] += K.table[k, l] * phase(-(2 * k * m + 2 * l * n)) * _D_N[k, l].T
    return T.reshape(9, 9) / 9.0


# ------------------------------------------------------------- mixed field


@dataclass(frozen=True)
class MixedNode:
    """Products at one k-node over the box of shifts ``-r <= s <= r``.

    ``g[s + r, a, b] = w(s) exp(-i(|k - s dk| - |k + s dk|) c t) psi~_a(k - s dk) conj(psi~_b(k + s dk))``.
    """

    index: tuple
    r: np.ndarray
    g: np.ndarray = field(repr=False)


def _node_box(grid: KGrid, c):
    c = np.asarray(c, dtype=int)
    n = np.asarray(grid.shape)
    if np.any(c < 0) or np.any(c >= n):
        raise ValueError(f"node index {tuple(c)} outside grid {tuple(n)}")
    r = np.minimum(c, n - 1 - c)
    sl = tuple(slice(ci - ri, ci + ri + 1) for ci, ri in zip(c, r))
    return r, sl


def mixed_node(s: PhotonStateK, c, t: float = 0.0, units: Units = NATURAL, psi=None) -> MixedNode:
    psi = s.psi if psi is None else psi
    r, sl = _node_box(s.grid, c)
    b = psi[sl]
    nrm = s.grid.norm[sl]
    bf = b[::-1, ::-1, ::-1]
    nf = nrm[::-1, ::-1, ::-1]
    w = 1.0 / np.sqrt(nf * nrm)
    if t != 0.0:
        w = w * np.exp(-1j * (nf - nrm) * units.c * t)
    g = bf[..., :, None] * b.conj()[..., None, :] * w[..., None, None]
    return MixedNode(tuple(int(v) for v in c), r, g)


def _shift_phases(grid: KGrid, r, x):
    """Per-axis factors ``exp(-i mu_j x_j)`` with ``mu_j = 2 s_j dk_j``; shapes ``(X, 2 r_j + 1)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = []
    for j in range(3):
        sj = np.arange(-r[j], r[j] + 1)
        out.append(np.exp(-2j * grid.spacing[j] * np.outer(x[:, j], sj)))
    return out


def _contract_x(node: MixedNode, grid: KGrid, x, weights=None) -> np.ndarray:
    """``sum_s g(s) exp(-i mu.x)`` for every x row; returns ``(X, 3, 3)``."""
    e1, e2, e3 = _shift_phases(grid, node.r, x)
    g = node.g if weights is None else node.g * weights
    tmp = np.einsum("abcij,xc->xabij", g, e3)
    tmp = np.einsum("xabij,xb->xaij", tmp, e2)
    return np.einsum("xaij,xa->xij", tmp, e1)


def _mu_measure(grid: KGrid) -> float:
    return float(np.prod(2.0 * grid.spacing))


def x_period(grid: KGrid) -> np.ndarray:
    return np.pi / grid.spacing


def _check_nyquist(grid: KGrid, x):
    half = 0.5 * x_period(grid)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if np.any(np.abs(x) > half * (1 + 1e-12)):
        raise ValueError(
            f"x extent exceeds the half period {tuple(half)} set by the mu lattice; refine dk"
        )


# ---------------------------------------------------------- sample specs


@dataclass(frozen=True)
class SampleSpec:
    """Node indices of the k-grid (``p = hbar k``) crossed with position points."""

    p_index: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.p_index, dtype=int))
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        if p.shape[1] != 3 or x.shape[1] != 3:
            raise ValueError("p_index and x need 3 columns")
        object.__setattr__(self, "p_index", p)
        object.__setattr__(self, "x", x)

    @classmethod
    def x_slice(cls, grid: KGrid, x=(0.0, 0.0, 0.0)):
        idx = np.stack(np.meshgrid(*[np.arange(n) for n in grid.shape], indexing="ij"), -1).reshape(-1, 3)
        return cls(idx, np.asarray(x, dtype=float).reshape(1, 3))

    @classmethod
    def random(cls, grid: KGrid, n_p: int, n_x: int, rng, x_scale=None, p_weight=None):
        """``n_p`` nodes (optionally drawn with probability ``p_weight``) and ``n_x`` points."""
        prob = None
        if p_weight is not None:
            prob = np.asarray(p_weight, dtype=float).reshape(-1)
            prob = prob / prob.sum()
        flat = rng.choice(grid.size, size=n_p, replace=False, p=prob)
        idx = np.stack(np.unravel_index(flat, grid.shape), axis=-1)
        half = 0.5 * x_period(grid) if x_scale is None else np.broadcast_to(x_scale, (3,))
        x = rng.uniform(-1.0, 1.0, size=(n_x, 3)) * half
        return cls(idx, x)


@dataclass(frozen=True)
class PhaseSpaceField:
    """Samples ``rho_W(p, x, phi_m, n; t)`` with shape ``(P, X, 3, 3)`` (axes p, x, m, n)."""

    p: np.ndarray
    x: np.ndarray
    t: float
    values: np.ndarray = field(repr=False)
    imag: np.ndarray = field(repr=False)
    kernel: str = "weyl67"

    @property
    def imag_residual(self) -> float:
        scale = float(np.max(np.abs(self.values)))
        return float(np.max(np.abs(self.imag))) / scale if scale > 0 else 0.0


@dataclass(frozen=True)
class DeltaField:
    p: np.ndarray
    x: np.ndarray
    t: float
    values: np.ndarray = field(repr=False)


def _evaluate(s, spec: SampleSpec, t, units, combine):
    _check_nyquist(s.grid, spec.x)
    out = None
    pref = _mu_measure(s.grid) / (_TWO_PI**6 * units.hbar**3)
    for i, c in enumerate(spec.p_index):
        J = _contract_x(mixed_node(s, c, t, units), s.grid, spec.x) * pref
        vals = combine(J)
        if out is None:
            out = np.zeros((len(spec.p_index),) + vals.shape, dtype=vals.dtype)
        out[i] = vals
    return out


def _momenta(s, spec, units):
    return units.hbar * s.grid.k[tuple(spec.p_index.T)]


def wigner_general(s: PhotonStateK, spec: SampleSpec, kernel="weyl67", P: KernelP = WEYL_P,
                   t: float = 0.0, units: Units = NATURAL) -> PhaseSpaceField:
    """Full grid-kernel sum over ``(k, l, n')`` for any :class:`~photonwigner.grid.KernelK`."""
    _require_weyl(P)
    K = get_kernel(kernel)
    T = general_matrix(K)
    vals = _evaluate(s, spec, t, units, lambda J: np.einsum("zq,xq->xz", T, J.reshape(len(J), 9)).reshape(-1, 3, 3))
    return PhaseSpaceField(_momenta(s, spec, units), spec.x, s.t + t, vals.real.copy(), vals.imag.copy(), K.name)


def _k67_combine(J):
    out = np.empty(J.shape[:1] + (3, 3))
    for m in range(3):
        for n in range(3):
            z = J[:, n, n] + 2.0 * phase(-2 * m) * J[:, (n + 2) % 3, (n + 1) % 3]
            out[:, m, n] = z.real / 3.0
    return out


def wigner_k67(s: PhotonStateK, spec: SampleSpec, t: float = 0.0, units: Units = NATURAL) -> PhaseSpaceField:
    """Closed form for ``K = (-1)^{kl}``: diagonal term plus twice one cyclic off-diagonal term."""
    vals = _evaluate(s, spec, t, units, _k67_combine)
    return PhaseSpaceField(_momenta(s, spec, units), spec.x, s.t + t, vals, np.zeros_like(vals), "weyl67")


def _delta_combine(J):
    out = np.zeros(J.shape[:1] + (3, 3), dtype=complex)
    for m in range(3):
        for n in range(3):
            for n2 in range(3):
                out[:, m, n] += phase(-2 * m * (n - n2)) * J[:, n, n2]
    return out / 3.0


def wigner_k69(s: PhotonStateK, spec: SampleSpec, t: float = 0.0, units: Units = NATURAL):
    """Closed form for ``K = cos(pi k l / 3)``; returns ``(Delta_W, rho_W = Re Delta_W)``."""
    d = _evaluate(s, spec, t, units, _delta_combine)
    p = _momenta(s, spec, units)
    delta = DeltaField(p, spec.x, s.t + t, d)
    rho = PhaseSpaceField(p, spec.x, s.t + t, d.real.copy(), np.zeros(d.shape), "cos69")
    return delta, rho


def wigner(s: PhotonStateK, spec: SampleSpec, kernel="weyl67", t: float = 0.0, units: Units = NATURAL,
           method: str = "closed") -> PhaseSpaceField:
    """Dispatch to the closed form for a shipped kernel, or to the general sum."""
    K = get_kernel(kernel)
    if method == "general":
        return wigner_general(s, spec, K, WEYL_P, t, units)
    if method != "closed":
        raise ValueError(f"method must be 'closed' or 'general', got {method!r}")
    if K.name == "weyl67":
        return wigner_k67(s, spec, t, units)
    if K.name == "cos69":
        return wigner_k69(s, spec, t, units)[1]
    return wigner_general(s, spec, K, WEYL_P, t, units)


# -------------------------------------------------------------- constraint


def constraint_residual(s: PhotonStateK, spec: SampleSpec, t: float = 0.0, units: Units = NATURAL) -> float:
    """Relative size of ``sum_n (k_{n+1} - (i/2) d/dx^{n+1}) Delta_W(p, x, 0, n)``.

    The x-derivative acts on ``exp(-i mu.x)`` exactly, turning the operator
    into multiplication by ``(k - mu/2)_n``. The denominator is the same sum
    taken in absolute value term by term.
    """
    _check_nyquist(s.grid, spec.x)
    worst_r, worst_n = 0.0, 0.0
    for c in spec.p_index:
        node = mixed_node(s, c, t, units)
        k = s.grid.k[tuple(c)]
        shifts = np.stack(np.meshgrid(*[np.arange(-rj, rj + 1) for rj in node.r], indexing="ij"), -1)
        fac = k - shifts * s.grid.spacing
        # Delta_W(m=0, n) sums g[n, n'] over n'; apply (k - mu/2)_n and sum over n
        terms = fac[..., :, None] * node.g
        contracted = MixedNode(node.index, node.r, terms.sum(axis=(-2, -1))[..., None, None])
        res = _contract_x(contracted, s.grid, spec.x)[:, 0, 0]
        absn = MixedNode(node.index, node.r, np.abs(terms).sum(axis=(-2, -1))[..., None, None])
        worst_r = max(worst_r, float(np.max(np.abs(res))))
        worst_n = max(worst_n, float(np.max(np.abs(_contract_x(absn, s.grid, np.zeros((1, 3)))))))
    return worst_r / worst_n if worst_n > 0 else 0.0


# --------------------------------------------------------------- marginals


@dataclass(frozen=True)
class Marginals:
    """The four reductions of a Wigner function plus its total integral."""

    momentum: np.ndarray
    position: np.ndarray
    n_weights: np.ndarray
    m_weights: np.ndarray
    total: float
    imag_residual: float
    x_axes_counts: tuple
    kernel: str

    def report(self) -> dict:
        return {
            "kernel": self.kernel,
            "normalization": self.total,
            "n_weights_sum": float(np.sum(self.n_weights)),
            "m_weights_sum": float(np.sum(self.m_weights)),
            "position_min": float(np.min(self.position)),
            "imag_residual": self.imag_residual,
            "x_counts": list(self.x_axes_counts),
        }


def x_grid(grid: KGrid, counts) -> tuple:
    """Periodic position nodes ``(j - M/2) * period / M`` on each axis."""
    counts = np.broadcast_to(np.asarray(counts, dtype=int), (3,))
    per = x_period(grid)
    return tuple((np.arange(M) - M // 2) * (L / M) for M, L in zip(counts, per))


def _fold(g, r, counts, x0, dk):
    """Alias the shift box onto residues mod M after applying ``exp(-2 i s dk x0)``.

    ``fft`` of the result gives ``sum_s g(s) exp(-i mu.x)`` on the periodic
    x-grid starting at ``x0``.
    """
    out = g
    for j in range(3):
        M = int(counts[j])
        s = np.arange(-r[j], r[j] + 1)
        out = np.moveaxis(out, j, 0)
        out = out * np.exp(-2j * x0[j] * s * dk[j]).reshape((-1,) + (1,) * (out.ndim - 1))
        # pad so that row i holds the shift s = i - lead (mod M), then sum the blocks
        lead = (-r[j]) % M
        total = -(-(lead + len(s)) // M) * M
        pad = [(lead, total - lead - len(s))] + [(0, 0)] * (out.ndim - 1)
        out = np.pad(out, pad).reshape((total // M, M) + out.shape[1:]).sum(axis=0)
        out = np.moveaxis(out, 0, j)
    return out


def marginals(s: PhotonStateK, kernel="weyl67", t: float = 0.0, x_counts=16, units: Units = NATURAL) -> Marginals:
    """Stream over every k-node, evaluate ``rho_W`` on the full periodic x-grid, and reduce.

    The field is never stored: for each node the shift box is folded onto the
    ``x_counts`` residues and transformed by one FFT. Quadrature weights are
    ``hbar^3 dk^3`` in ``p`` and ``(period / M)^3`` in ``x``; the periodic
    rule is exact for every lattice frequency below ``M`` per axis.
    """
    grid = s.grid
    counts = np.broadcast_to(np.asarray(x_counts, dtype=int), (3,))
    if np.any(counts < 2):
        raise ValueError("x_counts must be at least 2 per axis")
    K = get_kernel(kernel)
    T = general_matrix(K)
    xs = x_grid(grid, counts)
    x0 = np.array([a[0] for a in xs])
    dx3 = float(np.prod(x_period(grid) / counts))
    dp3 = units.hbar**3 * grid.cell_volume
    pref = _mu_measure(grid) / (_TWO_PI**6 * units.hbar**3)
    mom = np.zeros(grid.shape)
    pos = np.zeros(tuple(counts))
    gw = np.zeros((3, 3))
    worst_imag, scale = 0.0, 0.0
    for c in np.ndindex(*grid.shape):
        node = mixed_node(s, c, t, units)
        folded = _fold(node.g, node.r, counts, x0, grid.spacing).reshape(tuple(counts) + (9,))
        J = np.fft.fftn(folded, axes=(0, 1, 2)) * pref
        rho = np.einsum("zq,abcq->abcz", T, J)
        worst_imag = max(worst_imag, float(np.max(np.abs(rho.imag))))
        rho = rho.real
        scale = max(scale, float(np.max(np.abs(rho))))
        mom[c] = float(np.sum(rho)) * dx3
        pos += rho.sum(axis=-1) * dp3
        gw += rho.sum(axis=(0, 1, 2)).reshape(3, 3) * dx3 * dp3
    return Marginals(
        momentum=mom,
        position=pos,
        n_weights=gw.sum(axis=0),
        m_weights=gw.sum(axis=1),
        total=float(gw.sum()),
        imag_residual=worst_imag / scale if scale > 0 else 0.0,
        x_axes_counts=tuple(int(v) for v in counts),
        kernel=K.name,
    )


def momentum_marginal(s: PhotonStateK, t: float = 0.0, x_counts=16, units: Units = NATURAL) -> np.ndarray:
    """``sum_mn int d^3x rho_W`` at every k-node by periodic x-quadrature.

    Summing the grid part over ``(m, n)`` leaves ``sum_a J_aa`` for any
    kernel with ``K(0, 0) = 1``, and the periodic rule with ``M`` nodes keeps
    exactly the shifts ``s = 0 mod M``; only those are accumulated.
    """
    grid = s.grid
    counts = np.broadcast_to(np.asarray(x_counts, dtype=int), (3,))
    n = np.asarray(grid.shape)
    x0 = np.array([a[0] for a in x_grid(grid, counts)])
    pref = _mu_measure(grid) / (_TWO_PI**6 * units.hbar**3)
    vol = float(np.prod(x_period(grid)))
    out = np.zeros(grid.shape, dtype=complex)
    ranges = []
    for nj, M in zip(n, counts):
        top = (nj - 1) // 2
        ranges.append(np.arange(-(top // M) * M, top + 1, M))
    for sv in product(*ranges):
        sv = np.array(sv)
        a = np.abs(sv)
        core = tuple(slice(l, nj - l) for l, nj in zip(a, n))
        minus = tuple(slice(l - v, nj - l - v) for l, v, nj in zip(a, sv, n))
        plus = tuple(slice(l + v, nj - l + v) for l, v, nj in zip(a, sv, n))
        n1, n2 = grid.norm[minus], grid.norm[plus]
        w = np.exp(-1j * (n1 - n2) * units.c * t) / np.sqrt(n1 * n2)
        diag = np.sum(s.psi[minus] * s.psi[plus].conj(), axis=-1)
        out[core] += w * diag * np.exp(-2j * np.sum(sv * grid.spacing * x0))
    return (pref * vol * out).real


def momentum_density_expected(s: PhotonStateK, units: Units = NATURAL) -> np.ndarray:
    """``psi~^dagger psi~ / ((2 pi)^3 hbar^3 |k|)``."""
    return np.sum(np.abs(s.psi) ** 2, axis=-1) / (_TWO_PI**3 * units.hbar**3 * s.grid.norm)


def marginals_from_field(f: PhaseSpaceField, grid: KGrid, x_counts, units: Units = NATURAL) -> Marginals:
    """Quadrature of a field sampled on every k-node crossed with the full periodic x-grid.

    The x rows must be ordered as produced by :func:`full_domain_spec`.
    """
    counts = tuple(int(v) for v in np.broadcast_to(np.asarray(x_counts, dtype=int), (3,)))
    if f.values.shape[0] != grid.size or f.values.shape[1] != int(np.prod(counts)):
        raise ValueError("field does not cover the full domain")
    dx3 = float(np.prod(x_period(grid) / np.asarray(counts)))
    dp3 = units.hbar**3 * grid.cell_volume
    v = f.values
    mom = v.sum(axis=(1, 2, 3)).reshape(grid.shape) * dx3
    pos = v.sum(axis=(0, 2, 3)).reshape(counts) * dp3
    gw = v.sum(axis=(0, 1)) * dx3 * dp3
    return Marginals(mom, pos, gw.sum(axis=0), gw.sum(axis=1), float(gw.sum()), f.imag_residual, counts, f.kernel)


def full_domain_spec(grid: KGrid, x_counts) -> SampleSpec:
    xs = x_grid(grid, x_counts)
    x = np.stack(np.meshgrid(*xs, indexing="ij"), -1).reshape(-1, 3)
    idx = np.stack(np.meshgrid(*[np.arange(n) for n in grid.shape], indexing="ij"), -1).reshape(-1, 3)
    return SampleSpec(idx, x)


# --------------------------------------------------------------- R_W


def _reweight_matrix(weights) -> np.ndarray:
    R = np.zeros((9, 9), dtype=complex)
    for q in range(9):
        e = np.zeros(9)
        e[q] = 1.0
        R[:, q] = reweight_dual(e.reshape(3, 3), weights).reshape(9)
    return R


def r_w_transform(f: PhaseSpaceField, kernel, inverse: bool = False) -> PhaseSpaceField:
    """Apply the ``|K|^-2`` weighted grid double sum (``|K|^2`` for the inverse).

    With ``P = 1`` the continuous part of the transform is the identity, so
    only the ``(m, n)`` axes are touched.
    """
    K = get_kernel(kernel)
    w = np.abs(K.table) ** (2.0 if inverse else -2.0)
    R = _reweight_matrix(w)
    shp = f.values.shape
    z = (f.values + 1j * f.imag).reshape(shp[:2] + (9,))
    out = np.einsum("zq,...q->...z", R, z).reshape(shp)
    return PhaseSpaceField(f.p, f.x, f.t, out.real.copy(), out.imag.copy(), f.kernel)


# -------------------------------------------------------------- evolution


@dataclass(frozen=True)
class MixedField:
    """Mixed ``(p, mu)`` samples at several k-nodes."""

    grid: KGrid
    nodes: tuple
    t: float


def mixed_field(s: PhotonStateK, p_index, t: float = 0.0, units: Units = NATURAL) -> MixedField:
    p_index = np.atleast_2d(np.asarray(p_index, dtype=int))
    return MixedField(s.grid, tuple(mixed_node(s, c, t, units) for c in p_index), s.t + t)


def moyal_h_bracket(mf: MixedField, units: Units = NATURAL) -> MixedField:
    """``(1/(i hbar))(rho * H - H * rho)`` for ``H = c|p|`` in the mixed representation.

    A function of ``p`` alone acts on the ``mu`` component by the shifts
    ``p -+ hbar mu / 2``, so the bracket multiplies each component by
    ``(i c / hbar)(|p - hbar mu/2| - |p + hbar mu/2|)``.
    """
    g = mf.grid
    out = []
    for node in mf.nodes:
        p = units.hbar * g.k[node.index]
        sh = np.stack(np.meshgrid(*[np.arange(-rj, rj + 1) for rj in node.r], indexing="ij"), -1)
        half = units.hbar * sh * g.spacing
        hm = units.c * np.linalg.norm(p - half, axis=-1)
        hp = units.c * np.linalg.norm(p + half, axis=-1)
        fac = 1j * (hm - hp) / units.hbar
        out.append(MixedNode(node.index, node.r, node.g * fac[..., None, None]))
    return MixedField(g, tuple(out), mf.t)


def evaluate_mixed(mf: MixedField, x, units: Units = NATURAL, kernel="weyl67") -> np.ndarray:
    """Wigner-type function ``(P, X, 3, 3)`` represented by a mixed field."""
    T = general_matrix(kernel)
    pref = _mu_measure(mf.grid) / (_TWO_PI**6 * units.hbar**3)
    rows = []
    for node in mf.nodes:
        J = _contract_x(node, mf.grid, x) * pref
        rows.append(np.einsum("zq,xq->xz", T, J.reshape(len(J), 9)).reshape(-1, 3, 3))
    return np.array(rows)


def evolution_residual(s: PhotonStateK, spec: SampleSpec, t: float = 0.0, dt: float | None = None,
                       units: Units = NATURAL, max_phase: float = 1e-2) -> dict:
    """Compare central-difference ``d rho_W/dt`` with minus the Moyal bracket.

    ``dt`` defaults to ``1e-3 / (c k_max)``; a step whose largest phase
    increment ``c k_max dt`` exceeds ``max_phase`` is halved with a warning.
    """
    kmax = float(np.max(s.grid.norm))
    if dt is None:
        dt = 1e-3 / (units.c * kmax)
    while units.c * kmax * dt > max_phase:
        dt *= 0.5
        warnings.warn(f"time step too large for second-order accuracy; halved to {dt:.3g}",
                      RuntimeWarning, stacklevel=2)
    plus = wigner_k67(s, spec, t + dt, units).values
    minus = wigner_k67(s, spec, t - dt, units).values
    fd = (plus - minus) / (2.0 * dt)
    br = evaluate_mixed(moyal_h_bracket(mixed_field(s, spec.p_index, t, units), units), spec.x, units)
    resid = float(np.max(np.abs(fd + br.real)))
    scale = float(np.max(np.abs(br.real)))
    mm_plus = momentum_marginal(s, t + dt, units=units)
    mm_minus = momentum_marginal(s, t - dt, units=units)
    mm_rate = float(np.max(np.abs(mm_plus - mm_minus)) / (2.0 * dt))
    mm_scale = float(np.max(np.abs(mm_plus)))
    return {
        "dt": dt,
        "relative_residual": resid / scale if scale > 0 else 0.0,
        "bracket_scale": scale,
        "bracket_imag": float(np.max(np.abs(br.imag))) / scale if scale > 0 else 0.0,
        "momentum_marginal_rate": mm_rate / mm_scale if mm_scale > 0 else 0.0,
    }
