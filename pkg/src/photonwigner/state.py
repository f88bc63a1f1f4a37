"""Single-photon states in the momentum representation.

A state is the transverse 3-vector field ``psi~(k)`` sampled on an offset
cubic k-grid. Integrals ``int d^3k/(2 pi)^3 ...`` are node sums with weight
``dk1 dk2 dk3 / (2 pi)^3`` (cell-centred rule); the grid never contains
``k = 0``, so the ``1/|k|`` weights are finite.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import algebra
from ._validation import as_rows3, as_vec3, check_positive
from .numerics import AxisSpec, SampledField, conjugate_axis, fourier_forward, fourier_inverse
from .units import NATURAL, Units

_TWO_PI = 2.0 * np.pi
TRANSVERSE_TOL = 1e-10

# int over [-1, 1]^3 of d^3u / |u|, used to bound the cells around the origin
_ORIGIN_CUBE_INTEGRAL = 8 * 1.1900386819897766


# -------------------------------------------------------------------- grid


@dataclass(frozen=True)
class KGrid:
    """Uniform k-grid of cell centres; built with :meth:`centered`."""

    axes: tuple

    def __post_init__(self):
        axes = tuple(self.axes)
        if len(axes) != 3:
            raise ValueError("a k-grid needs exactly three axes")
        for ax in axes:
            if not ax.periodic:
                raise ValueError("k-grid axes use equal cell weights (periodic=True)")
        object.__setattr__(self, "axes", axes)
        if float(np.min(self.norm)) <= 0.0:
            raise ValueError("k-grid contains k = 0; use an even count per axis")

    @classmethod
    def centered(cls, n, dk, offset=(0.0, 0.0, 0.0)):
        """Nodes ``(j - n/2 + 1/2) dk + offset`` for ``j = 0..n-1`` on each axis."""
        n = np.broadcast_to(np.asarray(n, dtype=int), (3,))
        dk = np.broadcast_to(np.asarray(dk, dtype=float), (3,))
        offset = as_vec3(offset, "offset")
        axes = []
        for ni, di, oi in zip(n, dk, offset):
            check_positive(di, "dk")
            if ni < 2:
                raise ValueError(f"need at least 2 samples per axis, got {ni}")
            start = (0.5 - ni / 2.0) * di + oi
            axes.append(AxisSpec.from_spacing(start, di, int(ni), periodic=True))
        return cls(tuple(axes))

    @property
    def shape(self):
        return tuple(a.count for a in self.axes)

    @property
    def spacing(self) -> np.ndarray:
        return np.array([a.spacing for a in self.axes])

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def measure(self) -> float:
        """Weight of one node in ``int d^3k / (2 pi)^3``."""
        return self.cell_volume / _TWO_PI**3

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def nodes1d(self, i):
        return self.axes[i].nodes()

    @property
    def k(self) -> np.ndarray:
        """Node coordinates, shape ``(*shape, 3)``."""
        cached = self.__dict__.get("_k")
        if cached is None:
            cached = np.stack(np.meshgrid(*[a.nodes() for a in self.axes], indexing="ij"), axis=-1)
            cached.setflags(write=False)
            object.__setattr__(self, "_k", cached)
        return cached

    @property
    def norm(self) -> np.ndarray:
        cached = self.__dict__.get("_norm")
        if cached is None:
            cached = np.sqrt(np.sum(self.k**2, axis=-1))
            cached.setflags(write=False)
            object.__setattr__(self, "_norm", cached)
        return cached

    def same_as(self, other: "KGrid") -> bool:
        return self.axes == other.axes

    def box_mask(self, box) -> np.ndarray:
        """Nodes inside the closed box ``((lo1, hi1), (lo2, hi2), (lo3, hi3))``."""
        box = np.asarray(box, dtype=float)
        if box.shape != (3, 2):
            raise ValueError(f"box must have shape (3, 2), got {box.shape}")
        k = self.k
        return np.all((k >= box[:, 0]) & (k <= box[:, 1]), axis=-1)

    def origin_cell_bound(self, psi) -> float:
        """Bound on the BB-weighted integral over the cube of side ``2 dk`` around k = 0.

        That cube is where the cell-centred rule handles ``1/|k|`` least
        accurately; the bound uses the largest ``|psi~|^2`` on its nodes.
        """
        psi = np.asarray(psi)
        h = self.spacing
        near = np.all(np.abs(self.k) < h, axis=-1)
        if not near.any():
            return 0.0
        peak = float(np.max(np.sum(np.abs(psi[near]) ** 2, axis=-1)))
        return peak * _ORIGIN_CUBE_INTEGRAL * float(np.prod(h)) / float(np.min(h)) / _TWO_PI**3

    def x_axes(self, centre=(0.0, 0.0, 0.0)):
        """Position axes conjugate to this grid with nodes ``n dx`` for ``n`` in ``[-N/2, N/2)``."""
        centre = as_vec3(centre, "centre")
        out = []
        for ax, c in zip(self.axes, centre):
            dx = _TWO_PI / (ax.count * ax.spacing)
            out.append(conjugate_axis(ax, c - (ax.count // 2) * dx))
        return tuple(out)


# ------------------------------------------------------------------- triad


@dataclass(frozen=True)
class HelicityTriad:
    m: np.ndarray
    n: np.ndarray
    e: np.ndarray


def helicity_triad(k) -> HelicityTriad:
    """Polarization triad at ``k`` (a single vector or an array of shape ``(..., 3)``).

    ``m`` is the polar unit vector of ``k``, ``n = k^ x m`` and
    ``e = (m + i n)/sqrt(2)``. On the z-axis ``m = x^``. Because ``m(-k) = m(k)``
    and ``n(-k) = -n(k)`` hold exactly in floating point, ``e(-k) = conj(e(k))``
    with no rounding error.
    """
    k = np.asarray(k, dtype=float)
    if k.shape[-1:] != (3,):
        raise ValueError(f"k must have a trailing axis of length 3, got {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValueError("k contains non-finite entries")
    kn = np.sqrt(np.sum(k**2, axis=-1))
    if np.any(kn == 0):
        raise ValueError("helicity triad is undefined at k = 0")
    rho = np.hypot(k[..., 0], k[..., 1])
    pole = rho == 0
    safe = np.where(pole, 1.0, rho)
    m = np.stack(
        [k[..., 2] * k[..., 0] / (kn * safe), k[..., 2] * k[..., 1] / (kn * safe), -rho / kn],
        axis=-1,
    )
    m = np.where(pole[..., None], np.array([1.0, 0.0, 0.0]), m)
    khat = k / kn[..., None]
    n = np.cross(khat, m)
    e = (m + 1j * n) / algebra.SQRT2
    return HelicityTriad(m, n, e)


def triad_residuals(k) -> dict:
    """Worst-case violations of the triad identities over rows of ``k``."""
    k = as_rows3(k, "k")
    t = helicity_triad(k)
    khat = k / np.linalg.norm(k, axis=-1, keepdims=True)
    s = algebra.spin1("standard")
    sk = np.einsum("ij,jab->iab", khat, s.matrices)
    tm = helicity_triad(-k)
    dot = lambda a, b: np.einsum("ij,ij->i", a, b)
    return {
        "eigen": float(np.max(np.abs(np.einsum("iab,ib->ia", sk, t.e) - t.e))),
        "norm": float(np.max(np.abs(dot(t.e.conj(), t.e) - 1))),
        "isotropic": float(np.max(np.abs(dot(t.e, t.e)))),
        "transverse": float(np.max(np.abs(dot(khat, t.e)))),
        "orthonormal": float(max(
            np.max(np.abs(dot(t.m, t.m) - 1)),
            np.max(np.abs(dot(t.n, t.n) - 1)),
            np.max(np.abs(dot(t.m, t.n))),
        )),
        "handedness": float(np.max(np.abs(np.cross(t.m, t.n) - khat))),
        "reflection": float(np.max(np.abs(tm.e - t.e.conj()))),
    }


def _grid_triad(grid: KGrid) -> np.ndarray:
    cached = grid.__dict__.get("_e")
    if cached is None:
        cached = helicity_triad(grid.k).e
        cached.setflags(write=False)
        object.__setattr__(grid, "_e", cached)
    return cached


# ------------------------------------------------------------------ states


@dataclass(frozen=True)
class SpectralAmplitudes:
    """Helicity amplitudes ``alpha(k, +1)`` and ``alpha(k, -1)`` on a grid."""

    grid: KGrid
    alpha_plus: np.ndarray = field(repr=False)
    alpha_minus: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("alpha_plus", "alpha_minus"):
            a = np.asarray(getattr(self, name), dtype=complex)
            if a.shape != self.grid.shape:
                raise ValueError(f"{name} has shape {a.shape}, grid is {self.grid.shape}")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} must be finite on every node")
            object.__setattr__(self, name, a)


def transverse_residual(grid: KGrid, psi) -> float:
    """``max |k . psi~| / |k|`` relative to ``max |psi~|`` (0 for the zero field)."""
    psi = np.asarray(psi)
    scale = float(np.max(np.abs(psi))) if psi.size else 0.0
    if scale == 0.0:
        return 0.0
    dot = np.abs(np.einsum("...j,...j->...", grid.k, psi)) / grid.norm
    return float(np.max(dot)) / scale


@dataclass(frozen=True)
class PhotonStateK:
    """``psi~(k, t)`` on a k-grid; ``t`` records the time already applied."""

    grid: KGrid
    psi: np.ndarray = field(repr=False)
    t: float = 0.0
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex)
        if psi.shape != self.grid.shape + (3,):
            raise ValueError(f"psi must have shape {self.grid.shape + (3,)}, got {psi.shape}")
        if not np.all(np.isfinite(psi)):
            raise ValueError("psi must be finite on every node")
        if self.check:
            r = transverse_residual(self.grid, psi)
            if r > TRANSVERSE_TOL:
                raise ValueError(f"state is not transverse: relative residual {r:.3g}")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    def with_psi(self, psi, t=None, check=None) -> "PhotonStateK":
        return PhotonStateK(self.grid, psi, self.t if t is None else t,
                            self.check if check is None else check)

    def sampled(self) -> SampledField:
        return SampledField(self.grid.axes, 3, self.psi)


def build_state(a: SpectralAmplitudes, t: float = 0.0) -> PhotonStateK:
    """``psi~ = e alpha(+1) + conj(e) alpha(-1)``."""
    e = _grid_triad(a.grid)
    psi = e * a.alpha_plus[..., None] + e.conj() * a.alpha_minus[..., None]
    return PhotonStateK(a.grid, psi, t)


def alpha_from_state(s: PhotonStateK, tol: float = 1e-6) -> SpectralAmplitudes:
    r = transverse_residual(s.grid, s.psi)
    if r > tol:
        raise ValueError(f"state is not transverse (relative residual {r:.3g} > {tol})")
    e = _grid_triad(s.grid)
    ap = np.einsum("...j,...j->...", e.conj(), s.psi)
    am = np.einsum("...j,...j->...", e, s.psi)
    return SpectralAmplitudes(s.grid, ap, am)


def transverse_project(grid: KGrid, v) -> PhotonStateK:
    """Orthogonal projection of ``v`` onto ``span{e, conj(e)}`` at every node."""
    v = np.asarray(v, dtype=complex)
    if v.shape != grid.shape + (3,):
        raise ValueError(f"field must have shape {grid.shape + (3,)}, got {v.shape}")
    e = _grid_triad(grid)
    ap = np.einsum("...j,...j->...", e.conj(), v)
    am = np.einsum("...j,...j->...", e, v)
    return PhotonStateK(grid, e * ap[..., None] + e.conj() * am[..., None])


def gaussian_amplitudes(grid: KGrid, k0, sigma, weights=(1.0, 0.0), normalize=True) -> SpectralAmplitudes:
    """``alpha(k, +-1) = w_+- exp(-|k - k0|^2 / (4 sigma^2))`` (so ``|alpha|^2`` has width sigma).

    With ``normalize`` the amplitudes are scaled to unit BB norm on the grid.
    """
    k0 = as_vec3(k0, "k0")
    sigma = check_positive(sigma, "sigma")
    wp, wm = (complex(w) for w in weights)
    if wp == 0 and wm == 0:
        raise ValueError("at least one helicity weight must be nonzero")
    g = np.exp(-np.sum((grid.k - k0) ** 2, axis=-1) / (4.0 * sigma**2))
    ap, am = wp * g, wm * g
    if normalize:
        nrm = np.sqrt(np.sum((np.abs(ap) ** 2 + np.abs(am) ** 2) / grid.norm) * grid.measure)
        ap, am = ap / nrm, am / nrm
    return SpectralAmplitudes(grid, ap, am)


def gaussian_state(grid: KGrid, k0, sigma, weights=(1.0, 0.0), normalize=True) -> PhotonStateK:
    return build_state(gaussian_amplitudes(grid, k0, sigma, weights, normalize))


# -------------------------------------------------------- inner products


def _same_grid(s1, s2):
    if not s1.grid.same_as(s2.grid):
        raise ValueError("states live on different k-grids")


def bb_inner(s1: PhotonStateK, s2: PhotonStateK) -> complex:
    """``<1|2>_BB = int d^3k/((2 pi)^3 |k|) psi1~^dagger psi2~``."""
    _same_grid(s1, s2)
    g = s1.grid
    return complex(np.sum(np.einsum("...j,...j->...", s1.psi.conj(), s2.psi) / g.norm) * g.measure)


def bb_inner_alpha(a1: SpectralAmplitudes, a2: SpectralAmplitudes) -> complex:
    """Helicity-resolved form ``sum_lambda int d^3k/((2 pi)^3 |k|) alpha1* alpha2``."""
    if not a1.grid.same_as(a2.grid):
        raise ValueError("amplitudes live on different k-grids")
    g = a1.grid
    s = a1.alpha_plus.conj() * a2.alpha_plus + a1.alpha_minus.conj() * a2.alpha_minus
    return complex(np.sum(s / g.norm) * g.measure)


def bb_norm(s: PhotonStateK) -> float:
    return float(bb_inner(s, s).real)


def normalized(s: PhotonStateK) -> PhotonStateK:
    n = bb_norm(s)
    if n <= 0:
        raise ValueError("cannot normalize the zero state")
    return s.with_psi(s.psi / np.sqrt(n))


def bb_inner_position(f1: "PositionField", f2: "PositionField", units: Units = NATURAL) -> complex:
    """``1/(2 pi^2 hbar c) int d^3x d^3x' psi1^dagger(x) psi2(x') / |x - x'|^2``.

    Direct double sum over the position grids. For pairs at most one cell
    apart on every axis the midpoint value of ``1/|u|^2`` is replaced by its
    exact average over the displaced cell (:func:`_cell_integral`), which
    removes the coincident-point singularity. Cost is ``O(M^2)`` in the
    number of nodes.
    """
    if f1.axes != f2.axes:
        raise ValueError("position fields live on different grids")
    x = np.stack(np.meshgrid(*[a.nodes() for a in f1.axes], indexing="ij"), axis=-1).reshape(-1, 3)
    idx = np.stack(np.meshgrid(*[np.arange(a.count) for a in f1.axes], indexing="ij"), axis=-1).reshape(-1, 3)
    h = tuple(float(a.spacing) for a in f1.axes)
    vol = float(np.prod(h))
    near = np.zeros((2, 2, 2))
    for d in np.ndindex(2, 2, 2):
        near[d] = _cell_integral(d, h) * vol
    a = f1.psi.reshape(-1, 3).conj()
    b = f2.psi.reshape(-1, 3)
    total = 0.0 + 0.0j
    block = 512
    for i0 in range(0, len(x), block):
        r2 = np.sum((x[i0:i0 + block, None, :] - x[None, :, :]) ** 2, axis=-1)
        kern = vol * vol / np.where(r2 > 0, r2, 1.0)
        d = np.abs(idx[i0:i0 + block, None, :] - idx[None, :, :])
        close = np.all(d <= 1, axis=-1)
        dc = d[close]
        kern[close] = near[dc[:, 0], dc[:, 1], dc[:, 2]]
        total += np.sum(a[i0:i0 + block] * (kern @ b))
    return complex(total / (2.0 * np.pi**2 * units.hbar * units.c))


def _cell_integral(d, h) -> float:
    """``int d^3u / |u|^2`` over the cell of size ``h`` centred at ``d * h``."""
    from scipy import integrate

    lo = [(d[i] - 0.5) * h[i] for i in range(3)]
    hi = [(d[i] + 0.5) * h[i] for i in range(3)]

    # inner z-integral in closed form: int dz/(r^2 + z^2) = atan(z/r)/r
    def f(y, x):
        r = max(np.hypot(x, y), 1e-300)
        return (np.arctan(hi[2] / r) - np.arctan(lo[2] / r)) / r

    val, _ = integrate.dblquad(f, lo[0], hi[0], lo[1], hi[1], epsabs=1e-12, epsrel=1e-10)
    return val


# ---------------------------------------------------------- position space


@dataclass(frozen=True)
class PositionField:
    axes: tuple
    psi: np.ndarray = field(repr=False)
    t: float
    divergence_residual: float


def synthesize_position(s: PhotonStateK, t: float = 0.0, x_axes=None, units: Units = NATURAL) -> PositionField:
    """``psi(x, t) = sqrt(hbar c) int d^3k/(2 pi)^3 psi~(k) exp(i(k.x - omega_k t))``.

    ``t`` is measured from the state's own time stamp. The divergence residual
    is obtained by spectral differentiation of the returned samples.
    """
    x_axes = s.grid.x_axes() if x_axes is None else tuple(x_axes)
    psit = s.psi * np.exp(-1j * units.c * s.grid.norm * t)[..., None]
    out = fourier_inverse(SampledField(s.grid.axes, 3, psit), x_axes)
    psi = np.sqrt(units.hbar * units.c) * out.data
    back = fourier_forward(SampledField(x_axes, 3, psi), s.grid.axes).data
    div = np.einsum("...j,...j->...", 1j * s.grid.k, back)
    scale = np.linalg.norm(s.grid.norm[..., None] * back)
    res = float(np.linalg.norm(div) / scale) if scale > 0 else 0.0
    return PositionField(x_axes, psi, s.t + t, res)


def state_from_position(f: PositionField, grid: KGrid, units: Units = NATURAL, check=True) -> PhotonStateK:
    """``psi~(k) = (hbar c)^{-1/2} int d^3x psi(x) exp(-i k.x)``."""
    g = fourier_forward(SampledField(f.axes, 3, f.psi), grid.axes).data
    return PhotonStateK(grid, g / np.sqrt(units.hbar * units.c), f.t, check)


def momentum_amplitude(s: PhotonStateK, units: Units = NATURAL) -> np.ndarray:
    """``<k|psi> = sqrt(hbar c / (2 pi)^3) psi~(k)``."""
    return np.sqrt(units.hbar * units.c / _TWO_PI**3) * s.psi


# -------------------------------------------------- probabilities, averages


def helicity_prob(s: PhotonStateK, helicity: int, box=None, normalize=True) -> float:
    if helicity not in (1, -1):
        raise ValueError(f"helicity must be +1 or -1, got {helicity!r}")
    a = alpha_from_state(s)
    amp = a.alpha_plus if helicity == 1 else a.alpha_minus
    dens = np.abs(amp) ** 2 / s.grid.norm * s.grid.measure
    mask = np.ones(s.grid.shape, bool) if box is None else s.grid.box_mask(box)
    val = float(np.sum(dens[mask]))
    return val / bb_norm(s) if normalize else val


def momentum_prob(s: PhotonStateK, box=None, normalize=True) -> float:
    dens = np.sum(np.abs(s.psi) ** 2, axis=-1) / s.grid.norm * s.grid.measure
    mask = np.ones(s.grid.shape, bool) if box is None else s.grid.box_mask(box)
    val = float(np.sum(dens[mask]))
    return val / bb_norm(s) if normalize else val


def energy_loc_prob(f: PositionField, box) -> float:
    """Fraction of ``int psi^dagger psi d^3x`` carried by nodes inside ``box``."""
    box = np.asarray(box, dtype=float)
    if box.shape != (3, 2):
        raise ValueError(f"box must have shape (3, 2), got {box.shape}")
    x = np.stack(np.meshgrid(*[a.nodes() for a in f.axes], indexing="ij"), axis=-1)
    mask = np.all((x >= box[:, 0]) & (x <= box[:, 1]), axis=-1)
    dens = np.sum(np.abs(f.psi) ** 2, axis=-1)
    total = float(np.sum(dens))
    return float(np.sum(dens[mask])) / total if total > 0 else 0.0


def probabilities(s: PhotonStateK, box=None, position: PositionField | None = None, xbox=None) -> dict:
    out = {
        "helicity_plus": helicity_prob(s, 1, box),
        "helicity_minus": helicity_prob(s, -1, box),
        "momentum": momentum_prob(s, box),
    }
    if position is not None and xbox is not None:
        out["energy_localization"] = energy_loc_prob(position, xbox)
    return out


def averages(s: PhotonStateK, units: Units = NATURAL, tol: float = 1e-8) -> dict:
    """``<E>`` and ``<p>`` with the ``1/|k|`` weight; unnormalized input is rescaled."""
    n = bb_norm(s)
    if abs(n - 1.0) > tol:
        warnings.warn(f"state has BB norm {n:.6g}; rescaling to 1", RuntimeWarning, stacklevel=2)
    w = np.sum(np.abs(s.psi) ** 2, axis=-1) / s.grid.norm * s.grid.measure / n
    energy = float(np.sum(w * units.hbar * units.c * s.grid.norm))
    momentum = units.hbar * np.tensordot(w, s.grid.k, axes=([0, 1, 2], [0, 1, 2]))
    return {"energy": energy, "momentum": momentum}


def evolve(s: PhotonStateK, dt: float, units: Units = NATURAL) -> PhotonStateK:
    """Exact phase evolution ``psi~ -> psi~ exp(-i c |k| dt)``."""
    ph = np.exp(-1j * units.c * s.grid.norm * dt)
    return s.with_psi(s.psi * ph[..., None], t=s.t + dt)


# ------------------------------------------------------ primed components


def primed_representation(s: PhotonStateK) -> np.ndarray:
    """Components ``U psi~`` at every node."""
    return np.einsum("ab,...b->...a", algebra.U, s.psi)


def helicity_check(grid: KGrid, psi_primed, helicity: int) -> float:
    """``max |(S'.k^) psi' - helicity psi'|`` relative to ``max |psi'|``."""
    sp = algebra.spin1("primed").matrices
    khat = grid.k / grid.norm[..., None]
    op = np.einsum("...j,jab->...ab", khat, sp)
    r = np.einsum("...ab,...b->...a", op, psi_primed) - helicity * psi_primed
    scale = float(np.max(np.abs(psi_primed)))
    return float(np.max(np.abs(r))) / scale if scale > 0 else 0.0
