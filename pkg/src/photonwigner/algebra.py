"""Spinor and helicity algebra of the free Maxwell field.

Signature is (+,+,+,-) with coordinates (x1, x2, x3, x4 = ct). Every constant
below is assembled from a handful of small integer matrices so that identity
checks are exact up to rounding of 1/sqrt(2).

Index conventions (one table, used everywhere):

* spinor indices are raised as ``chi^A = eps^{BA} chi_B`` and lowered as
  ``chi_A = eps_{AB} chi^B`` with ``eps = [[0, 1], [-1, 0]]``;
* Latin indices j, k are moved with the Kronecker delta;
* a 2-form is stored by its coefficients ``w[mu, nu]`` in
  ``w = 1/2 w_{mu nu} dx^mu ^ dx^nu`` and indices are raised with ``eta``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ._validation import check_square

SQRT2 = np.sqrt(2.0)

EPS2 = np.array([[0, 1], [-1, 0]], dtype=complex)
ETA = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)

_PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)
# g_mu^{A Bdot}; the fourth matrix is -identity
G_LOWER = np.concatenate([_PAULI, -np.eye(2, dtype=complex)[None]], axis=0)
# g^{mu A Bdot}, raised with eta
G_UPPER = np.einsum("mn,nab->mab", ETA, G_LOWER)


def levi_civita(n: int) -> np.ndarray:
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        eps[perm] = -1.0 if inv % 2 else 1.0
    return eps


EPS3 = levi_civita(3)
EPS4 = levi_civita(4)


def raise_spinor2(t_lower: np.ndarray) -> np.ndarray:
    """``t^{AB} = eps^{CA} eps^{DB} t_{CD}`` on the last two axes."""
    return np.einsum("ca,db,...cd->...ab", EPS2, EPS2, t_lower)


def lower_spinor2(t_upper: np.ndarray) -> np.ndarray:
    """``t_{AB} = eps_{AC} eps_{BD} t^{CD}`` on the last two axes."""
    return np.einsum("ac,bd,...cd->...ab", EPS2, EPS2, t_upper)


# Phi^j_{Adot Bdot}
PHI_LOWER = np.array(
    [
        [[-1j, 0], [0, 1j]],
        [[-1, 0], [0, -1]],
        [[0, 1j], [1j, 0]],
    ],
    dtype=complex,
) / SQRT2
PHI_UPPER = raise_spinor2(PHI_LOWER)


def _u_matrix() -> np.ndarray:
    rows = [PHI_LOWER[:, 0, 0], SQRT2 * PHI_LOWER[:, 0, 1], PHI_LOWER[:, 1, 1]]
    return 1j * np.array(rows)


U = _u_matrix()
U_DAGGER = U.conj().T


# ---------------------------------------------------------------- 2-forms


@dataclass(frozen=True)
class TwoForm4D:
    coeff: np.ndarray

    def __post_init__(self):
        c = check_square(self.coeff, 4, "two-form coefficients")
        if not np.allclose(c, -c.T, rtol=0, atol=1e-14):
            raise ValueError("two-form coefficients must be antisymmetric")
        object.__setattr__(self, "coeff", c)


def _coeff(w):
    return w.coeff if isinstance(w, TwoForm4D) else np.asarray(w, dtype=complex)


def wedge(a, b) -> np.ndarray:
    """Coefficients of the 2-form ``a ^ b`` for 1-forms given by their components."""
    a = np.asarray(a)
    b = np.asarray(b)
    return np.einsum("...m,...n->...mn", a, b) - np.einsum("...n,...m->...mn", a, b)


def hodge_star(w) -> np.ndarray:
    """``(*w)_{rs} = -(i/2) eps_{rs mu nu} w^{mu nu}`` with ``eps_1234 = 1``.

    Accepts a single 4x4 array (or TwoForm4D) or a stack ``(..., 4, 4)``.
    """
    c = _coeff(w)
    if c.shape[-2:] != (4, 4):
        raise ValueError(f"expected (..., 4, 4) coefficients, got {c.shape}")
    if not np.allclose(c, -np.swapaxes(c, -1, -2), rtol=0, atol=1e-14):
        raise ValueError("hodge_star requires an antisymmetric 2-form")
    up = np.einsum("ma,nb,...ab->...mn", ETA, ETA, c)
    return -0.5j * np.einsum("rsmn,...mn->...rs", EPS4, up)


@dataclass(frozen=True)
class SigmaForms:
    """``selfdual[A, B, mu, nu] = S^{AB}_{mu nu}``, ``antiselfdual`` likewise (dotted)."""

    selfdual: np.ndarray
    antiselfdual: np.ndarray

    def lowered(self):
        """Both sets with spacetime indices raised and spinor indices lowered."""
        def low(s):
            t = np.einsum("ma,nb,ABab->ABmn", ETA, ETA, s)
            return np.einsum("ac,bd,cdmn->abmn", EPS2, EPS2, t)

        return low(self.selfdual), low(self.antiselfdual)


def build_sigma_forms() -> SigmaForms:
    # S^{AB} = 1/2 eps_{Cdot Ddot} g^{A Cdot} ^ g^{B Ddot}
    sd = np.zeros((2, 2, 4, 4), dtype=complex)
    asd = np.zeros((2, 2, 4, 4), dtype=complex)
    for a, b, c, d in itertools.product(range(2), repeat=4):
        e = EPS2[c, d]
        if e == 0:
            continue
        sd[a, b] += 0.5 * e * wedge(G_LOWER[:, a, c], G_LOWER[:, b, d])
        asd[a, b] += 0.5 * e * wedge(G_LOWER[:, c, a], G_LOWER[:, d, b])
    return SigmaForms(sd, asd)


# ------------------------------------------------------ spinors and F vectors


@dataclass(frozen=True)
class SymSpinor2:
    entries: np.ndarray
    chirality: str = "dotted"

    def __post_init__(self):
        e = check_square(self.entries, 2, "spinor")
        if e[0, 1] != e[1, 0]:
            raise ValueError("symmetric spinor requires entries[0][1] == entries[1][0]")
        if self.chirality not in ("dotted", "undotted"):
            raise ValueError(f"chirality must be 'dotted' or 'undotted', got {self.chirality!r}")
        object.__setattr__(self, "entries", e)


def f_from_F(F) -> SymSpinor2:
    """Dotted spinor ``f_{AdotBdot} = i Phi^j_{AdotBdot} F_j``."""
    F = np.asarray(F, dtype=complex)
    if F.shape != (3,):
        raise ValueError(f"F must have 3 components, got shape {F.shape}")
    f = 1j * np.einsum("jab,j->ab", PHI_LOWER, F)
    f[1, 0] = f[0, 1]  # identical by construction; keep exact symmetry
    return SymSpinor2(f, "dotted")


def F_from_f(f) -> np.ndarray:
    """``F_j = -i Phi_j^{AdotBdot} f_{AdotBdot}``."""
    if isinstance(f, SymSpinor2):
        if f.chirality != "dotted":
            raise ValueError("F_from_f expects a dotted spinor")
        f = f.entries
    f = check_square(f, 2, "spinor")
    if not np.isclose(f[0, 1], f[1, 0], rtol=0, atol=1e-14):
        raise ValueError("spinor must be symmetric")
    return -1j * np.einsum("jab,ab->j", PHI_UPPER, f)


def rs_from_fields(E, B) -> np.ndarray:
    """Riemann-Silberstein vector ``(E + iB)/sqrt(2)``; broadcasts over leading axes."""
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    if E.shape != B.shape or E.shape[-1] != 3:
        raise ValueError("E and B must have equal shapes ending in 3")
    return (E + 1j * B) / SQRT2


def field_tensor(E, B) -> np.ndarray:
    """Covariant field-strength matrix ``F_{mu nu}`` built from E and B."""
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    Fm = np.zeros((4, 4))
    Fm[:3, :3] = np.einsum("ijk,k->ij", EPS3, B)
    Fm[:3, 3] = E
    Fm[3, :3] = -E
    return Fm


def f_from_field_tensor(Fmunu, sigma: SigmaForms | None = None) -> SymSpinor2:
    """Projection ``f_{AdotBdot} = 1/4 F_{mu nu} S^{mu nu}_{AdotBdot}``."""
    sigma = sigma or build_sigma_forms()
    _, asd_low = sigma.lowered()
    f = 0.25 * np.einsum("mn,abmn->ab", np.asarray(Fmunu, dtype=complex), asd_low)
    return SymSpinor2(0.5 * (f + f.T), "dotted")


# ------------------------------------------------------------ spin-1 sets


@dataclass(frozen=True)
class Spin1Set:
    matrices: np.ndarray
    rep: str

    def dot(self, v) -> np.ndarray:
        return np.einsum("j,jab->ab", np.asarray(v), self.matrices)


def spin1(rep: str = "standard") -> Spin1Set:
    """Spin-1 matrices: ``standard`` has ``(S_j)_{kl} = -i eps_{jkl}``.

    The ``primed`` set acts on ``(f_11, sqrt2 f_12, f_22)``; its third member
    is ``diag(1, 0, -1)``.
    """
    if rep == "standard":
        return Spin1Set(-1j * EPS3.astype(complex), rep)
    if rep == "primed":
        s1 = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / SQRT2
        s2 = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / SQRT2
        s3 = np.diag([1, 0, -1]).astype(complex)
        return Spin1Set(np.array([s1, s2, s3]), rep)
    raise ValueError(f"rep must be 'standard' or 'primed', got {rep!r}")


def apply_u_similarity(s: Spin1Set) -> Spin1Set:
    """Map the primed set to the standard one, ``S_j = U^dagger S'_j U``."""
    if s.rep != "primed":
        raise ValueError("apply_u_similarity expects the primed representation")
    return Spin1Set(np.einsum("ab,jbc,cd->jad", U_DAGGER, s.matrices, U), "standard")


def commutator_residual(s: Spin1Set) -> float:
    """Max entrywise residual of ``[S_j, S_k] - i eps_{jkl} S_l``."""
    m = s.matrices
    lhs = np.einsum("jab,kbc->jkac", m, m) - np.einsum("kab,jbc->jkac", m, m)
    rhs = 1j * np.einsum("jkl,lac->jkac", EPS3, m)
    return float(np.max(np.abs(lhs - rhs)))


# -------------------------------------------------------------- group map


@dataclass(frozen=True)
class GroupElements:
    l: np.ndarray
    t: np.ndarray


def so3c_from_sl2c(l, tol: float = 1e-10) -> GroupElements:
    """Complex rotation ``t^j_k = Phi^j_{AB} l^A_C l^B_D Phi_k^{CD}`` for ``l`` in SL(2,C)."""
    l = check_square(l, 2, "l")
    det = np.linalg.det(l)
    if abs(det - 1.0) > tol:
        raise ValueError(f"l must have unit determinant, got det = {det}")
    t = np.einsum("jab,ac,bd,kcd->jk", PHI_LOWER, l, l, PHI_UPPER)
    return GroupElements(l, t)


def random_sl2c(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    m = scale * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    while abs(np.linalg.det(m)) < 1e-3:
        m = scale * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    return m / np.sqrt(np.linalg.det(m))


# ---------------------------------------------------------- field integrals


@dataclass(frozen=True)
class FieldFunctionals:
    energy: float
    momentum: np.ndarray
    angular_momentum: np.ndarray
    energy_moment: np.ndarray
    imag_residual: float
    boundary_ok: bool
    boundary_ratio: float


def field_functionals(F, c: float = 1.0, boundary_tol: float = 1e-6) -> FieldFunctionals:
    """Energy, momentum, angular momentum and energy moment of a sampled F field.

    ``F`` is a 3-component :class:`~photonwigner.numerics.SampledField` on a
    3-D position grid. The boundary of the box should carry negligible field;
    the ratio of boundary to peak magnitude is reported and flagged.
    """
    from .numerics import integrate, SampledField

    data = F.data
    if data.shape[-1] != 3 or len(F.axes) != 3:
        raise ValueError("F must be a 3-component field on a 3-D grid")
    mag = np.sqrt(np.sum(np.abs(data) ** 2, axis=-1))
    peak = float(mag.max())
    bmask = np.zeros(mag.shape, dtype=bool)
    for ax in range(3):
        sl = [slice(None)] * 3
        sl[ax] = 0
        bmask[tuple(sl)] = True
        sl[ax] = -1
        bmask[tuple(sl)] = True
    ratio = float(mag[bmask].max() / peak) if peak > 0 else 0.0

    x = np.stack(F.mesh(), axis=-1)
    dens = np.sum(np.conj(data) * data, axis=-1)
    cross = np.cross(np.conj(data), data) / (1j * c)

    def quad(arr, comps):
        return np.atleast_1d(integrate(SampledField(F.axes, comps, arr)))

    E = quad(dens, 1)
    P = quad(cross, 3)
    M = quad(np.cross(x, cross), 3)
    N = quad(x * dens[..., None], 3)
    scale = max(abs(E[0]), 1e-300)
    imag = float(max(np.max(np.abs(v.imag)) for v in (E, P, M, N)) / scale) if peak > 0 else 0.0
    return FieldFunctionals(
        float(E[0].real), P.real, M.real, N.real, imag, ratio < boundary_tol, ratio
    )


def constants_as_json() -> dict:
    """The algebra constants as nested ``[re, im]`` lists, for documentation dumps."""
    def enc(a):
        a = np.asarray(a, dtype=complex)
        return np.stack([a.real, a.imag], axis=-1).tolist()

    return {
        "g_lower": enc(G_LOWER),
        "phi_lower": enc(PHI_LOWER),
        "phi_upper": enc(PHI_UPPER),
        "U": enc(U),
        "spin1_standard": enc(spin1("standard").matrices),
        "spin1_primed": enc(spin1("primed").matrices),
    }
