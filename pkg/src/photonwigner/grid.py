"""Discrete Weyl calculus on the 3x3 grid of (phi_m, n) pairs.

Operators are 3x3 matrices in the phi-basis ``|phi_0>, |phi_1>, |phi_2>``
unless ``basis="n"`` is requested; the two bases are related by
``<n|phi_m> = exp(2 pi i m n / 3) / sqrt(3)``.

All phases are integer powers of ``exp(i pi / 3)``. They are looked up from
:data:`PHASE6` by their exponent mod 6 rather than accumulated by repeated
floating-point multiplication.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from ._validation import check_grid_index

_H = np.sqrt(3.0) / 2.0
#: exp(i pi q / 3) for q = 0..5, written out so that conjugate pairs are exact
PHASE6 = np.array(
    [1.0 + 0j, 0.5 + _H * 1j, -0.5 + _H * 1j, -1.0 + 0j, -0.5 - _H * 1j, 0.5 - _H * 1j]
)


def phase(q) -> complex:
    """``exp(i pi q / 3)`` for integer ``q``."""
    return PHASE6[np.mod(q, 6)]


def phi(m: int) -> float:
    return 2.0 * np.pi * m / 3.0


_IDX = np.arange(3)
_M, _N = np.meshgrid(_IDX, _IDX, indexing="ij")

#: change of basis, column m is |phi_m> written in the n-basis
PHI_TO_N = np.array([[phase(2 * m * n) for m in range(3)] for n in range(3)]) / np.sqrt(3.0)


# ------------------------------------------------------------------ kernels


@dataclass(frozen=True)
class KernelK:
    """Grid kernel values ``table[k, l] = K(pi k l / 3)``."""

    name: str
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=complex)
        if t.shape != (3, 3):
            raise ValueError(f"kernel table must be 3x3, got {t.shape}")
        if np.any(np.abs(t) < 1e-12):
            raise ValueError(f"kernel {self.name!r} has a vanishing entry; it cannot be inverted")
        object.__setattr__(self, "table", t)

    @property
    def unimodular(self) -> bool:
        return bool(np.allclose(np.abs(self.table), 1.0, rtol=0, atol=1e-14))


def _weyl67() -> KernelK:
    return KernelK("weyl67", np.array([[(-1.0) ** (k * l) for l in range(3)] for k in range(3)]))


def _cos69() -> KernelK:
    # cos(pi q / 3) is the real part of the exact phase table
    return KernelK("cos69", np.array([[PHASE6[(k * l) % 6].real for l in range(3)] for k in range(3)]))


SHIPPED_KERNELS = ("weyl67", "cos69")


def get_kernel(kernel) -> KernelK:
    """Resolve a kernel name or pass a :class:`KernelK` through unchanged."""
    if isinstance(kernel, KernelK):
        return kernel
    if kernel == "weyl67":
        return _weyl67()
    if kernel == "cos69":
        return _cos69()
    raise ValueError(f"unknown kernel {kernel!r}; allowed: {{weyl67, cos69}}")


# ------------------------------------------------------------- displacement


def displacement(k: int, l: int, basis: str = "phi") -> np.ndarray:
    """Unitary ``D(k, l)`` in the phi- or n-basis."""
    k = check_grid_index(k, "k")
    l = check_grid_index(l, "l")
    d = np.zeros((3, 3), dtype=complex)
    if basis == "phi":
        for m in range(3):
            d[(m + l) % 3, m] = phase(k * l + 2 * k * m)
    elif basis == "n":
        for n in range(3):
            d[n, (n + k) % 3] = phase(k * l + 2 * n * l)
    else:
        raise ValueError(f"basis must be 'phi' or 'n', got {basis!r}")
    return d


def _all_displacements(basis="phi") -> np.ndarray:
    return np.array([[displacement(k, l, basis) for l in range(3)] for k in range(3)])


_D_PHI = _all_displacements("phi")
_D_N = _all_displacements("n")


def displacement_product_phase(k1, l1, k2, l2):
    """``D(k1,l1) D(k2,l2) = c D(k1+k2, l1+l2)``; returns ``(k, l, q)`` with ``c = exp(i pi q/3)``."""
    k, l = (k1 + k2) % 3, (l1 + l2) % 3
    q = (k1 * l1 + k2 * l2 - k * l + 2 * k1 * l2) % 6
    return k, l, q


# --------------------------------------------------------------- quantizer


def _grid_phase(k, l, m, n, sign=-1):
    """``exp(sign * i (k phi_m + phi_l n))`` from exact angles."""
    return phase(sign * (2 * k * m + 2 * l * n))


def grid_quantizer(m: int, n: int, kernel="weyl67", basis: str = "phi") -> np.ndarray:
    """``Omega(m, n) = 1/3 sum_{kl} K e^{-i(k phi_m + phi_l n)} D(k, l)``."""
    m = check_grid_index(m, "m")
    n = check_grid_index(n, "n")
    K = get_kernel(kernel)
    D = _D_PHI if basis == "phi" else _D_N if basis == "n" else None
    if D is None:
        raise ValueError(f"basis must be 'phi' or 'n', got {basis!r}")
    out = np.zeros((3, 3), dtype=complex)
    for k, l in product(range(3), repeat=2):
        out += K.table[k, l] * _grid_phase(k, l, m, n) * D[k, l]
    return out / 3.0


def all_quantizers(kernel="weyl67", basis="phi") -> np.ndarray:
    """Array ``[m, n] -> Omega(m, n)`` of shape (3, 3, 3, 3)."""
    return np.array([[grid_quantizer(m, n, kernel, basis) for n in range(3)] for m in range(3)])


def grid_weyl_op(f, kernel="weyl67") -> np.ndarray:
    """``f_hat = 1/3 sum_{mn} f(m, n) Omega(m, n)``."""
    f = _as_table(f, "f")
    om = all_quantizers(kernel)
    return np.einsum("mn,mnab->ab", f, om) / 3.0


def grid_inverse(g, kernel="weyl67") -> np.ndarray:
    """Function on the grid whose quantization is ``g``.

    A unimodular kernel uses ``f(m,n) = Tr{g Omega(m,n)}``; otherwise the
    traces are reweighted by ``|K|^-2`` in the dual (k, l) variables.
    """
    g = np.asarray(g, dtype=complex)
    if g.shape != (3, 3):
        raise ValueError(f"operator must be 3x3, got {g.shape}")
    K = get_kernel(kernel)
    om = all_quantizers(K)
    tr = np.einsum("ab,mnba->mn", g, om)
    if K.unimodular:
        return tr
    return reweight_dual(tr, np.abs(K.table) ** -2)


def reweight_dual(f, weights) -> np.ndarray:
    """``1/9 sum_{k l m' n'} w(k,l) e^{i[k(phi_m - phi_m') + phi_l(n - n')]} f(m', n')``."""
    f = _as_table(f, "f")
    out = np.zeros((3, 3), dtype=complex)
    for k, l in product(range(3), repeat=2):
        fk = np.sum(f * _grid_phase(k, l, _M, _N, -1))
        out += weights[k, l] * fk * _grid_phase(k, l, _M, _N, +1)
    return out / 9.0


# ---------------------------------------------------------- dual transforms


def _as_table(f, name) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.shape != (3, 3):
        raise ValueError(f"{name} must be a 3x3 table, got {f.shape}")
    return f


def grid_tilde(f, kernel="weyl67") -> np.ndarray:
    """``f~(k, l) = K/9 sum_{mn} e^{-i(k phi_m + phi_l n)} f(m, n)``, so that ``f_hat = sum f~ D``."""
    f = _as_table(f, "f")
    K = get_kernel(kernel)
    out = np.zeros((3, 3), dtype=complex)
    for k, l in product(range(3), repeat=2):
        out[k, l] = K.table[k, l] * np.sum(f * _grid_phase(k, l, _M, _N, -1)) / 9.0
    return out


def grid_untilde(ft, kernel="weyl67") -> np.ndarray:
    """Inverse of :func:`grid_tilde`."""
    ft = _as_table(ft, "f~")
    K = get_kernel(kernel)
    out = np.zeros((3, 3), dtype=complex)
    for k, l in product(range(3), repeat=2):
        out += ft[k, l] / K.table[k, l] * _grid_phase(k, l, _M, _N, +1)
    return out


def operator_from_dual(ft) -> np.ndarray:
    return np.einsum("kl,klab->ab", _as_table(ft, "f~"), _D_PHI)


def dual_from_operator(op) -> np.ndarray:
    """``1/3 Tr{op D(k,l)^dagger}`` for every (k, l)."""
    op = np.asarray(op, dtype=complex)
    return np.einsum("ab,klab->kl", op, _D_PHI.conj()) / 3.0


# ------------------------------------------------------------ boxtimes

# Multiplication table of the dual grid product, entered term by term as it is
# printed in the source. Each entry is (sign, q, f index, g index) and stands
# for sign * exp(i pi q / 3) * f~(f index) * g~(g index).
PRINTED_TABLE = {
    (0, 0): [
        (+1, 0, (0, 0), (0, 0)), (+1, 0, (0, 2), (0, 1)), (+1, 0, (0, 1), (0, 2)),
        (+1, 0, (2, 0), (1, 0)), (-1, 0, (2, 2), (1, 1)), (+1, 0, (2, 1), (1, 2)),
        (+1, 0, (1, 0), (2, 0)), (+1, 0, (1, 2), (2, 1)), (-1, 0, (1, 1), (2, 2)),
    ],
    (0, 1): [
        (+1, 0, (0, 1), (0, 0)), (+1, 0, (0, 0), (0, 1)), (+1, 0, (0, 2), (0, 2)),
        (+1, 2, (2, 1), (1, 0)), (-1, 2, (2, 0), (1, 1)), (+1, 2, (2, 2), (1, 2)),
        (+1, 1, (1, 1), (2, 0)), (-1, 1, (1, 0), (2, 1)), (-1, 1, (1, 2), (2, 2)),
    ],
    (0, 2): [
        (+1, 0, (0, 2), (0, 0)), (+1, 0, (0, 1), (0, 1)), (+1, 0, (0, 0), (0, 2)),
        (+1, -2, (2, 2), (1, 0)), (-1, -2, (2, 1), (1, 1)), (+1, -2, (2, 0), (1, 2)),
        (+1, 2, (1, 2), (2, 0)), (-1, 2, (1, 1), (2, 1)), (+1, 2, (1, 0), (2, 2)),
    ],
    (1, 0): [
        (+1, 0, (1, 0), (0, 0)), (+1, -2, (1, 2), (0, 1)), (+1, -1, (1, 1), (0, 2)),
        (+1, 0, (0, 1), (1, 0)), (-1, -2, (0, 2), (1, 1)), (-1, -1, (0, 1), (1, 2)),
        (+1, 0, (2, 0), (2, 0)), (+1, -2, (2, 2), (2, 1)), (-1, -1, (2, 1), (2, 2)),
    ],
    (1, 1): [
        (+1, 0, (1, 1), (0, 0)), (+1, 1, (1, 0), (0, 1)), (+1, -1, (1, 2), (0, 2)),
        (+1, -1, (0, 1), (1, 0)), (+1, 0, (0, 0), (1, 1)), (-1, -2, (0, 2), (1, 2)),
        (+1, 1, (2, 1), (2, 0)), (-1, 2, (2, 0), (2, 1)), (-1, 0, (2, 1), (2, 2)),
    ],
    (1, 2): [
        (+1, 0, (1, 2), (0, 0)), (+1, 1, (1, 1), (0, 1)), (+1, 2, (1, 0), (0, 2)),
        (+1, -2, (0, 2), (1, 0)), (+1, -1, (0, 1), (1, 1)), (+1, 0, (0, 0), (1, 2)),
        (+1, 2, (2, 2), (2, 0)), (+1, 0, (2, 1), (2, 1)), (+1, -2, (2, 0), (2, 2)),
    ],
    (2, 0): [
        (+1, 0, (2, 0), (0, 0)), (+1, 2, (2, 2), (0, 1)), (+1, -2, (2, 1), (0, 2)),
        (+1, 0, (1, 0), (1, 0)), (-1, -2, (1, 2), (1, 1)), (-1, -2, (1, 1), (1, 2)),
        (+1, 0, (0, 0), (2, 0)), (+1, 2, (0, 2), (2, 1)), (+1, -2, (0, 1), (2, 2)),
    ],
    (2, 1): [
        (+1, 0, (2, 1), (0, 0)), (+1, 2, (2, 0), (0, 1)), (+1, -2, (2, 1), (0, 2)),
        (+1, -1, (1, 1), (1, 0)), (-1, 2, (1, 0), (1, 1)), (+1, 0, (1, 2), (1, 2)),
        (+1, -2, (0, 1), (2, 0)), (+1, 0, (0, 0), (2, 1)), (+1, 2, (0, 2), (2, 2)),
    ],
    (2, 2): [
        (+1, 0, (2, 2), (0, 0)), (+1, 2, (2, 1), (0, 1)), (+1, -2, (2, 0), (0, 2)),
        (+1, -2, (1, 2), (1, 0)), (+1, 0, (1, 1), (1, 1)), (+1, 2, (1, 0), (1, 2)),
        (+1, 2, (0, 2), (2, 0)), (+1, -2, (0, 1), (2, 1)), (+1, 0, (0, 0), (2, 2)),
    ],
}

#: Printed terms that disagree with the operator product, keyed by
#: (output index, position in the printed list), with the corrected term.
TABLE_CORRECTIONS = {
    ((1, 0), 3): (+1, 0, (0, 0), (1, 0)),
    ((1, 1), 8): (-1, 0, (2, 2), (2, 2)),
    ((2, 0), 4): (-1, 2, (1, 2), (1, 1)),
    ((2, 1), 2): (+1, -2, (2, 2), (0, 2)),
    ((2, 1), 4): (+1, 1, (1, 0), (1, 1)),
}


def corrected_table() -> dict:
    table = {key: list(terms) for key, terms in PRINTED_TABLE.items()}
    for (key, pos), term in TABLE_CORRECTIONS.items():
        table[key][pos] = term
    return table


def _compile(table):
    # (out_k, out_l, f_k, f_l, g_k, g_l, q) rows with the phase folded into q mod 6
    rows = []
    for (k, l), terms in table.items():
        for sign, q, (fk, fl), (gk, gl) in terms:
            rows.append((k, l, fk, fl, gk, gl, (q + (3 if sign < 0 else 0)) % 6))
    return np.array(rows, dtype=int)


_TABLE_ROWS = _compile(corrected_table())


def boxtimes_table(ft, gt, table=None) -> np.ndarray:
    """Dual grid product from the explicit 81-term multiplication table.

    ``table`` defaults to the corrected table; pass :data:`PRINTED_TABLE` to
    evaluate the terms exactly as printed.
    """
    ft = _as_table(ft, "f~")
    gt = _as_table(gt, "g~")
    rows = _TABLE_ROWS if table is None else _compile(table)
    out = np.zeros((3, 3), dtype=complex)
    vals = PHASE6[rows[:, 6]] * ft[rows[:, 2], rows[:, 3]] * gt[rows[:, 4], rows[:, 5]]
    np.add.at(out, (rows[:, 0], rows[:, 1]), vals)
    return out


def boxtimes_oracle(ft, gt) -> np.ndarray:
    """``1/3 Tr{f_hat g_hat D(k,l)^dagger}`` with ``f_hat = sum f~ D``."""
    return dual_from_operator(operator_from_dual(ft) @ operator_from_dual(gt))


def table_disagreements(table=None) -> list:
    """Terms of ``table`` whose target or phase differs from the operator product.

    Also reports (f, g) pairs that a line should contain but does not.
    """
    table = PRINTED_TABLE if table is None else table
    issues = []
    for out, terms in table.items():
        seen = set()
        for pos, (sign, q, f, g) in enumerate(terms):
            k, l, qq = displacement_product_phase(*f, *g)
            seen.add((f, g))
            if (k, l) != out or (q + (3 if sign < 0 else 0) - qq) % 6 != 0:
                issues.append({"output": out, "position": pos, "term": (sign, q, f, g),
                               "expected_output": (k, l), "expected_q": qq})
        for f in product(range(3), repeat=2):
            g = ((out[0] - f[0]) % 3, (out[1] - f[1]) % 3)
            if (f, g) not in seen:
                issues.append({"output": out, "missing": (f, g),
                               "expected_q": displacement_product_phase(*f, *g)[2]})
    return issues


def verify_table(tol: float = 1e-12) -> dict:
    """Check the corrected table against the oracle on all 81 basis products."""
    matched = 0
    worst = 0.0
    for a, b in product(product(range(3), repeat=2), repeat=2):
        ft = np.zeros((3, 3), dtype=complex)
        gt = np.zeros((3, 3), dtype=complex)
        ft[a] = 1.0
        gt[b] = 1.0
        err = float(np.max(np.abs(boxtimes_table(ft, gt) - boxtimes_oracle(ft, gt))))
        worst = max(worst, err)
        matched += err <= tol
    return {"matched": matched, "total": 81, "max_residual": worst,
            "printed_disagreements": len(table_disagreements())}


def star_grid(f, g, kernel="weyl67") -> np.ndarray:
    """Grid star product, computed as untilde(tilde f [x] tilde g)."""
    K = get_kernel(kernel)
    return grid_untilde(boxtimes_table(grid_tilde(f, K), grid_tilde(g, K)), K)
