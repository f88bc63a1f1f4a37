"""scikit-learn style facades over the library.

Only the transform part of the estimator API fits this problem: nothing is
learned from data, so ``fit`` validates the hyperparameters and records the
input width.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .grid import get_kernel
from .state import KGrid, gaussian_state, helicity_triad
from .units import Units
from .wigner import SampleSpec, wigner

PACKET_COLUMNS = ("k0_1", "k0_2", "k0_3", "sigma", "plus_re", "plus_im", "minus_re", "minus_im")


class TriadTransformer(TransformerMixin, BaseEstimator):
    """Map wave vectors ``(n, 3)`` to ``[m, n, Re e, Im e]`` (12 columns)."""

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if X.shape[1] != 3:
            raise ValueError(f"expected 3 columns (k1, k2, k3), got {X.shape[1]}")
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 3:
            raise ValueError(f"expected 3 columns (k1, k2, k3), got {X.shape[1]}")
        t = helicity_triad(X)
        return np.hstack([t.m, t.n, t.e.real, t.e.imag])

    def get_feature_names_out(self, input_features=None):
        return np.array([f"{v}{j}" for v in ("m", "n", "e_re", "e_im") for j in (1, 2, 3)], dtype=object)


class WignerTransformer(TransformerMixin, BaseEstimator):
    """Gaussian packet parameters to a flattened Wigner slice at fixed ``x``.

    Each input row is ``(k0_1, k0_2, k0_3, sigma, plus_re, plus_im, minus_re,
    minus_im)``. The output row holds ``rho_W(hbar k, x, phi_m, n; t)`` for
    every grid node and every ``(m, n)``, node-major with ``(m, n)`` fastest.
    """

    def __init__(self, n=8, dk=0.5, kernel="weyl67", x=(0.0, 0.0, 0.0), t=0.0, method="closed",
                 hbar=1.0, c=1.0):
        self.n = n
        self.dk = dk
        self.kernel = kernel
        self.x = x
        self.t = t
        self.method = method
        self.hbar = hbar
        self.c = c

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if X.shape[1] != len(PACKET_COLUMNS):
            raise ValueError(f"expected {len(PACKET_COLUMNS)} columns {PACKET_COLUMNS}, got {X.shape[1]}")
        get_kernel(self.kernel)
        self.units_ = Units(self.hbar, self.c)
        self.grid_ = KGrid.centered(self.n, self.dk)
        self.spec_ = SampleSpec.x_slice(self.grid_, self.x)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        rows = []
        for r in X:
            s = gaussian_state(self.grid_, r[:3], r[3], (complex(r[4], r[5]), complex(r[6], r[7])))
            f = wigner(s, self.spec_, self.kernel, self.t, self.units_, self.method)
            rows.append(f.values.reshape(-1))
        return np.array(rows)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "grid_")
        idx = [np.unravel_index(i, self.grid_.shape) for i in range(self.grid_.size)]
        return np.array([f"rho[{a},{b},{c}|{m}{n}]" for a, b, c in idx for m in range(3) for n in range(3)],
                        dtype=object)
