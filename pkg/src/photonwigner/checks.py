"""Invariant suites with named, gated residuals.

Each suite returns a :class:`SuiteReport`. A check passes when its value is
at most ``tol`` (``kind="max"``) or strictly above it (``kind="min"``, used
by negative controls). Checks with ``gated=False`` are recorded but do not
affect the verdict.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import algebra, grid as gq, operators, state, tilde, wigner
from .units import NATURAL, Units


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tol: float
    kind: str = "max"
    gated: bool = True

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return self.value <= self.tol if self.kind == "max" else self.value > self.tol


@dataclass
class SuiteReport:
    suite: str
    results: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def add(self, name, value, tol, kind="max", gated=True):
        self.results.append(CheckResult(name, float(value), float(tol), kind, gated))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results if r.gated)

    def failures(self) -> list:
        return [r.name for r in self.results if r.gated and not r.passed]

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "elapsed_s": self.elapsed,
            "checks": [dict(asdict(r), passed=r.passed) for r in self.results],
            "info": self.info,
        }

    def lines(self) -> list:
        out = []
        for r in self.results:
            tag = "PASS" if r.passed else ("FAIL" if r.gated else "note")
            rel = "<=" if r.kind == "max" else ">"
            out.append(f"{tag} {self.suite}.{r.name}: {r.value:.3e} ({rel} {r.tol:.1e})")
        return out


def _tol(overrides, name, default):
    return float((overrides or {}).get(name, default))


def _timed(fn):
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.elapsed = time.perf_counter() - t0
        return rep

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# ---------------------------------------------------------------- algebra


@_timed
def algebra_suite(tolerances=None) -> SuiteReport:
    rep = SuiteReport("algebra")
    tol = _tol(tolerances, "algebra", 1e-12)
    std, pr = algebra.spin1("standard"), algebra.spin1("primed")
    rep.add("commutator_standard", algebra.commutator_residual(std), tol)
    rep.add("commutator_primed", algebra.commutator_residual(pr), tol)
    gram = np.einsum("jab,kab->jk", algebra.PHI_LOWER, algebra.PHI_UPPER)
    rep.add("phi_orthonormal", np.max(np.abs(gram - np.eye(3))), tol)
    comp = np.einsum("jab,jcd->abcd", algebra.PHI_UPPER, algebra.PHI_LOWER)
    d = np.eye(2)
    rep.add("phi_completeness", np.max(np.abs(comp - 0.5 * (np.einsum("ac,bd->abcd", d, d) + np.einsum("ad,bc->abcd", d, d)))), tol)
    rep.add("u_unitary", np.max(np.abs(algebra.U_DAGGER @ algebra.U - np.eye(3))), tol)
    rep.add("u_similarity", np.max(np.abs(algebra.apply_u_similarity(pr).matrices - std.matrices)), tol)
    rep.add("levi_civita_form", np.max(np.abs(std.matrices + 1j * algebra.EPS3)), tol)
    rng = np.random.default_rng(0)
    w = rng.standard_normal((20, 4, 4)) + 1j * rng.standard_normal((20, 4, 4))
    w = w - np.swapaxes(w, -1, -2)
    rep.add("hodge_involution", np.max(np.abs(algebra.hodge_star(algebra.hodge_star(w)) - w)), tol)
    sig = algebra.build_sigma_forms()
    rep.add("selfdual", np.max(np.abs(algebra.hodge_star(sig.selfdual) - sig.selfdual)), tol)
    rep.add("antiselfdual", np.max(np.abs(algebra.hodge_star(sig.antiselfdual) + sig.antiselfdual)), tol)
    worst = 0.0
    for _ in range(20):
        E, B = rng.standard_normal(3), rng.standard_normal(3)
        a = algebra.f_from_F(algebra.rs_from_fields(E, B)).entries
        b = algebra.f_from_field_tensor(algebra.field_tensor(E, B), sig).entries
        worst = max(worst, float(np.max(np.abs(a - b))))
    rep.add("spinor_two_routes", worst, tol)
    return rep


@_timed
def group_suite(n: int = 100, seed: int = 0, tolerances=None) -> SuiteReport:
    rep = SuiteReport("group")
    tol = _tol(tolerances, "group", 1e-12)
    rng = np.random.default_rng(seed)
    orth = det = sign = 0.0
    for _ in range(n):
        l = algebra.random_sl2c(rng)
        t = algebra.so3c_from_sl2c(l).t
        tm = algebra.so3c_from_sl2c(-l).t
        scale = max(1.0, float(np.max(np.abs(t))) ** 2)
        orth = max(orth, float(np.max(np.abs(t.T @ t - np.eye(3)))) / scale)
        det = max(det, abs(np.linalg.det(t) - 1.0) / scale)
        sign = max(sign, float(np.max(np.abs(t - tm))))
    rep.add("orthogonal", orth, tol)
    rep.add("unit_determinant", det, tol)
    rep.add("z2_kernel", sign, tol)
    rep.info["samples"] = n
    return rep


def pole_adjacent_directions() -> np.ndarray:
    rows = []
    for zs in (1.0, -1.0):
        for eps in (0.0, 1e-300, 1e-15, 1e-9, 1e-4):
            rows += [(eps, 0.0, zs), (0.0, eps, zs), (-eps, eps, zs)]
    return np.array(rows)


@_timed
def triad_suite(n: int = 1000, seed: int = 0, tolerances=None) -> SuiteReport:
    rep = SuiteReport("triad")
    tol = _tol(tolerances, "triad", 1e-12)
    rng = np.random.default_rng(seed)
    k = rng.standard_normal((n, 3)) * rng.uniform(0.1, 10.0, size=(n, 1))
    k = np.concatenate([k, pole_adjacent_directions()])
    for name, v in state.triad_residuals(k).items():
        rep.add(name, v, tol)
    rep.info["samples"] = len(k)
    return rep


# ------------------------------------------------------------------- grid


def _basis(idx) -> np.ndarray:
    e = np.zeros((3, 3), dtype=complex)
    e[idx] = 1.0
    return e


@_timed
def grid_suite(seed: int = 0, tolerances=None) -> SuiteReport:
    rep = SuiteReport("grid")
    tol = _tol(tolerances, "grid", 1e-12)
    D = gq._D_PHI
    tr = np.einsum("klaa->kl", D)
    rep.add("trace_identity", np.max(np.abs(tr - 3.0 * _basis((0, 0)))), tol)
    gram = np.einsum("klab,pqab->klpq", D, D.conj())
    rep.add("trace_orthogonality", np.max(np.abs(gram - 3.0 * np.eye(9).reshape(3, 3, 3, 3))), tol)
    v = gq.verify_table(tol)
    rep.add("table_vs_oracle_mismatches", v["total"] - v["matched"], 0)
    rep.add("table_vs_oracle_residual", v["max_residual"], tol)
    rep.add("printed_table_disagreements", v["printed_disagreements"], 0, gated=False)
    rng = np.random.default_rng(seed)
    rnd = lambda: rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    worst = ident = 0.0
    for _ in range(20):
        a, b, c = rnd(), rnd(), rnd()
        x = gq.boxtimes_table(gq.boxtimes_table(a, b), c)
        y = gq.boxtimes_table(a, gq.boxtimes_table(b, c))
        worst = max(worst, float(np.max(np.abs(x - y)) / np.max(np.abs(x))))
        e = _basis((0, 0))
        ident = max(ident, float(np.max(np.abs(gq.boxtimes_table(e, a) - a))), float(np.max(np.abs(gq.boxtimes_table(a, e) - a))))
    rep.add("associativity", worst, tol)
    rep.add("identity_element", ident, tol)
    for name in gq.SHIPPED_KERNELS:
        rt = herm = star = 0.0
        for _ in range(10):
            f = rnd()
            rt = max(rt, float(np.max(np.abs(gq.grid_inverse(gq.grid_weyl_op(f, name), name) - f))))
            rt = max(rt, float(np.max(np.abs(gq.grid_untilde(gq.grid_tilde(f, name), name) - f))))
            g = rnd()
            lhs = gq.star_grid(f, g, name)
            rhs = gq.grid_inverse(gq.grid_weyl_op(f, name) @ gq.grid_weyl_op(g, name), name)
            star = max(star, float(np.max(np.abs(lhs - rhs))))
        om = gq.all_quantizers(name)
        herm = float(np.max(np.abs(om - np.conj(np.swapaxes(om, -1, -2)))))
        rep.add(f"weyl_round_trip_{name}", rt, tol)
        rep.add(f"star_product_{name}", star, tol)
        rep.add(f"quantizer_hermitian_{name}", herm, tol)
    return rep


# -------------------------------------------------------------- BB / density


def random_transverse_state(g: state.KGrid, rng, k0=(0.3, -0.2, 1.5), sigma=0.8) -> state.PhotonStateK:
    """Gaussian-envelope state with random complex helicity amplitudes."""
    base = state.gaussian_amplitudes(g, k0, sigma, (1.0, 0.0), normalize=False).alpha_plus
    z = lambda: rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    a = state.SpectralAmplitudes(g, base * z(), base * z())
    return state.normalized(state.build_state(a))


@_timed
def bb_suite(n: int = 8, dk: float = 0.5, seed: int = 0, tolerances=None) -> SuiteReport:
    rep = SuiteReport("bb")
    tol = _tol(tolerances, "bb", 1e-12)
    g = state.KGrid.centered(n, dk)
    rng = np.random.default_rng(seed)
    s1, s2 = random_transverse_state(g, rng), random_transverse_state(g, rng)
    a1, a2 = state.alpha_from_state(s1), state.alpha_from_state(s2)
    z = state.bb_inner(s1, s2)
    rep.add("k_form_vs_alpha_form", abs(z - state.bb_inner_alpha(a1, a2)) / max(abs(z), 1e-300), tol)
    rep.add("hermitian_symmetry", abs(state.bb_inner(s2, s1) - np.conj(z)) / max(abs(z), 1e-300), tol)
    return rep


def bb_position_check(n: int = 16, dk: float = 0.4, k0=(0.0, 0.0, 2.0), sigma: float = 0.4,
                      units: Units = NATURAL) -> dict:
    """x-space double integral against the k-space product for two packets."""
    g = state.KGrid.centered(n, dk)
    s1 = state.gaussian_state(g, k0, sigma, (1.0, 0.0))
    s2 = state.gaussian_state(g, np.asarray(k0) + 0.2, sigma, (0.6, 0.8j))
    f1 = state.synthesize_position(s1, units=units)
    f2 = state.synthesize_position(s2, units=units)
    zk = state.bb_inner(s1, s2)
    zx = state.bb_inner_position(f1, f2, units)
    nk = state.bb_inner(s1, s1)
    nx = state.bb_inner_position(f1, f1, units)
    return {
        "k_space": zk, "x_space": zx,
        "relative_error": abs(zx - zk) / abs(zk),
        "norm_relative_error": abs(nx - nk) / abs(nk),
    }


@_timed
def density_suite(n: int = 8, dk: float = 0.5, seed: int = 0, tolerances=None, units: Units = NATURAL) -> SuiteReport:
    rep = SuiteReport("density")
    tol = _tol(tolerances, "density", 1e-10)
    g = state.KGrid.centered(n, dk)
    cap = max(operators.DEFAULT_NODE_CAP, g.size)
    s = random_transverse_state(g, np.random.default_rng(seed), k0=(0.2, 0.1, 1.0), sigma=0.7)
    d = operators.density_from_pure(s, cap=cap)
    for name, v in operators.density_properties(d).items():
        rep.add(name, v, tol)
    H = operators.hamiltonian(g, units, cap)
    e = state.averages(s, units)["energy"]
    rep.add("energy_trace", abs(operators.observable_average(H, d) - e) / e, tol)
    rep.add("energy_trace_h", abs(operators.observable_average_h(H, d) - e) / e, tol)
    rep.add("hamiltonian_generalized_hermitian", operators.generalized_hermitian_residual(H), 1e-12)
    for j in range(3):
        rep.add(f"momentum_{j + 1}_generalized_hermitian",
                operators.generalized_hermitian_residual(operators.momentum_op(g, j, units, cap)), 1e-12)
        rep.add(f"position_{j + 1}_not_generalized_hermitian",
                operators.generalized_hermitian_residual(operators.position_op(g, j, cap)), 1e-3, kind="min")
    rep.add("liouville", operators.liouville_residual(d, 1e-3 / float(np.max(g.norm)), units), 1e-6)
    rep.info["nodes"] = g.size
    return rep


# ---------------------------------------------------------------- Wigner


def non_transverse_state(s: state.PhotonStateK, amplitude: float = 1.0) -> state.PhotonStateK:
    """Add a longitudinal part ``amplitude |psi~| k^`` (negative control)."""
    khat = s.grid.k / s.grid.norm[..., None]
    mag = np.linalg.norm(s.psi, axis=-1)
    return state.PhotonStateK(s.grid, s.psi + amplitude * mag[..., None] * khat, s.t, check=False)


def _rel(a, b) -> float:
    return float(np.max(np.abs(a - b)) / max(float(np.max(np.abs(b))), 1e-300))


@_timed
def wigner_suite(n: int = 12, dk: float = 0.5, k0=(0.0, 0.0, 2.0), sigma: float = 0.6, weights=(1.0, 0.5j),
                 n_p: int = 10, n_x: int = 100, x_counts=16, seed: int = 0, t: float = 0.0,
                 kernels=("weyl67", "cos69"), tolerances=None, units: Units = NATURAL) -> SuiteReport:
    rep = SuiteReport("wigner")
    g = state.KGrid.centered(n, dk)
    s = state.gaussian_state(g, k0, sigma, weights)
    rng = np.random.default_rng(seed)
    dens = wigner.momentum_density_expected(s, units)
    spec = wigner.SampleSpec.random(g, n_p, n_x, rng, x_scale=0.5 * wigner.x_period(g), p_weight=dens)
    tr = _tol(tolerances, "reality", 1e-10)
    tk = _tol(tolerances, "closed_forms", 1e-10)
    tn = _tol(tolerances, "normalization", 1e-3)
    for name in kernels:
        gen = wigner.wigner_general(s, spec, name, t=t, units=units)
        rep.add(f"reality_{name}", gen.imag_residual, tr)
        closed = wigner.wigner(s, spec, name, t, units, method="closed")
        rep.add(f"closed_vs_general_{name}", _rel(closed.values, gen.values), tk)
        if name == "cos69":
            delta, rho = wigner.wigner_k69(s, spec, t, units)
            rep.add("rho_is_re_delta", float(np.max(np.abs(rho.values - delta.values.real))), 0.0)
        m = wigner.marginals(s, name, t, x_counts, units)
        rep.add(f"normalization_{name}", abs(m.total - 1.0), tn)
        rep.add(f"n_weights_sum_{name}", abs(m.n_weights.sum() - 1.0), tn)
        rep.add(f"m_weights_sum_{name}", abs(m.m_weights.sum() - 1.0), tn)
        rep.add(f"momentum_marginal_{name}", _rel(m.momentum, dens), _tol(tolerances, "momentum_marginal", 1e-3))
        rep.add(f"position_marginal_negativity_{name}", max(0.0, -float(m.position.min())) / float(m.position.max()), 1e-6, gated=False)
        rep.info[f"marginals_{name}"] = m.report()
    rep.add("constraint", wigner.constraint_residual(s, spec, t, units), _tol(tolerances, "constraint", 1e-6))
    bad = non_transverse_state(s)
    rep.add("constraint_negative_control", wigner.constraint_residual(bad, spec, t, units), 1e-2, kind="min")
    rep.info.update(grid=[n, dk], k0=list(k0), sigma=sigma, sample_points=n_p * n_x)
    return rep


@_timed
def evolution_suite(n: int = 12, dk: float = 0.5, k0=(0.0, 0.0, 2.0), sigma: float = 0.6, weights=(1.0, 0.5j),
                    n_p: int = 10, n_x: int = 20, seed: int = 0, t: float = 0.3, dt=None,
                    tolerances=None, units: Units = NATURAL) -> SuiteReport:
    rep = SuiteReport("evolution")
    g = state.KGrid.centered(n, dk)
    s = state.gaussian_state(g, k0, sigma, weights)
    rng = np.random.default_rng(seed)
    dens = wigner.momentum_density_expected(s, units)
    spec = wigner.SampleSpec.random(g, n_p, n_x, rng, x_scale=0.5 * wigner.x_period(g), p_weight=dens)
    r = wigner.evolution_residual(s, spec, t, dt, units)
    rep.add("moyal_bracket", r["relative_residual"], _tol(tolerances, "evolution", 1e-4))
    rep.add("bracket_imaginary", r["bracket_imag"], 1e-10)
    rep.add("momentum_marginal_rate", r["momentum_marginal_rate"], _tol(tolerances, "stationarity", 1e-10))
    a = wigner.wigner_k67(s, spec, t, units).values
    b = wigner.wigner_k67(state.evolve(s, t, units), spec, 0.0, units).values
    rep.add("evolved_state_matches", _rel(a, b), 1e-12)
    rep.info.update(dt=r["dt"], bracket_scale=r["bracket_scale"])
    return rep


@_timed
def rw_suite(n: int = 8, dk: float = 0.5, seed: int = 0, tolerances=None, units: Units = NATURAL) -> SuiteReport:
    rep = SuiteReport("rw")
    tol = _tol(tolerances, "rw", 1e-12)
    g = state.KGrid.centered(n, dk)
    s = state.gaussian_state(g, (0.0, 0.0, 1.0), 0.6, (1.0, 0.3j))
    rng = np.random.default_rng(seed)
    spec = wigner.SampleSpec.random(g, 12, 12, rng)
    f67 = wigner.wigner_general(s, spec, "weyl67", units=units)
    rep.add("identity_weyl67", _rel(wigner.r_w_transform(f67, "weyl67").values, f67.values), 1e-14)
    f69 = wigner.wigner_general(s, spec, "cos69", units=units)
    fwd = wigner.r_w_transform(f69, "cos69")
    back = wigner.r_w_transform(fwd, "cos69", inverse=True)
    rep.add("round_trip_cos69", _rel(back.values, f69.values), tol)
    rep.add("round_trip_cos69_imag", float(np.max(np.abs(back.imag - f69.imag))), tol)
    rep.add("cos69_differs", _rel(fwd.values, f69.values), 1e-6, kind="min")
    const = wigner.PhaseSpaceField(f69.p, f69.x, 0.0, np.ones_like(f69.values), np.zeros_like(f69.values), "cos69")
    rep.add("constant_eigenvector", _rel(wigner.r_w_transform(const, "cos69").values, const.values), tol)
    return rep


@_timed
def tilde_suite(n: int = 6, dk: float = 0.6, seed: int = 0, t: float = 0.4, tolerances=None,
                units: Units = NATURAL) -> SuiteReport:
    rep = SuiteReport("tilde")
    g = state.KGrid.centered(n, dk)
    s = state.gaussian_state(g, (0.3, 0.2, 1.2), 0.6, (1.0, 0.4j))
    tf = tilde.tilde_rho(s, t, units)
    spec = wigner.SampleSpec.random(g, 15, 15, np.random.default_rng(seed))
    for name in gq.SHIPPED_KERNELS:
        a = tilde.rho_from_tilde(tf, spec, name)
        b = wigner.wigner_general(s, spec, name, t=t, units=units)
        rep.add(f"round_trip_{name}", _rel(a.values, b.values), _tol(tolerances, "tilde", 1e-6))
    origin = (units.hbar / (2.0 * np.pi)) ** 3 / 3.0
    rep.add("origin_value", abs(tf.at_origin() - origin) / origin, 1e-3)
    lam = (tilde.DualAxis.symmetric(0.25, 48),) + (tilde.DualAxis(1.0, 0, 1),) * 2
    f = tilde.gaussian_field(lam, lam, 1.0, units=units)
    h = tilde.gaussian_field(lam, lam, 0.7, units=units)
    r = tilde.boxtimes_continuous(f, h)
    l, m = lam[0].nodes()[:, None], lam[0].nodes()[None, :]
    A = 1.7
    b1, b2 = 1.4 * l + 0.5j * units.hbar * m, 1.4 * m - 0.5j * units.hbar * l
    ex = np.pi / A * np.exp((b1**2 + b2**2) / (4 * A) - 0.7 * (l**2 + m**2))
    inner = (np.abs(l) < 4) & (np.abs(m) < 4)
    got = r.values[:, 0, 0, :, 0, 0, 0, 0]
    rep.add("boxtimes_gaussian", float(np.max(np.abs(got - ex)[inner]) / np.max(np.abs(ex))), 1e-6)
    d = tilde.delta_field(h)
    rep.add("boxtimes_identity", _rel(tilde.boxtimes_continuous(d, h).values, h.values), 1e-10)
    return rep


SUITES = {
    "algebra": algebra_suite,
    "group": group_suite,
    "triad": triad_suite,
    "grid": grid_suite,
    "bb": bb_suite,
    "density": density_suite,
    "wigner": wigner_suite,
    "evolution": evolution_suite,
    "rw": rw_suite,
    "tilde": tilde_suite,
}


def run_suite(name: str, **kwargs) -> SuiteReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](**kwargs)
