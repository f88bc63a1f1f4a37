"""Command-line front end.

Every command writes its artifacts into ``--out`` (default: current
directory) together with a JSON report, and exits with status 1 when a gated
check fails (2 for bad input).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import checks, grid as gq, io, state, wigner
from .units import Units

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

TRIAD_HEADER = (
    ["k1", "k2", "k3"]
    + [f"{v}{j}" for v in ("m", "n") for j in (1, 2, 3)]
    + [f"e{j}_{p}" for j in (1, 2, 3) for p in ("re", "im")]
    + ["eigen", "norm", "isotropic", "transverse", "orthonormal", "handedness", "reflection", "error"]
)


# ------------------------------------------------------------------ helpers


def _vec3(text: str) -> list:
    parts = [p for p in text.replace(" ", "").split(",") if p != ""]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number in {text!r}") from None


def _slice_arg(text: str) -> list:
    if not text.startswith("x="):
        raise argparse.ArgumentTypeError(f"slice must look like x=0 or x=a,b,c, got {text!r}")
    body = text[2:]
    if "," not in body:
        return [float(body)] * 3
    return _vec3(body)


def _load_config(args) -> dict:
    cfg = io.read_config(args.config) if getattr(args, "config", None) else io.default_config()
    if getattr(args, "hbar", None) is not None:
        cfg["units"]["hbar"] = args.hbar
    if getattr(args, "c", None) is not None:
        cfg["units"]["c"] = args.c
    if getattr(args, "kernel", None):
        cfg["kernel"] = args.kernel
    if getattr(args, "slice", None) is not None:
        cfg["slice"]["x"] = args.slice
    if getattr(args, "t", None) is not None:
        cfg["t"] = args.t
    return cfg


def _state(cfg) -> state.PhotonStateK:
    g = io.grid_from_config(cfg)
    p = cfg["packet"]
    return state.gaussian_state(g, p["k0"], p["sigma"], io.weights_from_config(cfg))


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _finish(report: dict, path: Path, checks_list) -> int:
    """Attach the gated verdict, write the report, print failures."""
    failed = [c["name"] for c in checks_list if c.get("gated", True) and not c["passed"]]
    report["checks"] = checks_list
    report["passed"] = not failed
    io.write_json(path, report)
    for name in failed:
        print(f"FAILED: {name}", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_FAILED


def _check(name, value, tol, kind="max", gated=True) -> dict:
    r = checks.CheckResult(name, float(value), float(tol), kind, gated)
    return {"name": name, "value": r.value, "tol": r.tol, "kind": kind, "gated": gated, "passed": r.passed}


# ----------------------------------------------------------------- commands


def _triad_rows(ks):
    for k in ks:
        k = np.asarray(k, dtype=float)
        if not np.all(np.isfinite(k)) or np.linalg.norm(k) == 0.0:
            yield [*k] + [""] * (len(TRIAD_HEADER) - 4) + ["k must be finite and nonzero"]
            continue
        t = state.helicity_triad(k)
        r = state.triad_residuals(k)
        e = [v for z in t.e for v in (z.real, z.imag)]
        yield [*k, *t.m, *t.n, *e] + [r[c] for c in TRIAD_HEADER[-8:-1]] + [""]


def cmd_triad(args) -> int:
    ks = [list(k) for k in (args.k or [])]
    if args.file:
        header, data = io.read_csv(args.file)
        cols = [header.index(c) for c in ("k1", "k2", "k3")] if "k1" in header else [0, 1, 2]
        ks += [list(row[cols]) for row in data]
    rows = list(_triad_rows(ks))
    if args.out_file:
        io.write_csv(args.out_file, TRIAD_HEADER, rows)
    else:
        io.write_csv_stream(sys.stdout, TRIAD_HEADER, rows)
    bad = [r for r in rows if r[-1]]
    return EXIT_FAILED if bad else EXIT_OK


def cmd_packet(args) -> int:
    cfg = _load_config(args)
    units = io.units_from_config(cfg)
    s = _state(cfg)
    out = _out(args)
    io.write_state(out / "packet", s)
    av = state.averages(s, units)
    report = {
        "command": "packet",
        "config": cfg,
        "bb_norm": state.bb_norm(s),
        "energy": av["energy"],
        "momentum": av["momentum"],
        "helicity_plus": state.helicity_prob(s, +1),
        "helicity_minus": state.helicity_prob(s, -1),
    }
    lst = [
        _check("transverse", state.transverse_residual(s.grid, s.psi), state.TRANSVERSE_TOL),
        _check("bb_norm", abs(report["bb_norm"] - 1.0), 1e-12),
    ]
    return _finish(report, out / "packet_report.json", lst)


def cmd_wigner(args) -> int:
    cfg = _load_config(args)
    units = io.units_from_config(cfg)
    kernel = io.kernel_from_config(cfg)
    s = _state(cfg)
    out = _out(args)
    spec = wigner.SampleSpec.x_slice(s.grid, cfg["slice"]["x"])
    f = wigner.wigner(s, spec, kernel, cfg["t"], units, cfg["method"])
    io.write_field_csv(out / "wigner.csv", f)
    m = wigner.marginals(s, kernel, cfg["t"], cfg["x_counts"], units)
    tol = cfg["tolerances"]
    report = {"command": "wigner", "config": cfg, "kernel": kernel.name, "marginals": m.report()}
    lst = [
        _check("normalization", abs(m.total - 1.0), tol.get("normalization", 1e-3)),
        _check("reality", max(f.imag_residual, m.imag_residual), tol.get("reality", 1e-10)),
    ]
    return _finish(report, out / "wigner_report.json", lst)


def cmd_marginals(args) -> int:
    cfg = _load_config(args)
    units = io.units_from_config(cfg)
    kernel = io.kernel_from_config(cfg)
    s = _state(cfg)
    out = _out(args)
    m = wigner.marginals(s, kernel, cfg["t"], cfg["x_counts"], units)
    expected = wigner.momentum_density_expected(s, units)
    p = units.hbar * s.grid.k
    rows = [(*p[i], m.momentum[i], expected[i]) for i in np.ndindex(*s.grid.shape)]
    io.write_csv(out / "momentum_marginal.csv", ["p1", "p2", "p3", "density", "expected"], rows)
    xs = wigner.x_grid(s.grid, m.x_axes_counts)
    rows = [(xs[0][i], xs[1][j], xs[2][l], m.position[i, j, l]) for i, j, l in np.ndindex(*m.position.shape)]
    io.write_csv(out / "position_marginal.csv", ["x1", "x2", "x3", "density"], rows)
    io.write_csv(out / "grid_weights.csv", ["index", "n_weight", "m_weight"],
                 [(i, m.n_weights[i], m.m_weights[i]) for i in range(3)])
    tol = cfg["tolerances"]
    rel = float(np.max(np.abs(m.momentum - expected)) / np.max(expected))
    lst = [
        _check("normalization", abs(m.total - 1.0), tol.get("normalization", 1e-3)),
        _check("n_weights_sum", abs(m.n_weights.sum() - 1.0), tol.get("normalization", 1e-3)),
        _check("m_weights_sum", abs(m.m_weights.sum() - 1.0), tol.get("normalization", 1e-3)),
        _check("momentum_marginal", rel, tol.get("momentum_marginal", 1e-3)),
        _check("position_marginal_negativity", max(0.0, -float(m.position.min())) / float(m.position.max()),
               1e-6, gated=False),
    ]
    report = {"command": "marginals", "config": cfg, "marginals": m.report()}
    return _finish(report, out / "marginals_report.json", lst)


def cmd_evolve(args) -> int:
    cfg = _load_config(args)
    units = io.units_from_config(cfg)
    s = _state(cfg)
    out = _out(args)
    t = cfg["t"]
    io.write_state(out / "evolved", state.evolve(s, t, units))
    smp = cfg["samples"]
    rng = np.random.default_rng(smp["seed"])
    spec = wigner.SampleSpec.random(s.grid, min(smp["n_p"], s.grid.size), smp["n_x"], rng,
                                    p_weight=wigner.momentum_density_expected(s, units))
    r = wigner.evolution_residual(s, spec, t, cfg["dt"], units)
    tol = cfg["tolerances"]
    lst = [
        _check("moyal_bracket", r["relative_residual"], tol.get("evolution", 1e-4)),
        _check("momentum_marginal_rate", r["momentum_marginal_rate"], tol.get("stationarity", 1e-10)),
    ]
    return _finish({"command": "evolve", "config": cfg, "residuals": r}, out / "evolve_report.json", lst)


def cmd_check(args) -> int:
    out = _out(args)
    names = sorted(checks.SUITES) if args.suite == "all" else [args.suite]
    cfg = io.read_config(args.config) if args.config else io.default_config()
    units = Units(args.hbar if args.hbar is not None else cfg["units"]["hbar"],
                  args.c if args.c is not None else cfg["units"]["c"])
    reports, ok = [], True
    for name in names:
        kwargs = {"tolerances": cfg["tolerances"]}
        if name in ("density", "wigner", "evolution", "rw", "tilde"):
            kwargs["units"] = units
        rep = checks.run_suite(name, **kwargs)
        for line in rep.lines():
            print(line)
        for f in rep.failures():
            print(f"FAILED: {name}.{f}", file=sys.stderr)
        ok &= rep.passed
        reports.append(rep.to_dict())
    io.write_json(out / "check_report.json", {"command": "check", "passed": ok, "suites": reports})
    return EXIT_OK if ok else EXIT_FAILED


def cmd_grid(args) -> int:
    out = _out(args)
    if args.action == "verify":
        v = gq.verify_table()
        print(f"{v['matched']}/{v['total']} boxtimes basis products match the operator oracle "
              f"(max residual {v['max_residual']:.3e}); printed table disagreements: {v['printed_disagreements']}")
        lst = [_check("table_vs_oracle", v["total"] - v["matched"], 0),
               _check("table_residual", v["max_residual"], 1e-12)]
        report = {"command": "grid verify", "result": v, "disagreements": gq.table_disagreements()}
        return _finish(report, out / "grid_report.json", lst)
    rows = []
    for (k, l), terms in sorted(gq.corrected_table().items()):
        for pos, (sign, q, f, g) in enumerate(terms):
            corrected = ((k, l), pos) in gq.TABLE_CORRECTIONS
            rows.append((k, l, pos, sign, q, f[0], f[1], g[0], g[1], int(corrected)))
    io.write_csv(out / "boxtimes_table.csv",
                 ["k", "l", "position", "sign", "q", "f_k", "f_l", "g_k", "g_l", "corrected"], rows)
    return EXIT_OK


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="photonwigner", description="Photon Wigner functions and invariant checks")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--hbar", type=float, default=None)
        p.add_argument("--c", type=float, default=None)
        if config:
            p.add_argument("--config", default=None, help="JSON run configuration")

    p = sub.add_parser("triad", help="helicity triad and residuals for wave vectors")
    p.add_argument("--k", type=_vec3, action="append", help="wave vector k1,k2,k3 (repeatable)")
    p.add_argument("--file", default=None, help="CSV with k1,k2,k3 columns")
    p.add_argument("--out-file", default=None, help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_triad)

    p = sub.add_parser("packet", help="build a Gaussian packet and write its samples")
    common(p)
    p.set_defaults(func=cmd_packet)

    for name, fn, hlp in (("wigner", cmd_wigner, "Wigner slice at fixed x"),
                          ("marginals", cmd_marginals, "marginals of the Wigner function")):
        p = sub.add_parser(name, help=hlp)
        common(p)
        p.add_argument("--kernel", default=None, help="weyl67 or cos69")
        p.add_argument("--t", type=float, default=None)
        if name == "wigner":
            p.add_argument("--slice", type=_slice_arg, default=None, help="x=0 or x=a,b,c")
        p.set_defaults(func=fn)

    p = sub.add_parser("evolve", help="evolve a packet and check the Moyal bracket")
    common(p)
    p.add_argument("--t", type=float, default=None)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("check", help="run invariant suites")
    common(p)
    p.add_argument("--suite", default="all", choices=["all", *sorted(checks.SUITES)])
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("grid", help="grid boxtimes table")
    common(p, config=False)
    p.add_argument("action", choices=["verify", "table"])
    p.set_defaults(func=cmd_grid)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (io.ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
