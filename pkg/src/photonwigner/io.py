"""Run configuration, CSV/JSON writers and state files.

Floats are written with 17 significant digits in CSV and with ``repr`` in
JSON, so every double survives a write/read round trip bit for bit.
"""
from __future__ import annotations

import copy
import csv
import json
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .grid import SHIPPED_KERNELS, KernelK, get_kernel
from .numerics import AxisSpec
from .state import KGrid, PhotonStateK
from .units import Units

FLOAT_FORMAT = "%.17g"

#: values filled in for keys a config leaves out
DEFAULTS = {
    "grid": {"n": 12, "dk": 0.5, "offset": [0.0, 0.0, 0.0]},
    "packet": {"k0": [0.0, 0.0, 2.0], "sigma": 0.6, "weights": [1.0, 0.0]},
    "kernel": "weyl67",
    "method": "closed",
    "units": {"hbar": 1.0, "c": 1.0},
    "t": 0.0,
    "slice": {"x": [0.0, 0.0, 0.0]},
    "x_counts": 16,
    "samples": {"n_p": 8, "n_x": 8, "seed": 0},
    "dt": None,
    "tolerances": {},
}


class ConfigError(ValueError):
    pass


def load_schema() -> dict:
    text = resources.files("photonwigner").joinpath("schemas/config.schema.json").read_text()
    return json.loads(text)


# ---------------------------------------------------------- source map


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i] in " \t\r\n":
        i += 1
    return i


def _value_offsets(text: str) -> dict:
    """Character offset of every value in a valid JSON document, keyed by its path."""
    dec = json.JSONDecoder()
    out = {}

    def walk(i, path):
        i = _skip_ws(text, i)
        out[path] = i
        ch = text[i]
        if ch in "{[":
            close = "}" if ch == "{" else "]"
            i = _skip_ws(text, i + 1)
            idx = 0
            while text[i] != close:
                if ch == "{":
                    key, i = json.decoder.scanstring(text, i + 1)
                    i = _skip_ws(text, i) + 1  # the colon
                    i = walk(i, path + (key,))
                else:
                    i = walk(i, path + (idx,))
                    idx += 1
                i = _skip_ws(text, i)
                if text[i] == ",":
                    i = _skip_ws(text, i + 1)
            return i + 1
        return dec.raw_decode(text, i)[1]

    walk(0, ())
    return out


def _line_of(text: str, offsets: dict, path) -> int:
    path = tuple(path)
    while path not in offsets and path:
        path = path[:-1]
    return text.count("\n", 0, offsets.get(path, 0)) + 1


# -------------------------------------------------------------- config


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "tolerances":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _error_message(err: jsonschema.ValidationError) -> str:
    path = list(err.absolute_path)
    if path and path[0] == "kernel" and isinstance(err.instance, str):
        allowed = ", ".join(SHIPPED_KERNELS)
        return f"unknown kernel {err.instance!r}; allowed: {{{allowed}}} or a custom table object"
    where = "/".join(str(p) for p in path) or "<root>"
    msg = err.message
    if err.context:
        # anyOf: report the branch that matches the instance's type
        same = [e for e in err.context if e.validator != "type"]
        msg = jsonschema.exceptions.best_match(same or err.context).message
    return f"{where}: {msg}"


def parse_config(text: str, source: str = "<config>") -> dict:
    """Validate JSON text against the committed schema and fill in defaults."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        offsets = _value_offsets(text)
        lines = [f"{source}:{_line_of(text, offsets, e.absolute_path)}: {_error_message(e)}" for e in errors]
        raise ConfigError("\n".join(lines))
    return _merge(DEFAULTS, raw)


def read_config(path) -> dict:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), str(path))


def default_config() -> dict:
    return copy.deepcopy(DEFAULTS)


def _complex(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)


def kernel_from_config(cfg: dict) -> KernelK:
    k = cfg["kernel"]
    if isinstance(k, dict):
        return KernelK(k["name"], np.array([[_complex(v) for v in row] for row in k["table"]]))
    return get_kernel(k)


def units_from_config(cfg: dict) -> Units:
    return Units(float(cfg["units"]["hbar"]), float(cfg["units"]["c"]))


def grid_from_config(cfg: dict) -> KGrid:
    g = cfg["grid"]
    return KGrid.centered(g["n"], g["dk"], g["offset"])


def weights_from_config(cfg: dict) -> tuple:
    return tuple(_complex(v) for v in cfg["packet"]["weights"])


# ----------------------------------------------------------------- CSV


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return FLOAT_FORMAT % float(v)


def write_csv_stream(fh, header, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


def write_csv(path, header, rows) -> Path:
    """Write rows with ``%.17g`` floats and ``\\n`` line endings."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        write_csv_stream(fh, header, rows)
    return path


def read_csv(path) -> tuple:
    """Return ``(header, data)`` with ``data`` a float array of shape ``(rows, columns)``.

    Empty cells read as NaN.
    """
    with Path(path).open(newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(v) if v != "" else np.nan for v in row] for row in r]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return header, data


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


# --------------------------------------------------------------- fields

FIELD_HEADER = ["p1", "p2", "p3", "x1", "x2", "x3", "m", "n", "t", "rho_w", "imag_residual"]


def field_rows(f):
    """Rows ``(p, x, m, n, t, rho_w, imag)`` in p-major, then x, m, n order."""
    P, X = f.values.shape[:2]
    for i in range(P):
        for j in range(X):
            for m in range(3):
                for n in range(3):
                    yield (*f.p[i], *f.x[j], m, n, f.t, f.values[i, j, m, n], f.imag[i, j, m, n])


def write_field_csv(path, f) -> Path:
    return write_csv(path, FIELD_HEADER, field_rows(f))


STATE_HEADER = ["i", "j", "l", "k1", "k2", "k3", "re1", "im1", "re2", "im2", "re3", "im3"]


def write_state(stem, s: PhotonStateK) -> tuple:
    """``stem.csv`` holds the samples, ``stem.json`` the grid and time stamp."""
    stem = Path(stem)
    rows = []
    for idx in np.ndindex(*s.grid.shape):
        v = s.psi[idx]
        rows.append((*idx, *s.grid.k[idx], v[0].real, v[0].imag, v[1].real, v[1].imag, v[2].real, v[2].imag))
    csv_path = write_csv(stem.with_suffix(".csv"), STATE_HEADER, rows)
    meta = {
        "t": s.t,
        "axes": [{"min": a.min, "max": a.max, "count": a.count} for a in s.grid.axes],
    }
    return csv_path, write_json(stem.with_suffix(".json"), meta)


def read_state(stem, check: bool = True) -> PhotonStateK:
    stem = Path(stem)
    meta = read_json(stem.with_suffix(".json"))
    grid = KGrid(tuple(AxisSpec(a["min"], a["max"], a["count"], True) for a in meta["axes"]))
    header, data = read_csv(stem.with_suffix(".csv"))
    if header != STATE_HEADER or len(data) != grid.size:
        raise ValueError(f"{stem}.csv does not match the grid in {stem}.json")
    psi = np.zeros(grid.shape + (3,), dtype=complex)
    idx = data[:, :3].astype(int)
    psi[tuple(idx.T)] = data[:, 6::2] + 1j * data[:, 7::2]
    return PhotonStateK(grid, psi, float(meta["t"]), check=check)
