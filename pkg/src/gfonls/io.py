"""Run configuration and file formats (CSV, PGM, metadata JSON)."""
from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .engine import EngineConfig, EngineOptions, Grid, SolutionField
from .errors import ConfigError
from .spectral import DISPERSION_MODES, ModelParams
from .spectrum import DoubleSpectrum, SimpleSpectrum, Spectrum, validate
from .verification import K4_FORMS

CSV_HEADER = "x,t,re,im,abs,flag"
OUTPUT_KINDS = ("csv", "pgm", "json-meta", "png")

_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_AXIS = {
    "type": "array",
    "prefixItems": [{"type": "number"}, {"type": "number"}, {"type": "integer", "minimum": 1}],
    "minItems": 3,
    "maxItems": 3,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["model", "spectrum", "grid", "modes", "outputs"],
    "properties": {
        "description": {"type": "string"},
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["alpha2", "alpha3", "alpha4", "alpha5", "psi_minus"],
            "properties": {
                "alpha2": {"type": "number"},
                "alpha3": {"type": "number"},
                "alpha4": {"type": "number"},
                "alpha5": {"type": "number"},
                "psi_minus": _PAIR,
                "zbc_limit": {"type": "boolean"},
            },
        },
        "spectrum": {
            "type": "object",
            "additionalProperties": False,
            "required": ["pole_order", "entries"],
            "properties": {
                "pole_order": {"enum": ["simple", "double"]},
                "entries": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["z", "A"],
                        "properties": {"z": _PAIR, "A": _PAIR, "B": _PAIR},
                    },
                },
            },
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["x", "t"],
            "properties": {"x": _AXIS, "t": _AXIS},
        },
        "modes": {
            "type": "object",
            "additionalProperties": False,
            "required": ["sign", "dispersion", "gauge"],
            "properties": {
                "sign": {"enum": ["standard", "flipped"]},
                "dispersion": {"enum": list(DISPERSION_MODES)},
                "gauge": {"enum": ["gauge_fixed", "verbatim"]},
                "phase_point": {"enum": ["xi_hat", "xi"]},
                "double_rhs": {"enum": ["derived", "printed"]},
                "k4_form": {"enum": list(K4_FORMS)},
            },
        },
        "outputs": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["kind", "path"],
                "properties": {
                    "kind": {"enum": list(OUTPUT_KINDS)},
                    "path": {"type": "string", "minLength": 1},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class OutputSpec:
    kind: str
    path: str


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    spectrum: Spectrum
    grid: Grid
    options: EngineOptions
    k4_form: str = "complete"
    outputs: tuple = ()
    description: str | None = None
    digest: str = field(default="", compare=False)

    def engine_config(self) -> EngineConfig:
        return EngineConfig(self.params, self.spectrum, self.options, self.digest)


def _json_path(path) -> str:
    s = "$"
    for part in path:
        s += f"[{part}]" if isinstance(part, int) else f".{part}"
    return s


def _c(pair) -> complex:
    return complex(float(pair[0]), float(pair[1]))


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_from_dict(data: dict) -> RunConfig:
    errors = []
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    for err in sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path))):
        errors.append(f"{_json_path(err.absolute_path)}: {err.message}")
    if errors:
        raise ConfigError(errors)

    m = data["model"]
    try:
        params = ModelParams(
            m["alpha2"], m["alpha3"], m["alpha4"], m["alpha5"], _c(m["psi_minus"]),
            zbc_limit=bool(m.get("zbc_limit", False)),
        )
    except ValueError as exc:
        raise ConfigError([f"$.model: {exc}"]) from exc

    sp = data["spectrum"]
    order = sp["pole_order"]
    entries = []
    for i, e in enumerate(sp["entries"]):
        if order == "double" and "B" not in e:
            errors.append(f"$.spectrum.entries[{i}]: B is required when pole_order is double")
        if order == "simple" and "B" in e:
            errors.append(f"$.spectrum.entries[{i}]: B is only allowed when pole_order is double")
        if order == "double":
            entries.append((_c(e["z"]), _c(e["A"]), _c(e.get("B", [0.0, 0.0]))))
        else:
            entries.append((_c(e["z"]), _c(e["A"])))
    spectrum = DoubleSpectrum(tuple(entries)) if order == "double" else SimpleSpectrum(tuple(entries))
    errors += [f"$.spectrum: {v}" for v in validate(spectrum, params)]

    g = data["grid"]
    grid = Grid(float(g["x"][0]), float(g["x"][1]), int(g["x"][2]),
                float(g["t"][0]), float(g["t"][1]), int(g["t"][2]))
    for ax in ("x", "t"):
        a = g[ax]
        if a[2] > 1 and not a[1] > a[0]:
            errors.append(f"$.grid.{ax}: the end must exceed the start when n > 1")
    if errors:
        raise ConfigError(errors)

    md = data["modes"]
    options = EngineOptions(
        sign=md["sign"], dispersion=md["dispersion"], gauge=md["gauge"],
        phase_point=md.get("phase_point", "xi_hat"), double_rhs=md.get("double_rhs", "derived"),
    )
    outputs = tuple(OutputSpec(o["kind"], o["path"]) for o in data["outputs"])
    cfg = RunConfig(params, spectrum, grid, options, md.get("k4_form", "complete"),
                    outputs, data.get("description"))
    digest = hashlib.sha256(canonical_json(serialize_config(cfg)).encode()).hexdigest()
    object.__setattr__(cfg, "digest", digest)
    return cfg


def parse_config(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from exc
    if not isinstance(data, dict):
        raise ConfigError(["$: top level must be an object"])
    return config_from_dict(data)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def serialize_config(cfg: RunConfig) -> dict:
    p = cfg.params
    pair = lambda c: [float(c.real), float(c.imag)]  # noqa: E731
    entries = []
    for e in cfg.spectrum.entries:
        d = {"z": pair(e[0]), "A": pair(e[1])}
        if cfg.spectrum.pole_order == "double":
            d["B"] = pair(e[2])
        entries.append(d)
    out = {
        "model": {
            "alpha2": p.alpha2, "alpha3": p.alpha3, "alpha4": p.alpha4, "alpha5": p.alpha5,
            "psi_minus": pair(p.psi_minus),
        },
        "spectrum": {"pole_order": cfg.spectrum.pole_order, "entries": entries},
        "grid": {
            "x": [cfg.grid.x0, cfg.grid.x1, cfg.grid.nx],
            "t": [cfg.grid.t0, cfg.grid.t1, cfg.grid.nt],
        },
        "modes": {
            "sign": cfg.options.sign,
            "dispersion": cfg.options.dispersion,
            "gauge": cfg.options.gauge,
            "phase_point": cfg.options.phase_point,
            "double_rhs": cfg.options.double_rhs,
            "k4_form": cfg.k4_form,
        },
        "outputs": [{"kind": o.kind, "path": o.path} for o in cfg.outputs],
    }
    if p.zbc_limit:
        out["model"]["zbc_limit"] = True
    if cfg.description is not None:
        out["description"] = cfg.description
    return out


def with_grid(cfg: RunConfig, grid: Grid) -> RunConfig:
    new = copy.copy(cfg)
    object.__setattr__(new, "grid", grid)
    return new


# --- writers ----------------------------------------------------------------

def _fmt(v: float) -> str:
    return "%.17g" % v


def field_csv_text(f: SolutionField) -> str:
    lines = [CSV_HEADER]
    xs = [_fmt(v) for v in f.x]
    for i, tv in enumerate(f.t):
        ts = _fmt(tv)
        row = f.values[i]
        fl = f.flags[i]
        ab = np.abs(row)
        for j in range(len(xs)):
            lines.append(
                f"{xs[j]},{ts},{_fmt(row[j].real)},{_fmt(row[j].imag)},{_fmt(ab[j])},{1 if fl[j] else 0}"
            )
    return "\n".join(lines) + "\n"


def write_field_csv(f: SolutionField, path) -> None:
    _write_bytes(path, field_csv_text(f).encode("utf-8"))


def read_field_csv(path) -> SolutionField:
    p = Path(path)
    with p.open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"{p}: unexpected header {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    xs = np.unique(data[:, 0])
    nx = len(xs)
    nt = data.shape[0] // nx
    x = data[:nx, 0].copy()
    t = data[::nx, 1].copy()
    values = (data[:, 2] + 1j * data[:, 3]).reshape(nt, nx)
    flags = data[:, 5].reshape(nt, nx).astype(np.uint8)
    return SolutionField(x, t, values, flags, {})


def heatmap_bytes(f: SolutionField, digest: str | None = None) -> bytes:
    nt, nx = f.values.shape
    if nx < 2 or nt < 2:
        raise ValueError("PGM heatmap needs nx, nt >= 2")
    a = np.abs(f.values)
    finite = np.isfinite(a)
    lo = float(a[finite].min()) if finite.any() else 0.0
    hi = float(a[finite].max()) if finite.any() else 0.0
    digest = digest or f.metadata.get("config_digest", "")
    degenerate = not hi > lo
    if degenerate:
        pix = np.full((nt, nx), 128, dtype=np.uint8)
    else:
        scaled = np.where(finite, 255.0 * (a - lo) / (hi - lo), 0.0)
        pix = np.clip(np.floor(scaled + 0.5), 0, 255).astype(np.uint8)
    comment = f"# min={_fmt(lo)} max={_fmt(hi)} digest={digest}"
    if degenerate:
        comment += " degenerate"
    head = f"P5\n{comment}\n{nx} {nt}\n255\n".encode("ascii")
    return head + pix.tobytes()


def write_heatmap_pgm(f: SolutionField, path, digest: str | None = None) -> None:
    _write_bytes(path, heatmap_bytes(f, digest))


def read_pgm(path):
    """Return (pixels[nt, nx], comment)."""
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    comment = parts[1].decode("ascii")
    nx, nt = map(int, parts[2].split())
    pix = np.frombuffer(parts[4], dtype=np.uint8).reshape(nt, nx)
    return pix, comment


def metadata_document(f: SolutionField, cfg: RunConfig | None = None) -> dict:
    doc = {"metadata": _jsonable(f.metadata), "grid": list(f.grid)}
    if cfg is not None:
        doc["config"] = serialize_config(cfg)
        doc["metadata"]["config_digest"] = cfg.digest
        doc["metadata"]["k4_form"] = cfg.k4_form
    return doc


def write_metadata_json(f: SolutionField, path, cfg: RunConfig | None = None) -> None:
    text = json.dumps(metadata_document(f, cfg), sort_keys=True, indent=2) + "\n"
    _write_bytes(path, text.encode("utf-8"))


def write_json(obj, path) -> None:
    _write_bytes(path, (json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n").encode("utf-8"))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _write_bytes(path, data: bytes) -> None:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    p.write_bytes(data)
