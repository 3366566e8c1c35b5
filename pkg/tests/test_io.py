from __future__ import annotations

import copy
import json
from pathlib import Path

import numpy as np
import pytest

from gfonls.engine import EngineConfig, Grid, SolutionField, evaluate_grid
from gfonls.errors import ConfigError
from gfonls.io import (
    CSV_HEADER,
    config_from_dict,
    heatmap_bytes,
    load_config,
    parse_config,
    read_field_csv,
    read_pgm,
    serialize_config,
    write_field_csv,
    write_heatmap_pgm,
    write_metadata_json,
)
from gfonls.spectral import ModelParams
from gfonls.spectrum import SimpleSpectrum

FIGURES = Path(__file__).resolve().parents[1] / "figures"


@pytest.fixture
def raw():
    return json.loads((FIGURES / "fig2a.json").read_text())


def test_fig2a_config():
    cfg = load_config(FIGURES / "fig2a.json")
    assert cfg.spectrum.pole_order == "simple"
    assert len(cfg.spectrum) == 1
    assert cfg.spectrum.zs[0] == 1.5j
    assert cfg.params.alphas == (1.0, 0.01, 0.01, 0.01)
    assert len(cfg.digest) == 64


def test_all_shipped_configs_parse():
    names = sorted(p.stem for p in FIGURES.glob("fig*.json"))
    assert "fig2a" in names and "fig10" in names
    for name in names:
        load_config(FIGURES / f"{name}.json")


def test_unknown_key_rejected(raw):
    raw["model"]["alpha6"] = 1.0
    with pytest.raises(ConfigError) as ei:
        config_from_dict(raw)
    assert any(m.startswith("$.model") for m in ei.value.messages)


def test_schema_error_path(raw):
    raw["spectrum"]["entries"][0]["z"] = [0.0]
    with pytest.raises(ConfigError) as ei:
        config_from_dict(raw)
    assert ei.value.messages[0].startswith("$.spectrum.entries[0].z")


def test_eigenvalue_inside_circle(raw):
    raw["spectrum"]["entries"][0]["z"] = [0.0, 0.5]
    with pytest.raises(ConfigError) as ei:
        config_from_dict(raw)
    assert any("|z1| ≤ ψ0" in m for m in ei.value.messages)


def test_double_requires_B(raw):
    raw["spectrum"]["pole_order"] = "double"
    with pytest.raises(ConfigError) as ei:
        config_from_dict(raw)
    assert any("B is required" in m for m in ei.value.messages)


def test_json_parse_error_position():
    with pytest.raises(ConfigError) as ei:
        parse_config('{\n  "model": ,\n}')
    assert "line 2" in ei.value.messages[0]


def test_round_trip(raw):
    cfg = config_from_dict(raw)
    again = config_from_dict(serialize_config(cfg))
    assert again == cfg
    assert again.digest == cfg.digest
    changed = copy.deepcopy(raw)
    changed["grid"]["x"][2] = 11
    assert config_from_dict(changed).digest != cfg.digest


def _small_field():
    p = ModelParams(1, 0.01, 0.01, 0.01, 1.0)
    cfg = EngineConfig(p, SimpleSpectrum(((1.5j, 1.0),)))
    return evaluate_grid(cfg, Grid(-3, 3, 7, -0.5, 0.5, 3))


def test_csv_round_trip(tmp_path):
    f = _small_field()
    path = tmp_path / "sub" / "f.csv"
    write_field_csv(f, path)
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 7 * 3
    # t outer, x inner
    assert lines[1].split(",")[:2] == ["-3", "-0.5"]
    assert lines[2].split(",")[:2] == ["-2", "-0.5"]
    g = read_field_csv(path)
    assert g.values.tobytes() == f.values.tobytes()
    assert g.x.tobytes() == f.x.tobytes() and g.t.tobytes() == f.t.tobytes()


def test_csv_single_node_and_background(tmp_path):
    p = ModelParams(1, 0, 0, 0, 0.6 * np.exp(0.2j))
    f = evaluate_grid(EngineConfig(p, SimpleSpectrum(())), Grid(0, 0, 1, 0, 0, 1))
    write_field_csv(f, tmp_path / "a.csv")
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert len(lines) == 2
    assert float(lines[1].split(",")[4]) == pytest.approx(0.6, rel=1e-15)
    assert lines[1].endswith(",0")


def test_pgm_format(tmp_path):
    f = _small_field()
    write_heatmap_pgm(f, tmp_path / "f.pgm", digest="abc")
    raw = (tmp_path / "f.pgm").read_bytes()
    assert raw.startswith(b"P5\n# min=")
    pix, comment = read_pgm(tmp_path / "f.pgm")
    assert pix.shape == (3, 7)
    assert "digest=abc" in comment and "degenerate" not in comment
    a = np.abs(f.values)
    want = np.floor(255 * (a - a.min()) / (a.max() - a.min()) + 0.5)
    assert np.array_equal(pix, want.astype(np.uint8))
    assert pix.min() == 0 and pix.max() == 255


def test_pgm_degenerate():
    f = SolutionField(np.arange(3.0), np.arange(2.0), np.ones((2, 3), complex), np.zeros((2, 3), np.uint8))
    data = heatmap_bytes(f, "d")
    assert b"degenerate" in data.split(b"\n")[1]
    assert set(data.split(b"\n", 4)[4]) == {128}
    with pytest.raises(ValueError):
        heatmap_bytes(SolutionField(np.zeros(1), np.zeros(1), np.ones((1, 1)), np.zeros((1, 1))))


def test_metadata_fields(tmp_path):
    cfg = load_config(FIGURES / "fig2a.json")
    f = evaluate_grid(cfg.engine_config(), Grid(-2, 2, 5, 0, 1, 2))
    write_metadata_json(f, tmp_path / "m.json", cfg)
    doc = json.loads((tmp_path / "m.json").read_text())
    md = doc["metadata"]
    for key in ("config_digest", "sign", "gauge", "dispersion", "version", "max_condition"):
        assert key in md
    assert md["config_digest"] == cfg.digest
