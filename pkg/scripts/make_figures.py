"""Regenerate the shipped figure configurations in ``figures/``."""
from __future__ import annotations

import cmath
import json
import math
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1] / "figures"
A_STD = dict(alpha2=1.0, alpha3=0.01, alpha4=0.01, alpha5=0.01)
A_FIG6 = dict(alpha2=1.0, alpha3=0.01, alpha4=0.001, alpha5=0.001)
ZBC = 1e-4
GRID = {"x": [-10.0, 10.0, 401], "t": [-5.0, 5.0, 201]}
MODES = {"sign": "standard", "dispersion": "hierarchy", "gauge": "gauge_fixed"}


def pair(c):
    c = complex(c)
    return [round(c.real, 15) + 0.0, round(c.imag, 15) + 0.0]


def config(name, alphas, psi_minus, zs, order="simple", B=None, description=""):
    entries = []
    for z in zs:
        e = {"z": pair(z), "A": [1.0, 0.0]}
        if order == "double":
            e["B"] = [1.0, 0.0] if B is None else pair(B)
        entries.append(e)
    model = dict(alphas, psi_minus=[psi_minus, 0.0])
    if psi_minus <= ZBC:
        model["zbc_limit"] = True
    outs = [
        {"kind": "csv", "path": f"out/{name}.csv"},
        {"kind": "pgm", "path": f"out/{name}.pgm"},
        {"kind": "json-meta", "path": f"out/{name}.meta.json"},
        {"kind": "png", "path": f"out/{name}.png"},
    ]
    return {
        "description": description,
        "model": model,
        "spectrum": {"pole_order": order, "entries": entries},
        "grid": GRID,
        "modes": MODES,
        "outputs": outs,
    }


def all_configs():
    cfgs = {}
    bg = [(1.0, "a"), (0.6, "b"), (0.3, "c"), (ZBC, "d")]
    for pm, s in bg:
        cfgs[f"fig2{s}"] = config(f"fig2{s}", A_STD, pm, [1.5j],
                                  description=f"N=1 breather, z1=1.5i, psi_minus={pm:g}")
    cfgs["fig3a"] = config(
        "fig3a", A_STD, 1.0, [1.05 * cmath.exp(1j * math.pi / 4)],
        description="N=1, z1 on the circle |z|=psi0 moved outward to 1.05 e^{i pi/4}")
    cfgs["fig3b"] = config(
        "fig3b", A_STD, 1.0, [1.25 * cmath.exp(3j * math.pi / 4)],
        description="N=1, z1=0.8 e^{i pi/4} replaced by its fundamental-domain partner -psi0^2/z1 = 1.25 e^{3i pi/4}")
    for pm, s in bg:
        cfgs[f"fig4{s}"] = config(f"fig4{s}", A_STD, pm, [0.2 + 2j, 1 + 1j],
                                  description=f"N=2, z1=0.2+2i, z2=1+i, psi_minus={pm:g}")
    for pm, s in bg:
        cfgs[f"fig5{s}"] = config(f"fig5{s}", A_STD, pm, [0.1 + 1.5j, -0.1 + 1.5j],
                                  description=f"N=2, z1,2=+-0.1+1.5i, psi_minus={pm:g}")
    cfgs["fig6a"] = config("fig6a", A_FIG6, 1.0, [2j, 1.5j],
                           description="N=2, z1=0.5i replaced by its fundamental-domain partner 2i, z2=1.5i")
    cfgs["fig6b"] = config("fig6b", A_FIG6, 1.0, [1.5j],
                           description="coincident pair z1=z2=1.5i is degenerate; shipped as the N=1 breather at 1.5i")
    cfgs["fig6c"] = config("fig6c", A_FIG6, 1.0, [0.1 + 1.5j, -0.1 + 1.5j],
                           description="N=2, z2=-0.1-1.5i replaced by its conjugate partner -0.1+1.5i")
    for pm, s in bg:
        cfgs[f"fig7{s}"] = config(f"fig7{s}", A_STD, pm, [1 / 65 + 1.05j, -1 / 65 + 1.05j],
                                  description=f"N=2, z1,2=+-1/65+1.05i, psi_minus={pm:g}")
    cfgs["fig8a"] = config("fig8a", A_STD, 1.0, [-0.08 + 1.5j], "double",
                           description="double pole, z1=-0.08+1.5i, A=B=1")
    cfgs["fig8b"] = config("fig8b", A_STD, 1.0, [-0.08 + 1.5j], "double",
                           description="double pole, z1=-0.08+1.5i, A=B=1 (same data as fig8a)")
    cfgs["fig8c"] = config("fig8c", A_STD, 1.0, [-0.06 + 1.5j], "double",
                           description="double pole, z1=-0.06+1.5i, A=B=1")
    for pm, s in [(1.0, "a"), (0.5, "b"), (0.3, "c"), (ZBC, "d")]:
        cfgs[f"fig9{s}"] = config(f"fig9{s}", A_STD, pm, [1.5j], "double",
                                  description=f"double pole, z1=1.5i, A=B=1, psi_minus={pm:g}")
    cfgs["fig10"] = config("fig10", A_STD, 1.0, [1.5j], "double",
                           description="density view of the double-pole breather z1=1.5i, psi_minus=1")
    return cfgs


def main():
    ROOT.mkdir(exist_ok=True)
    for name, cfg in all_configs().items():
        (ROOT / f"{name}.json").write_text(json.dumps(cfg, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
