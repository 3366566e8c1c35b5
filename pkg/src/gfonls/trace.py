"""Reflectionless trace formulae for the scattering coefficients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleError
from .spectral import ModelParams


@dataclass(frozen=True)
class TraceEvaluation:
    z: complex
    s11: complex
    s22: complex
    pole_order: str


def _zs_order(spectrum, pole_order):
    zs = np.asarray(spectrum.zs if hasattr(spectrum, "zs") else spectrum, dtype=complex)
    order = pole_order or getattr(spectrum, "pole_order", "simple")
    if order not in ("simple", "double"):
        raise ValueError(f"unknown pole order {order!r}")
    return zs, order


def _factors(z, zs, p: ModelParams):
    s2 = p.psi0**2
    z = np.asarray(z, dtype=complex)[..., None]
    num = (z - zs) * (z + s2 / np.conj(zs))
    den = (z - np.conj(zs)) * (z + s2 / zs)
    return num, den


def _check_poles(z, bad, what):
    z = np.asarray(z, dtype=complex)
    tol = 1e-12 * (1.0 + np.abs(z))
    if bad.size and np.any(np.abs(z[..., None] - bad) <= tol[..., None]):
        raise PoleError(f"z is within {1e-12:g}(1+|z|) of a pole of {what}")


def s11_reflectionless(z, spectrum, p: ModelParams, pole_order: str | None = None):
    zs, order = _zs_order(spectrum, pole_order)
    _check_poles(z, np.concatenate([np.conj(zs), -p.psi0**2 / zs]), "s11")
    num, den = _factors(z, zs, p)
    f = num / den
    if order == "double":
        f = f * f
    out = np.prod(f, axis=-1)
    return out.item() if out.ndim == 0 else out


def s22_reflectionless(z, spectrum, p: ModelParams, pole_order: str | None = None):
    zs, order = _zs_order(spectrum, pole_order)
    _check_poles(z, np.concatenate([zs, -p.psi0**2 / np.conj(zs)]), "s22")
    num, den = _factors(z, zs, p)
    f = den / num
    if order == "double":
        f = f * f
    out = np.prod(f, axis=-1)
    return out.item() if out.ndim == 0 else out


def s11_origin_limit(spectrum, pole_order: str | None = None) -> complex:
    """``lim_{z->0} s11`` = prod (z_n / z_n*)^2, squared again for double poles."""
    zs, order = _zs_order(spectrum, pole_order)
    f = (zs / np.conj(zs)) ** 2
    if order == "double":
        f = f * f
    return complex(np.prod(f))


def contour_points(kind: str, n: int, p: ModelParams, radius: float = 10.0) -> np.ndarray:
    """Sample points on the real line (origin excluded) or the circle |z| = psi0."""
    if n < 1:
        raise ValueError("need at least one sample")
    j = np.arange(n) + 0.5
    if kind == "real":
        return (-radius + 2 * radius * j / n).astype(complex)
    if kind == "circle":
        return p.psi0 * np.exp(2j * np.pi * j / n)
    raise ValueError(f"unknown contour {kind!r}")


def evaluate_trace(points, spectrum, p: ModelParams, pole_order: str | None = None):
    _, order = _zs_order(spectrum, pole_order)
    pts = np.asarray(points, dtype=complex)
    s11 = np.atleast_1d(s11_reflectionless(pts, spectrum, p, order))
    s22 = np.atleast_1d(s22_reflectionless(pts, spectrum, p, order))
    return [TraceEvaluation(complex(z), complex(a), complex(b), order) for z, a, b in zip(pts, s11, s22)]
