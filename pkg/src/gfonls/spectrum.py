"""Discrete spectral data: validation, symmetric expansion, theta condition."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SpectrumError
from .spectral import ModelParams, Region, region_of

COLLISION_TOL = 1e-8
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SimpleSpectrum:
    """Eigenvalues ``z_n`` with norming constants ``A+[z_n]``."""

    entries: tuple = ()

    pole_order = "simple"

    def __post_init__(self):
        object.__setattr__(
            self, "entries", tuple((complex(z), complex(a)) for z, a in self.entries)
        )

    @property
    def zs(self) -> np.ndarray:
        return np.array([e[0] for e in self.entries], dtype=complex)

    @property
    def a_plus(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries], dtype=complex)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class DoubleSpectrum:
    """Double-pole eigenvalues with ``A+[z_n]`` and ``B+[z_n]``."""

    entries: tuple = ()

    pole_order = "double"

    def __post_init__(self):
        object.__setattr__(
            self,
            "entries",
            tuple((complex(z), complex(a), complex(b)) for z, a, b in self.entries),
        )

    @property
    def zs(self) -> np.ndarray:
        return np.array([e[0] for e in self.entries], dtype=complex)

    @property
    def a_plus(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries], dtype=complex)

    @property
    def b_plus(self) -> np.ndarray:
        return np.array([e[2] for e in self.entries], dtype=complex)

    def __len__(self):
        return len(self.entries)


Spectrum = SimpleSpectrum | DoubleSpectrum


@dataclass(frozen=True)
class ExpandedSpectrum:
    """The 2N points ``xi``, their images ``xi_hat = -psi0**2/xi`` and the
    minus-side norming data at the images."""

    pole_order: str
    xi: np.ndarray
    xi_hat: np.ndarray
    a_minus_hat: np.ndarray
    b_minus_hat: np.ndarray | None = None

    @property
    def size(self) -> int:
        return len(self.xi)


def validate(s: Spectrum, p: ModelParams) -> list[str]:
    out: list[str] = []
    zs = [e[0] for e in s.entries]
    for i, e in enumerate(s.entries, start=1):
        z, a = e[0], e[1]
        if not (np.isfinite(z.real) and np.isfinite(z.imag)):
            out.append(f"z{i} is not finite")
            continue
        if abs(z) <= p.psi0 * (1.0 + 1e-12):
            out.append(f"|z{i}| ≤ ψ0 (|z{i}|={abs(z):.6g}, ψ0={p.psi0:.6g})")
        if z.imag <= 0.0:
            out.append(f"z{i} not in fundamental domain (Im ≤ 0)")
        if a == 0 or not np.isfinite(abs(a)):
            out.append(f"A+[z{i}] must be finite and nonzero")
        if isinstance(s, DoubleSpectrum) and not np.isfinite(abs(e[2])):
            out.append(f"B+[z{i}] must be finite")
    for i in range(len(zs)):
        for j in range(len(zs)):
            if i == j:
                continue
            if j > i and abs(zs[i] - zs[j]) < COLLISION_TOL * max(1.0, abs(zs[i])):
                out.append(f"z{i + 1} and z{j + 1} coincide (collision tolerance {COLLISION_TOL:g})")
            img = -p.psi0**2 / np.conj(zs[j]) if zs[j] != 0 else np.inf
            if abs(zs[i] - img) < COLLISION_TOL * max(1.0, abs(zs[i])):
                out.append(f"z{i + 1} coincides with the image -ψ0²/z{j + 1}*")
    return out


def _require_valid(s: Spectrum, p: ModelParams):
    v = validate(s, p)
    if v:
        raise SpectrumError(v)


def _points(zs: np.ndarray, p: ModelParams):
    s2 = p.psi0**2
    xi = np.concatenate([zs, -s2 / np.conj(zs)])
    return xi, -s2 / xi


def _check_regions(xi, xi_hat, p):
    bad = []
    for n, (a, b) in enumerate(zip(xi, xi_hat), start=1):
        if region_of(a, p) is not Region.DPLUS:
            bad.append(f"xi{n} not in D+")
        if region_of(b, p) is not Region.DMINUS:
            bad.append(f"xi_hat{n} not in D-")
    if bad:
        raise SpectrumError(bad)


def expand_simple(s: SimpleSpectrum, p: ModelParams) -> ExpandedSpectrum:
    _require_valid(s, p)
    zs, ap = s.zs, s.a_plus
    xi, xh = _points(zs, p)
    am = np.concatenate([(p.psi_minus**2 / zs**2) * ap, -np.conj(ap)])
    _check_regions(xi, xh, p)
    return ExpandedSpectrum("simple", xi, xh, am)


def expand_double(s: DoubleSpectrum, p: ModelParams) -> ExpandedSpectrum:
    _require_valid(s, p)
    zs, ap, bp = s.zs, s.a_plus, s.b_plus
    xi, xh = _points(zs, p)
    s2 = p.psi0**2
    pm = p.psi_minus
    am = np.concatenate([(s2 * s2 * pm / (zs**4 * np.conj(pm))) * ap, -np.conj(ap)])
    bm = np.concatenate([(zs**2 / s2) * (bp - 2.0 / zs), np.conj(bp)])
    _check_regions(xi, xh, p)
    return ExpandedSpectrum("double", xi, xh, am, bm)


def expand(s: Spectrum, p: ModelParams) -> ExpandedSpectrum:
    if isinstance(s, DoubleSpectrum):
        return expand_double(s, p)
    return expand_simple(s, p)


def recover_a_plus(es: ExpandedSpectrum, p: ModelParams) -> np.ndarray:
    """Invert the symmetry map for the first N entries (round-trip check)."""
    n = es.size // 2
    zs = es.xi[:n]
    if es.pole_order == "simple":
        return es.a_minus_hat[:n] * zs**2 / p.psi_minus**2
    s2 = p.psi0**2
    return es.a_minus_hat[:n] * zs**4 * np.conj(p.psi_minus) / (s2 * s2 * p.psi_minus)


def theta_condition_raw(s: Spectrum) -> float:
    factor = 8.0 if isinstance(s, DoubleSpectrum) else 4.0
    return factor * float(sum(np.angle(z) for z in s.zs))


def theta_condition(s: Spectrum) -> float:
    """Predicted ``arg(psi+) - arg(psi-)`` reduced to ``[0, 2pi)``."""
    v = math.fmod(theta_condition_raw(s), TWO_PI)
    if v < 0:
        v += TWO_PI
    if TWO_PI - v < 1e-12:
        v = 0.0
    return v


def format_phase(reduced: float, raw: float | None = None) -> str:
    """Render a phase in units of pi; a nonzero multiple of 2pi prints as ``2π``."""
    if abs(reduced) < 1e-12:
        if raw is not None and abs(raw) > 1e-12:
            return "2π"
        return "0"
    r = reduced / math.pi
    if abs(r - round(r)) < 1e-12:
        r = round(r)
        return "π" if r == 1 else f"{r}π"
    return f"{r:.12g}π"


def mod_2pi_distance(a: float, b: float) -> float:
    d = math.fmod(a - b, TWO_PI)
    d = abs(d)
    return min(d, TWO_PI - d)


def build_spectrum(pole_order: str, entries: Sequence) -> Spectrum:
    if pole_order == "simple":
        return SimpleSpectrum(tuple(entries))
    if pole_order == "double":
        return DoubleSpectrum(tuple(entries))
    raise ValueError(f"unknown pole order {pole_order!r}")
