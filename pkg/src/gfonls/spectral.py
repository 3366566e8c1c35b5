"""Uniformized spectral geometry for the constant background.

The two-sheeted square root ``lambda**2 = k**2 + psi0**2`` is resolved by the
uniformization variable ``z = k + lambda``.  Everything here is a pure,
vectorized function of ``z`` (scalar or ``ndarray``) and a :class:`ModelParams`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError

DispersionMode = Literal["printed", "lax", "hierarchy"]
DISPERSION_MODES: tuple[str, ...] = ("printed", "lax", "hierarchy")

EPS_ZERO = 1e-12
#: below this background modulus the explicit ZBC-limit flag is required
ZBC_THRESHOLD = 1e-4


@dataclass(frozen=True)
class ModelParams:
    """Equation coefficients and the left boundary value ``psi_minus``.

    ``psi0`` is stored rather than recomputed on every use; when omitted it is
    set once to ``abs(psi_minus)``.
    """

    alpha2: float
    alpha3: float
    alpha4: float
    alpha5: float
    psi_minus: complex
    psi0: float | None = None
    zbc_limit: bool = False

    def __post_init__(self):
        pm = complex(self.psi_minus)
        object.__setattr__(self, "psi_minus", pm)
        for name in ("alpha2", "alpha3", "alpha4", "alpha5"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.psi0 is None:
            object.__setattr__(self, "psi0", abs(pm))
        psi0 = float(self.psi0)
        object.__setattr__(self, "psi0", psi0)
        if not math.isclose(psi0, abs(pm), rel_tol=4e-16, abs_tol=0.0):
            raise ValueError(f"psi0={psi0!r} differs from |psi_minus|={abs(pm)!r}")
        if psi0 <= 0.0:
            raise ValueError("psi0 must be positive (the ZBC case psi0 = 0 is reached only as a limit)")
        if psi0 <= ZBC_THRESHOLD and not self.zbc_limit:
            raise ValueError(
                f"psi0={psi0:g} <= {ZBC_THRESHOLD:g} requires zbc_limit=True"
            )

    @property
    def alphas(self) -> tuple[float, float, float, float]:
        return (self.alpha2, self.alpha3, self.alpha4, self.alpha5)

    def with_alphas(self, a2=0.0, a3=0.0, a4=0.0, a5=0.0) -> "ModelParams":
        return ModelParams(a2, a3, a4, a5, self.psi_minus, self.psi0, self.zbc_limit)


class Region(enum.Enum):
    DPLUS = "DPlus"
    DMINUS = "DMinus"
    SIGMA = "Sigma"


def _check_z(z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) < EPS_ZERO):
        raise DomainError("z = 0 is a pole of the uniformization maps")
    return z


def _out(v):
    return v.item() if np.ndim(v) == 0 else v


def k_of_z(z, p: ModelParams):
    z = _check_z(z)
    return _out(0.5 * (z - p.psi0**2 / z))


def lambda_of_z(z, p: ModelParams):
    z = _check_z(z)
    return _out(0.5 * (z + p.psi0**2 / z))


def dk_dz(z, p: ModelParams):
    z = _check_z(z)
    return _out(0.5 * (1.0 + p.psi0**2 / z**2))


def dlambda_dz(z, p: ModelParams):
    z = _check_z(z)
    return _out(0.5 * (1.0 - p.psi0**2 / z**2))


# Dispersion polynomials, ascending powers of k, per alpha term.
def _printed_terms(psi0: float) -> np.ndarray:
    s2 = psi0**2
    return np.array(
        [
            [0.0, -2.0, 0.0, 0.0, 0.0],  # alpha2
            [-2.0 * s2, 0.0, 4.0, 0.0, 0.0],  # alpha3
            [0.0, -4.0 * s2, 0.0, 8.0, 0.0],  # alpha4
            [-6.0 * s2, 0.0, 8.0, 0.0, -16.0],  # alpha5, as printed
        ]
    )


def _hierarchy_terms(psi0: float) -> np.ndarray:
    # Exact dispersion of each flow of the printed equation, from the
    # zero-curvature recursion with the background made stationary.
    s2 = psi0**2
    return np.array(
        [
            [0.0, -2.0, 0.0, 0.0, 0.0],
            [2.0 * s2, 0.0, -4.0, 0.0, 0.0],
            [0.0, -4.0 * s2, 0.0, 8.0, 0.0],
            [6.0 * s2**2, 0.0, -8.0 * s2, 0.0, 16.0],
        ]
    )


def dispersion_terms(p: ModelParams, mode: DispersionMode = "printed") -> np.ndarray:
    """4x5 array: row ``n`` holds the k-polynomial multiplying ``alpha_{n+2}``."""
    if mode == "printed":
        return _printed_terms(p.psi0)
    if mode == "hierarchy":
        return _hierarchy_terms(p.psi0)
    if mode == "lax":
        from .lax import fitted_dispersion_terms

        return fitted_dispersion_terms(p)
    raise ValueError(f"unknown dispersion mode {mode!r}")


def dispersion_coefficients(p: ModelParams, mode: DispersionMode = "printed") -> np.ndarray:
    """Ascending k-coefficients of Omega(k) for the given alphas."""
    return np.asarray(p.alphas) @ dispersion_terms(p, mode)


def omega_of_k(k, p: ModelParams, mode: DispersionMode = "printed"):
    c = dispersion_coefficients(p, mode)
    return _out(np.polynomial.polynomial.polyval(np.asarray(k, dtype=complex), c))


def domega_dk(k, p: ModelParams, mode: DispersionMode = "printed"):
    c = np.polynomial.polynomial.polyder(dispersion_coefficients(p, mode))
    return _out(np.polynomial.polynomial.polyval(np.asarray(k, dtype=complex), c))


def dispersion_omega(z, p: ModelParams, mode: DispersionMode = "printed"):
    return omega_of_k(k_of_z(z, p), p, mode)


def theta(x, t, z, p: ModelParams, mode: DispersionMode = "printed"):
    """Phase ``lambda(z) * (x + Omega(z) t)``; broadcasts over x, t and z."""
    z = _check_z(z)
    c = dispersion_coefficients(p, mode)
    k = 0.5 * (z - p.psi0**2 / z)
    lam = 0.5 * (z + p.psi0**2 / z)
    om = np.polynomial.polynomial.polyval(k, c)
    return _out(lam * (np.asarray(x, dtype=float) + om * np.asarray(t, dtype=float)))


def theta_prime_z(x, t, z, p: ModelParams, mode: DispersionMode = "printed"):
    """Analytic z-derivative of :func:`theta`."""
    z = _check_z(z)
    c = dispersion_coefficients(p, mode)
    dc = np.polynomial.polynomial.polyder(c)
    s2 = p.psi0**2
    k = 0.5 * (z - s2 / z)
    lam = 0.5 * (z + s2 / z)
    dlam = 0.5 * (1.0 - s2 / z**2)
    dk = 0.5 * (1.0 + s2 / z**2)
    om = np.polynomial.polynomial.polyval(k, c)
    dom = np.polynomial.polynomial.polyval(k, dc)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    return _out(dlam * (x + om * t) + lam * dom * dk * t)


def region_of(z, p: ModelParams, eps: float | None = None) -> Region:
    z = complex(z)
    if abs(z) < EPS_ZERO:
        raise DomainError("z = 0 has no region")
    # scale-invariant band: the test quantity is cubic in z, and the ZBC limit
    # puts the image points at |z| ~ psi0**2
    tol = 1e-12 * abs(z) * (abs(z) ** 2 + p.psi0**2) if eps is None else eps
    s = (abs(z) ** 2 - p.psi0**2) * z.imag
    if s > tol:
        return Region.DPLUS
    if s < -tol:
        return Region.DMINUS
    return Region.SIGMA
