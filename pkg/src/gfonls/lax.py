"""Lax matrices at the constant background and the dispersion they imply.

At ``psi = psi_minus`` every x-derivative vanishes and the time matrix
collapses to a polynomial in ``k`` times ``U`` (plus sigma3 terms).  Two
assemblies are provided:

``completed``
    the time part built from the recursion with the fourth- and fifth-order
    blocks closed consistently (``D_LPD = -2k D_MKdV + M0``,
    ``D_FOQ = -2k D_LPD + 6 psi0**4 Q``) and the constant gauge term taken
    as ``3i a4 psi0**4 sigma3``.  This commutes with ``U``.
``literal``
    the blocks transcribed term by term, with ``4ik**3`` read as a multiple
    of the identity, ``N0`` as printed and the gauge term ``3i a4 sigma3``.
    Kept as a diagnostic; its commutator with ``U`` is reported, not hidden.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchPointError, DomainError, NonCommutingError
from .spectral import ModelParams, dispersion_omega, k_of_z, lambda_of_z

SIGMA3 = np.diag([1.0 + 0j, -1.0 + 0j])
IDENT = np.eye(2, dtype=complex)
VARIANTS = ("completed", "literal")
COMMUTATOR_RTOL = 1e-10
VERDICT_TOL = 1e-8


def _q(p: ModelParams) -> np.ndarray:
    pm = p.psi_minus
    return np.array([[0.0, pm], [-np.conj(pm), 0.0]], dtype=complex)


def build_U_boundary(z, p: ModelParams) -> np.ndarray:
    k = k_of_z(z, p)
    return 1j * k * SIGMA3 + _q(p)


def _blocks(z, p: ModelParams, variant: str):
    """Return (D_NLS, D_MKdV, D_LPD, D_FOQ, gauge) at the background."""
    k = k_of_z(z, p)
    s2 = p.psi0**2
    s4 = s2 * s2
    U = build_U_boundary(z, p)
    Q = _q(p)
    Q2 = Q @ Q  # = -psi0**2 I
    Q3 = Q2 @ Q
    d_nls = -2 * k * U + 1j * SIGMA3 @ (-Q2 - s2 * IDENT)
    d_mkdv = -2 * k * (d_nls + 1j * s2 * SIGMA3) + 2 * Q3
    m0 = -3j * s4 * SIGMA3
    if variant == "completed":
        d_lpd = -2 * k * d_mkdv + m0
        d_foq = -2 * k * d_lpd + 6 * s4 * Q
        gauge = 3j * s4 * SIGMA3
    elif variant == "literal":
        pm = p.psi_minus
        v0 = -0.5j * s2 * SIGMA3
        l0 = np.array([[0.0, 2j * s2 * pm], [2j * s2 * np.conj(pm), 0.0]])
        d_lpd = 2 * k * (-(4j * k**3 * IDENT + k**2 * Q + k * v0) + l0) + m0
        n2 = 6j * s4 * np.conj(pm)
        n0 = np.array([[0.0, -np.conj(n2)], [n2, 0.0]])
        d_foq = -2 * k * d_lpd + n0
        gauge = 3j * SIGMA3
    else:
        raise ValueError(f"unknown Lax variant {variant!r}")
    return d_nls, d_mkdv, d_lpd, d_foq, gauge


def build_V_boundary(z, p: ModelParams, variant: str = "completed") -> np.ndarray:
    if abs(complex(z)) < 1e-12:
        raise DomainError("z = 0 is a pole of the Lax pair")
    d_nls, d_mkdv, d_lpd, d_foq, gauge = _blocks(z, p, variant)
    return (
        p.alpha2 * d_nls
        + p.alpha3 * d_mkdv
        + p.alpha4 * d_lpd
        + p.alpha5 * d_foq
        + p.alpha4 * gauge
    )


def commutator_defect(z, p: ModelParams, variant: str = "completed") -> float:
    """``max|[U,V]| / (max|U| max|V|)``; 0 when V is a zero matrix."""
    U = build_U_boundary(z, p)
    V = build_V_boundary(z, p, variant)
    c = U @ V - V @ U
    scale = np.abs(U).max() * np.abs(V).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(c).max() / scale)


def _plus_eigenvector(z, p: ModelParams) -> np.ndarray:
    # U e = i*lam e for e = (1, i conj(psi_m)/z), the first column of E(z)
    return np.array([1.0, 1j * np.conj(p.psi_minus) / complex(z)], dtype=complex)


def omega_from_lax(z, p: ModelParams, variant: str = "completed") -> complex:
    """Time-flow eigenvalue on U's ``+i lambda`` eigenvector, divided by ``i lambda``."""
    lam = lambda_of_z(z, p)
    if abs(lam) < 1e-8:
        raise BranchPointError(f"z={complex(z)} is a branch point (lambda = 0)")
    defect = commutator_defect(z, p, variant)
    if defect > COMMUTATOR_RTOL:
        raise NonCommutingError(
            f"[U,V] relative defect {defect:.3e} at z={complex(z)} ({variant} assembly)"
        )
    V = build_V_boundary(z, p, variant)
    e = _plus_eigenvector(z, p)
    mu = np.vdot(e, V @ e) / np.vdot(e, e)  # Rayleigh quotient
    return complex(mu / (1j * lam))


@functools.lru_cache(maxsize=64)
def _fit_terms(psi_minus: complex, psi0: float, zbc: bool) -> np.ndarray:
    base = ModelParams(0.0, 0.0, 0.0, 0.0, psi_minus, psi0, zbc)
    # well-spread nodes away from the branch points and the origin
    ang = np.linspace(0.1, 2 * np.pi - 0.1, 17)
    zs = 1.7 * max(psi0, 1.0) * np.exp(1j * (ang + 0.05))
    ks = np.array([k_of_z(z, base) for z in zs])
    vander = np.vander(ks, 5, increasing=True)
    rows = []
    for n in range(4):
        a = [0.0] * 4
        a[n] = 1.0
        pn = base.with_alphas(*a)
        om = np.array([omega_from_lax(z, pn) for z in zs])
        coef, *_ = np.linalg.lstsq(vander, om, rcond=None)
        rows.append(coef)
    out = np.array(rows)
    # The assembly is real-coefficient; drop the fitting round-off.
    out = out.real
    out[np.abs(out) < 1e-12 * max(1.0, psi0**4)] = 0.0
    return out


def fitted_dispersion_terms(p: ModelParams) -> np.ndarray:
    return _fit_terms(p.psi_minus, p.psi0, p.zbc_limit).copy()


@dataclass
class DispersionReport:
    z: complex
    omega_printed: complex | None = None
    omega_lax: complex | None = None
    abs_discrepancy: float | None = None
    per_term: list = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_json(self) -> dict:
        def c(v):
            return None if v is None else [float(np.real(v)), float(np.imag(v))]

        return {
            "z": c(self.z),
            "omega_printed": c(self.omega_printed),
            "omega_lax": c(self.omega_lax),
            "abs_discrepancy": self.abs_discrepancy,
            "per_term": self.per_term,
            "error": self.error,
        }


@dataclass
class CalibrationResult:
    reports: list
    verdict: str
    max_discrepancy: float
    literal_commutator_defect: float
    hierarchy_discrepancy: float

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "max_discrepancy": self.max_discrepancy,
            "literal_assembly_commutator_defect": self.literal_commutator_defect,
            "lax_vs_hierarchy_max_discrepancy": self.hierarchy_discrepancy,
            "reports": [r.to_json() for r in self.reports],
        }


def _one(z, p: ModelParams, variant: str) -> DispersionReport:
    rep = DispersionReport(z=complex(z))
    try:
        op = dispersion_omega(z, p, "printed")
        ol = omega_from_lax(z, p, variant)
        rep.omega_printed, rep.omega_lax = op, ol
        rep.abs_discrepancy = abs(op - ol)
        for n, name in enumerate(("alpha2", "alpha3", "alpha4", "alpha5")):
            coef = p.alphas[n]
            a = [0.0] * 4
            a[n] = coef
            if coef == 0.0:
                rep.per_term.append({"term": name, "discrepancy": 0.0})
                continue
            pn = p.with_alphas(*a)
            d = abs(dispersion_omega(z, pn, "printed") - omega_from_lax(z, pn, variant))
            rep.per_term.append({"term": name, "discrepancy": d})
    except (DomainError, NonCommutingError) as exc:
        rep.error = f"{type(exc).__name__}: {exc}"
    return rep


def calibrate(p: ModelParams, sample_points, variant: str = "completed") -> CalibrationResult:
    """Compare printed and Lax-derived dispersion at each sample point.

    Point failures become report entries; the batch never aborts.
    """
    reports = [_one(z, p, variant) for z in sample_points]
    good = [r.abs_discrepancy for r in reports if r.ok]
    worst = max(good) if good else float("nan")
    failed = any(not r.ok for r in reports)
    consistent = (not failed) and bool(good) and worst < VERDICT_TOL
    lit = 0.0
    hier = 0.0
    for z in sample_points:
        try:
            lit = max(lit, commutator_defect(z, p, "literal"))
            if abs(lambda_of_z(z, p)) > 1e-8:
                hier = max(hier, abs(omega_from_lax(z, p) - dispersion_omega(z, p, "hierarchy")))
        except DomainError:
            continue
    return CalibrationResult(
        reports=reports,
        verdict="printed-consistent" if consistent else "printed-inconsistent",
        max_discrepancy=float(worst),
        literal_commutator_defect=float(lit),
        hierarchy_discrepancy=float(hier),
    )
