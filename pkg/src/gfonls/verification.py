"""Finite-difference truth source: stencils, the PDE residual, boundary and
phase diagnostics, and a short-time method-of-lines integrator."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooSmallError, InstabilityError
from .spectral import ModelParams

K4_FORMS = ("complete", "printed")


# --- stencils ---------------------------------------------------------------

def fornberg_weights(z0: float, nodes, m: int) -> np.ndarray:
    """Weights for the ``m``-th derivative at ``z0`` from values at ``nodes``.

    Fornberg's recursive algorithm; returns the row for derivative ``m``.
    """
    nodes = np.asarray(nodes, dtype=float)
    n = len(nodes)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = nodes[0] - z0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = nodes[i] - z0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def half_width(order: int) -> int:
    return (order + 1) // 2 + 1


@functools.lru_cache(maxsize=None)
def _stencils(order: int):
    r = half_width(order)
    central = fornberg_weights(0.0, np.arange(-r, r + 1), order)
    ns = order + 4
    left = [fornberg_weights(float(i), np.arange(ns), order) for i in range(r)]
    return r, central, ns, left


def fd_derivative(values: np.ndarray, h: float, axis: int, order: int) -> np.ndarray:
    """4th-order accurate ``order``-th derivative of ``values`` along ``axis``.

    Central stencils in the interior; one-sided ``order+4``-point stencils in
    the ``half_width(order)`` nodes nearest each edge.
    """
    if not 1 <= order <= 5:
        raise ValueError("derivative order must be 1..5")
    a = np.moveaxis(np.asarray(values), axis, 0)
    n = a.shape[0]
    r, central, ns, left = _stencils(order)
    if n < max(ns, 2 * r + 1):
        raise GridTooSmallError(
            f"axis has {n} points; order {order} needs at least {max(ns, 2 * r + 1)}"
        )
    # differences are taken from a reference value so constants map to exactly 0
    a = a - a[:1]
    out = np.zeros_like(a, dtype=np.result_type(a.dtype, float))
    for j, wj in enumerate(central):
        if wj != 0.0:
            out[r : n - r] += wj * a[j : n - 2 * r + j]
    sign = -1.0 if order % 2 else 1.0  # mirrored stencil for the right edge
    for i, w in enumerate(left):
        out[i] = np.tensordot(w, a[:ns], axes=(0, 0))
        out[n - 1 - i] = sign * np.tensordot(w, a[::-1][:ns], axes=(0, 0))
    out /= h**order
    return np.moveaxis(out, 0, axis)


# --- K operators ------------------------------------------------------------

def x_derivatives(values, hx, orders=(1, 2, 3, 4, 5), axis=-1) -> dict:
    return {m: fd_derivative(values, hx, axis, m) for m in orders}


def k_terms(psi, d, p: ModelParams, gauge_mode="gauge_fixed", k4_form="complete"):
    """Dict of K2..K5 from a field and its x-derivatives ``d[1..5]``."""
    if k4_form not in K4_FORMS:
        raise ValueError(f"k4_form must be one of {K4_FORMS}")
    s2 = p.psi0**2
    a2 = np.abs(psi) ** 2
    pc = np.conj(psi)
    p1, p2, p3, p4, p5 = d[1], d[2], d[3], d[4], d[5]
    K2 = p2 + 2 * (a2 - s2) * psi
    K3 = p3 + 6 * a2 * p1
    K4 = p4 + 8 * a2 * p2 + 6 * a2**2 * psi + 6 * pc * p1**2 + 2 * psi**2 * np.conj(p2)
    if k4_form == "complete":
        K4 = K4 + 4 * np.abs(p1) ** 2 * psi
    if gauge_mode == "gauge_fixed":
        K4 = K4 - 6 * s2 * s2 * psi
    elif gauge_mode != "verbatim":
        raise ValueError(f"unknown gauge mode {gauge_mode!r}")
    # (psi |psi_x|^2)_x expanded by the product rule
    prod_x = p1 * np.abs(p1) ** 2 + psi * (p2 * np.conj(p1) + p1 * np.conj(p2))
    K5 = p5 + 10 * a2 * p3 + 10 * prod_x + 20 * pc * p1 * p2 + 30 * a2**2 * p1
    return {"K2": K2, "K3": K3, "K4": K4, "K5": K5}


def apply_K(values, hx, p: ModelParams, which: str, gauge_mode="gauge_fixed", k4_form="complete", axis=-1):
    d = x_derivatives(values, hx, axis=axis)
    return k_terms(np.asarray(values), d, p, gauge_mode, k4_form)[which]


# --- residual ---------------------------------------------------------------

@dataclass
class ResidualReport:
    sup_norm: float
    l2_norm: float
    per_term_norms: dict
    hx: float
    ht: float
    gauge_mode: str
    gamma: float
    trim: tuple
    k4_form: str = "complete"
    convergence_order: float | None = None
    config_digest: str | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "sup_norm": self.sup_norm,
            "l2_norm": self.l2_norm,
            "per_term_norms": self.per_term_norms,
            "hx": self.hx,
            "ht": self.ht,
            "gauge_mode": self.gauge_mode,
            "gamma": self.gamma,
            "trim": list(self.trim),
            "k4_form": self.k4_form,
            "convergence_order": self.convergence_order,
            "config_digest": self.config_digest,
            **self.extra,
        }


def residual_array(values, hx, ht, p: ModelParams, gauge_mode="gauge_fixed", k4_form="complete"):
    """Full residual array (t along axis 0, x along axis 1) and its pieces."""
    values = np.asarray(values, dtype=complex)
    psi_t = fd_derivative(values, ht, 0, 1)
    K = k_terms(values, x_derivatives(values, hx, axis=1), p, gauge_mode, k4_form)
    terms = {
        "psi_t": 1j * psi_t,
        "K2": p.alpha2 * K["K2"],
        "K3": -1j * p.alpha3 * K["K3"],
        "K4": p.alpha4 * K["K4"],
        "K5": -1j * p.alpha5 * K["K5"],
    }
    R = terms["psi_t"] + terms["K2"] + terms["K3"] + terms["K4"] + terms["K5"]
    return R, terms


def trim_widths():
    return half_width(1), half_width(5)


def residual(field_or_values, p: ModelParams, gauge_mode="gauge_fixed", hx=None, ht=None,
             k4_form="complete") -> ResidualReport:
    """Residual of ``i psi_t + a2 K2 - i a3 K3 + a4 K4 - i a5 K5`` on the
    stencil-trimmed interior."""
    values, hx, ht, gamma, digest = _unpack(field_or_values, hx, ht)
    R, terms = residual_array(values, hx, ht, p, gauge_mode, k4_form)
    tt, tx = trim_widths()
    sl = (slice(tt, R.shape[0] - tt), slice(tx, R.shape[1] - tx))
    Ri = R[sl]
    if Ri.size == 0:
        raise GridTooSmallError("grid too small for a trimmed interior")
    return ResidualReport(
        sup_norm=float(np.abs(Ri).max()),
        l2_norm=float(math.sqrt(hx * ht * float(np.sum(np.abs(Ri) ** 2)))),
        per_term_norms={k: float(np.abs(v[sl]).max()) for k, v in terms.items()},
        hx=hx,
        ht=ht,
        gauge_mode=gauge_mode,
        gamma=gamma,
        trim=(tt, tx),
        k4_form=k4_form,
        config_digest=digest,
    )


def _unpack(obj, hx, ht):
    if hasattr(obj, "values"):
        return (obj.values, obj.hx, obj.ht, float(obj.metadata.get("gamma", 0.0)),
                obj.metadata.get("config_digest"))
    if hx is None or ht is None:
        raise ValueError("hx and ht are required for a bare array")
    return np.asarray(obj), float(hx), float(ht), 0.0, None


def refinement_pair(coarse, fine, p: ModelParams, gauge_mode="gauge_fixed", k4_form="complete", factor=2):
    """Compare residuals of a coarse field and its ``factor``-times refined twin
    on their common coarse nodes.  Returns (coarse_report, fine_report, ratio)."""
    Rc, _ = residual_array(coarse.values, coarse.hx, coarse.ht, p, gauge_mode, k4_form)
    Rf, _ = residual_array(fine.values, fine.hx, fine.ht, p, gauge_mode, k4_form)
    Rf_on_c = Rf[::factor, ::factor]
    if Rf_on_c.shape != Rc.shape:
        raise ValueError("fine grid is not a refinement of the coarse grid")
    tt, tx = trim_widths()
    sl = (slice(tt, Rc.shape[0] - tt), slice(tx, Rc.shape[1] - tx))
    sup_c = float(np.abs(Rc[sl]).max())
    sup_f = float(np.abs(Rf_on_c[sl]).max())
    ratio = sup_c / sup_f if sup_f > 0 else math.inf
    order = math.log(ratio, factor) if 0 < ratio < math.inf else None
    rc = residual(coarse, p, gauge_mode, k4_form=k4_form)
    rf = residual(fine, p, gauge_mode, k4_form=k4_form)
    rc.extra["common_node_sup"] = sup_c
    rf.extra["common_node_sup"] = sup_f
    rf.convergence_order = order
    rf.extra["refinement_ratio"] = ratio
    return rc, rf, ratio


# --- asymptotic diagnostics -------------------------------------------------

def boundary_check(field_or_values, p: ModelParams) -> float:
    v = field_or_values.values if hasattr(field_or_values, "values") else np.asarray(field_or_values)
    edges = np.concatenate([np.abs(v[:, 0]), np.abs(v[:, -1])])
    return float(np.abs(edges - p.psi0).max())


def phase_jump(field_or_values) -> float:
    """``arg psi(x_right, t_mid) - arg psi(x_left, t_mid)`` in ``[0, 2pi)``."""
    v = field_or_values.values if hasattr(field_or_values, "values") else np.asarray(field_or_values)
    row = v[v.shape[0] // 2]
    d = float(np.angle(row[-1]) - np.angle(row[0]))
    d = math.fmod(d, 2 * math.pi)
    if d < 0:
        d += 2 * math.pi
    if 2 * math.pi - d < 1e-12:
        d = 0.0
    return d


def fit_sech(x, amplitude):
    """Least-squares fit of ``A sech(B (x - x0))``.

    Returns ``((A, B, x0), relative_residual)`` with the residual measured in
    the discrete 2-norm relative to the data.
    """
    from scipy.optimize import curve_fit

    x = np.asarray(x, dtype=float)
    a = np.asarray(amplitude, dtype=float)
    i = int(np.argmax(a))
    peak = float(a[i])
    half = x[a >= 0.5 * peak]
    width = max(float(half[-1] - half[0]), 1e-12)
    guess = (peak, 2.634 / width, float(x[i]))  # 2 arccosh(2) / FWHM

    def model(xx, A, B, x0):
        return A / np.cosh(B * (xx - x0))

    popt, _ = curve_fit(model, x, a, p0=guess, maxfev=20000)
    rel = float(np.linalg.norm(model(x, *popt) - a) / np.linalg.norm(a))
    return tuple(float(v) for v in popt), rel


# --- short-time integrator --------------------------------------------------

STABILITY_C = 2.5


@functools.lru_cache(maxsize=None)
def _stencil_radius(order: int) -> float:
    # max |symbol| of the central stencil over the resolved band
    r, central, _, _ = _stencils(order)
    th = np.linspace(0, np.pi, 2049)
    j = np.arange(-r, r + 1)
    sym = np.abs(np.exp(1j * np.outer(th, j)) @ central)
    return float(sym.max())


def dt_bound(p: ModelParams, hx: float, c: float = STABILITY_C) -> float:
    """Largest stable RK4 step estimate: ``c / sum |a_m| rho_m / hx**m``.

    The bound scales as ``hx**5`` once the fifth-order term dominates.
    """
    s = 0.0
    for m, a in zip((2, 3, 4, 5), p.alphas):
        s += abs(a) * _stencil_radius(m) / hx**m
    s += 1.0  # nonlinear / first-order content, O(1)
    return c / s


def _ghost_pad(u: np.ndarray, g: int, left, right) -> np.ndarray:
    return np.concatenate([np.full(g, left), u, np.full(g, right)])


def integrate_short_time(initial_row, p: ModelParams, dt: float, steps: int, hx: float,
                         k4_form: str = "complete", widen: float = 0.1, return_info: bool = False):
    """Advance the gauge-fixed equation by classical RK4 in time.

    The domain is widened by ``widen`` of its length on each side, filled with
    the edge values, and a quadratic damping ramp there relaxes the solution
    toward those values.  Ghost nodes beyond the widened domain are held at the
    edge values.  Returns the row on the original nodes.
    """
    u0 = np.asarray(initial_row, dtype=complex)
    n = len(u0)
    lim = dt_bound(p, hx)
    if dt > lim * (1 + 1e-12):
        raise InstabilityError(f"dt={dt:g} exceeds the stability estimate {lim:g}")
    nw = max(8, int(round(widen * n)))
    left, right = u0[0], u0[-1]
    u = np.concatenate([np.full(nw, left), u0, np.full(nw, right)])
    ramp = np.zeros(len(u))
    s = (np.arange(nw, 0, -1) / nw) ** 2
    ramp[:nw] = s
    ramp[-nw:] = s[::-1]
    edge = np.where(np.arange(len(u)) < len(u) // 2, left, right)
    sigma = 5.0  # damping rate at the outer edge
    g = half_width(5)

    def rhs(v):
        vp = _ghost_pad(v, g, left, right)
        d = {}
        for m in (1, 2, 3, 4, 5):
            _, central, _, _ = _stencils(m)
            r = half_width(m)
            acc = np.zeros(len(v), dtype=complex)
            off = g - r
            for j, wj in enumerate(central):
                if wj != 0.0:
                    acc += wj * vp[off + j : off + j + len(v)]
            d[m] = acc / hx**m
        K = k_terms(v, d, p, "gauge_fixed", k4_form)
        # i v_t + a2 K2 - i a3 K3 + a4 K4 - i a5 K5 = 0
        vt = 1j * (p.alpha2 * K["K2"] + p.alpha4 * K["K4"]) - p.alpha3 * K["K3"] - p.alpha5 * K["K5"]
        return vt - sigma * ramp * (v - edge)

    base = float(np.abs(u).max())
    for _ in range(steps):
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * dt * k1)
        k3 = rhs(u + 0.5 * dt * k2)
        k4 = rhs(u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(u)) or np.abs(u).max() > 10.0 * base:
            raise InstabilityError("norm blow-up in short-time integration")
    out = u[nw : nw + n]
    if return_info:
        return out, {"dt_bound": lim, "widen_nodes": nw}
    return out
