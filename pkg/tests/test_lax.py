from __future__ import annotations

import numpy as np
import pytest

from gfonls.errors import BranchPointError, NonCommutingError
from gfonls.lax import (
    build_U_boundary,
    build_V_boundary,
    calibrate,
    commutator_defect,
    fitted_dispersion_terms,
    omega_from_lax,
)
from gfonls.spectral import ModelParams, dispersion_omega, lambda_of_z

P1 = ModelParams(1.0, 0.0, 0.0, 0.0, 1.0)


def test_U_examples():
    U = build_U_boundary(2, P1)
    np.testing.assert_allclose(U, [[0.75j, 1], [-1, -0.75j]])
    ev = np.sort_complex(np.linalg.eigvals(U))
    np.testing.assert_allclose(ev, [-1.25j, 1.25j], atol=1e-14)
    Ui = build_U_boundary(2, ModelParams(1, 0, 0, 0, 1j))
    np.testing.assert_allclose(Ui, [[0.75j, 1j], [1j, -0.75j]])


def test_V_nls_is_minus_2k_U():
    V = build_V_boundary(2, P1)
    np.testing.assert_allclose(V, -1.5 * build_U_boundary(2, P1), atol=1e-15)
    ev = np.sort_complex(np.linalg.eigvals(V))
    np.testing.assert_allclose(ev, [-1.875j, 1.875j], atol=1e-14)


def test_V_mkdv():
    p = ModelParams(0, 1, 0, 0, 1.0)
    V = build_V_boundary(2, p)
    np.testing.assert_allclose(V, 0.25 * build_U_boundary(2, p), atol=1e-15)


def test_V_zero():
    assert not np.any(build_V_boundary(1.3 + 0.2j, ModelParams(0, 0, 0, 0, 0.7)))


def test_omega_examples():
    assert omega_from_lax(2, P1) == pytest.approx(-1.5)
    assert omega_from_lax(2, ModelParams(0, 1, 0, 0, 1.0)) == pytest.approx(0.25)
    # alpha4 alone: -8k^3 + 4k psi0^2 (opposite sign to the printed polynomial)
    assert omega_from_lax(2, ModelParams(0, 0, 1, 0, 1.0)) == pytest.approx(-8 * 0.75**3 + 3.0)


def test_branch_point():
    with pytest.raises(BranchPointError):
        omega_from_lax(1j, P1)


def test_literal_assembly_does_not_commute():
    p = ModelParams(1, 0.01, 0.01, 0.01, 1.0)
    assert commutator_defect(1.3 + 0.7j, p, "literal") > 1e-3
    with pytest.raises(NonCommutingError):
        omega_from_lax(1.3 + 0.7j, p, "literal")


def test_commutes_all_configs(rng):
    for _ in range(100):
        a = rng.normal(size=4)
        pm = rng.uniform(0.2, 2.5) * np.exp(1j * rng.uniform(-3, 3))
        p = ModelParams(*a, pm)
        z = rng.uniform(0.2, 4) * np.exp(1j * rng.uniform(-3, 3))
        assert commutator_defect(z, p) <= 1e-10


def test_involution_invariance(rng):
    p = ModelParams(0.7, -0.3, 0.2, 0.1, 0.8 * np.exp(0.4j))
    for _ in range(30):
        z = rng.uniform(0.3, 3) * np.exp(1j * rng.uniform(-3, 3))
        zi = -p.psi0**2 / z
        a = lambda_of_z(z, p) * omega_from_lax(z, p)
        b = lambda_of_z(zi, p) * omega_from_lax(zi, p)
        # lambda flips sign, Omega depends on k only: lambda*Omega is odd
        assert abs(a + b) <= 1e-10 * max(1, abs(a))


def test_fitted_terms_match_closed_form():
    for psi0 in (1.0, 0.6, 2.0):
        p = ModelParams(0, 0, 0, 0, psi0)
        s2 = psi0**2
        want = np.array([
            [0, -2, 0, 0, 0],
            [-2 * s2, 0, 4, 0, 0],
            [0, 4 * s2, 0, -8, 0],
            [6 * s2 * s2, 0, -8 * s2, 0, 16],
        ])
        np.testing.assert_allclose(fitted_dispersion_terms(p), want, atol=1e-9)


def test_lax_mode_dispersion_equals_eigenvalue(rng):
    p = ModelParams(1, 0.3, -0.2, 0.1, 0.9)
    for _ in range(20):
        z = rng.uniform(0.3, 3) * np.exp(1j * rng.uniform(-3, 3))
        assert dispersion_omega(z, p, "lax") == pytest.approx(omega_from_lax(z, p), rel=1e-9, abs=1e-9)


def test_calibrate_verdicts(rng):
    z = rng.uniform(0.3, 3, 50) * np.exp(1j * rng.uniform(-3, 3, 50))
    assert calibrate(ModelParams(1, 0, 0, 0, 1.0), z).verdict == "printed-consistent"
    assert calibrate(ModelParams(0, 1, 0, 0, 1.0), z).verdict == "printed-consistent"
    res = calibrate(ModelParams(1, 0.01, 0.01, 0.01, 1.0), z)
    assert res.verdict == "printed-inconsistent"
    terms = {d["term"]: d["discrepancy"] for d in res.reports[0].per_term}
    assert terms["alpha2"] < 1e-12 and terms["alpha3"] < 1e-12
    assert terms["alpha4"] > 1e-6 and terms["alpha5"] > 1e-6


def test_calibrate_keeps_going_on_bad_points():
    res = calibrate(P1, [2.0, 1j, 1.5 + 0.5j])
    assert [r.ok for r in res.reports] == [True, False, True]
    assert res.reports[1].error.startswith("BranchPointError")
    assert res.verdict == "printed-inconsistent"
