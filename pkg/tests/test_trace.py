from __future__ import annotations

import numpy as np
import pytest

from gfonls.errors import PoleError
from gfonls.spectral import ModelParams
from gfonls.spectrum import DoubleSpectrum, SimpleSpectrum
from gfonls.trace import (
    contour_points,
    evaluate_trace,
    s11_origin_limit,
    s11_reflectionless,
    s22_reflectionless,
)

P1 = ModelParams(1.0, 0.0, 0.0, 0.0, 1.0)
SP = SimpleSpectrum(((1.5j, 1.0),))


def test_example_value():
    assert s11_reflectionless(2.0, SP, P1) == pytest.approx(0.8 - 0.6j, abs=1e-15)


def test_zeros_at_eigenvalues():
    sp = SimpleSpectrum(((1 + 1j, 1.0), (-0.3 + 2j, 2.0)))
    p = ModelParams(1, 0, 0, 0, 0.8)
    for z in sp.zs:
        assert abs(s11_reflectionless(z, sp, p)) < 1e-15
        assert abs(s11_reflectionless(-p.psi0**2 / np.conj(z), sp, p)) < 1e-15


def test_poles_rejected():
    with pytest.raises(PoleError):
        s11_reflectionless(-1.5j, SP, P1)
    with pytest.raises(PoleError):
        s22_reflectionless(1.5j, SP, P1)


def test_unit_modulus_on_real_line():
    p = ModelParams(1, 0, 0, 0, 0.7 * np.exp(0.2j))
    z = contour_points("real", 400, p)
    for sp in (
        SimpleSpectrum(((1 + 1j, 1.0), (0.1 + 1.5j, 1.0))),
        DoubleSpectrum(((1 + 1j, 1.0, 0.0), (0.1 + 1.5j, 1.0, 0.0))),
    ):
        s11 = s11_reflectionless(z, sp, p)
        assert np.max(np.abs(np.abs(s11) - 1)) < 1e-12
        assert np.max(np.abs(s11 * s22_reflectionless(z, sp, p) - 1)) < 1e-12


def test_unit_modulus_on_circle_symmetric_spectra():
    # |s11| = 1 on |z| = psi0 needs the spectrum closed under z -> -z*
    p = ModelParams(1, 0, 0, 0, 1.0)
    z = contour_points("circle", 400, p)
    for sp in (
        SimpleSpectrum(((1.5j, 1.0),)),
        SimpleSpectrum(((1 + 1j, 1.0), (-1 + 1j, 1.0))),
        DoubleSpectrum(((1.5j, 1.0, 1.0),)),
    ):
        assert np.max(np.abs(np.abs(s11_reflectionless(z, sp, p)) - 1)) < 1e-12


def test_circle_conjugation_identity_general():
    p = ModelParams(1, 0, 0, 0, 0.7 * np.exp(0.2j))
    z = contour_points("circle", 400, p)
    for sp in (
        SimpleSpectrum(((1 + 1j, 1.0), (0.1 + 1.5j, 1.0))),
        DoubleSpectrum(((1 + 1j, 1.0, 0.0), (0.1 + 1.5j, 1.0, 0.0))),
    ):
        s11 = s11_reflectionless(z, sp, p)
        other = s11_reflectionless(np.conj(z), sp, p)
        assert np.max(np.abs(s11 * np.conj(other) - 1)) < 1e-12
        # an asymmetric spectrum is not unimodular there
        assert np.max(np.abs(np.abs(s11) - 1)) > 1e-2


def test_s22_symmetry(rng):
    sp = SimpleSpectrum(((1 + 1j, 1.0), (0.1 + 1.5j, 1.0)))
    z = rng.normal(size=30) + 1j * rng.normal(size=30)
    np.testing.assert_allclose(
        s11_reflectionless(z, sp, P1), np.conj(s22_reflectionless(np.conj(z), sp, P1)), rtol=1e-12
    )


def test_double_derivative_vanishes():
    dp = DoubleSpectrum(((1 + 1j, 1.0, 0.0),))
    h = 1e-4
    z = 1 + 1j
    d = (s11_reflectionless(z + h, dp, P1) - s11_reflectionless(z - h, dp, P1)) / (2 * h)
    assert abs(d) < 1e-7


def test_empty_spectrum():
    assert s11_reflectionless(2.0, SimpleSpectrum(()), P1) == 1.0
    assert s22_reflectionless(2.0, SimpleSpectrum(()), P1) == 1.0


def test_double_is_square_of_simple(rng):
    zs = ((1 + 1j, 1.0), (0.2 + 2j, 1.0))
    sp = SimpleSpectrum(zs)
    dp = DoubleSpectrum(tuple((z, a, 0.0) for z, a in zs))
    z = rng.normal(size=20) + 1j * rng.normal(size=20)
    np.testing.assert_allclose(s11_reflectionless(z, dp, P1), s11_reflectionless(z, sp, P1) ** 2, rtol=1e-13)


def test_origin_limit():
    sp = SimpleSpectrum(((1 + 1j, 1.0), (0.3 + 2j, 1.0)))
    lim = s11_origin_limit(sp)
    assert s11_reflectionless(1e-9 + 1e-9j, sp, P1) == pytest.approx(lim, abs=1e-7)
    assert s11_origin_limit(SimpleSpectrum(((1j, 1.0),))) == pytest.approx(1.0)


def test_contour_points_exclude_origin():
    z = contour_points("real", 10, P1, radius=5)
    assert np.all(z != 0) and z.min().real > -5 and z.max().real < 5
    with pytest.raises(ValueError):
        contour_points("square", 10, P1)


def test_evaluate_trace_records():
    out = evaluate_trace([2.0, -3.0], SP, P1)
    assert [e.pole_order for e in out] == ["simple", "simple"]
    assert out[0].s11 == pytest.approx(0.8 - 0.6j)
    assert out[0].s11 * out[0].s22 == pytest.approx(1.0)
