from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gfonls.errors import SpectrumError
from gfonls.spectral import ModelParams, Region, region_of
from gfonls.spectrum import (
    DoubleSpectrum,
    SimpleSpectrum,
    expand_double,
    expand_simple,
    format_phase,
    recover_a_plus,
    theta_condition,
    theta_condition_raw,
    validate,
)

P1 = ModelParams(1.0, 0.0, 0.0, 0.0, 1.0)


def test_expand_simple_example():
    es = expand_simple(SimpleSpectrum(((1.5j, 1),)), P1)
    np.testing.assert_allclose(es.xi, [1.5j, -2j / 3])
    np.testing.assert_allclose(es.xi_hat, [2j / 3, -1.5j])
    np.testing.assert_allclose(es.a_minus_hat, [-4 / 9, -1])


def test_expand_empty():
    es = expand_simple(SimpleSpectrum(()), P1)
    assert es.size == 0
    assert expand_double(DoubleSpectrum(()), P1).size == 0


def test_circle_eigenvalue_rejected():
    with pytest.raises(SpectrumError) as ei:
        expand_simple(SimpleSpectrum(((np.exp(1j * math.pi / 4), 1),)), P1)
    assert any("ψ0" in v for v in ei.value.violations)


def test_expand_double_example():
    es = expand_double(DoubleSpectrum(((1.5j, 1, 1),)), P1)
    assert es.a_minus_hat[0] == pytest.approx(1 / 5.0625)
    assert es.a_minus_hat[1] == pytest.approx(-1)
    assert es.b_minus_hat[0] == pytest.approx(-2.25 - 3j)
    assert es.b_minus_hat[1] == pytest.approx(1)


def test_round_trip_a_plus():
    p = ModelParams(1, 0, 0, 0, 0.7 * np.exp(0.9j))
    for sp, ex in (
        (SimpleSpectrum(((1 + 1j, 0.3 - 2j), (-0.4 + 2j, 1.1))), expand_simple),
        (DoubleSpectrum(((1 + 1j, 0.3 - 2j, 0.5), (-0.4 + 2j, 1.1, -1j))), expand_double),
    ):
        es = ex(sp, p)
        np.testing.assert_allclose(recover_a_plus(es, p), sp.a_plus, rtol=1e-12)


def test_theta_condition_examples():
    assert theta_condition(SimpleSpectrum(((1.5j, 1),))) == 0.0
    assert theta_condition_raw(SimpleSpectrum(((1.5j, 1),))) == pytest.approx(2 * math.pi)
    assert theta_condition(SimpleSpectrum(((np.exp(1j * math.pi / 4), 1),))) == pytest.approx(math.pi)
    assert theta_condition(DoubleSpectrum(((1.5j, 1, 1),))) == 0.0
    assert format_phase(0.0, 2 * math.pi) == "2π"
    assert format_phase(math.pi) == "π"
    assert format_phase(0.0, 0.0) == "0"


def test_validate_examples():
    assert validate(SimpleSpectrum(((1.5j, 1),)), P1) == []
    assert validate(SimpleSpectrum(((0.5j, 1),)), P1) == ["|z1| ≤ ψ0 (|z1|=0.5, ψ0=1)"]
    v = validate(SimpleSpectrum(((1.5j, 1), (-2j / 3, 1))), P1)
    assert "z2 not in fundamental domain (Im ≤ 0)" in v


def test_validate_collisions_and_norming():
    v = validate(SimpleSpectrum(((1.5j, 1), (1.5j + 1e-10, 1))), P1)
    assert any("coincide" in s for s in v)
    v = validate(SimpleSpectrum(((1.5j, 0),)), P1)
    assert any("nonzero" in s for s in v)


fund = st.builds(
    lambda r, a: r * np.exp(1j * a), st.floats(1.05, 4.0), st.floats(0.05, math.pi - 0.05)
)


@settings(max_examples=100, deadline=None)
@given(st.lists(fund, min_size=1, max_size=3), st.floats(0.3, 1.0), st.booleans())
def test_closure_and_regions(zs, psi0, double):
    p = ModelParams(1, 0, 0, 0, psi0)
    if double:
        sp = DoubleSpectrum(tuple((z, 1.0, 0.5) for z in zs))
    else:
        sp = SimpleSpectrum(tuple((z, 1.0) for z in zs))
    if validate(sp, p):
        return
    es = expand_double(sp, p) if double else expand_simple(sp, p)
    pts = np.concatenate([es.xi, es.xi_hat])
    for img in (np.conj(pts), -psi0**2 / pts):
        d = np.abs(img[:, None] - pts[None, :]).min(axis=1)
        assert d.max() <= 1e-12 * max(1.0, np.abs(pts).max())
    assert all(region_of(x, p) is Region.DPLUS for x in es.xi)
    assert all(region_of(x, p) is Region.DMINUS for x in es.xi_hat)
    n = len(zs)
    np.testing.assert_allclose(es.xi_hat[n:], np.conj(zs), rtol=1e-12)
    np.testing.assert_allclose(es.a_minus_hat[n:], -np.conj(sp.a_plus), rtol=1e-12)
