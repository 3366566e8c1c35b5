from __future__ import annotations

import os

import numpy as np
import pytest

from gfonls.engine import EngineConfig, EngineOptions
from gfonls.spectral import ModelParams
from gfonls.spectrum import DoubleSpectrum, SimpleSpectrum

os.environ.setdefault("MPLBACKEND", "Agg")

ALPHAS = (1.0, 0.01, 0.01, 0.01)
CALIBRATED = EngineOptions(sign="standard", dispersion="hierarchy", gauge="gauge_fixed")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def p1():
    return ModelParams(1.0, 0.0, 0.0, 0.0, 1.0)


@pytest.fixture
def p_all():
    return ModelParams(*ALPHAS, 1.0)


@pytest.fixture
def fig2a():
    return EngineConfig(ModelParams(*ALPHAS, 1.0), SimpleSpectrum(((1.5j, 1.0),)), CALIBRATED)


@pytest.fixture
def fig4a():
    return EngineConfig(
        ModelParams(*ALPHAS, 1.0), SimpleSpectrum(((0.2 + 2j, 1.0), (1 + 1j, 1.0))), CALIBRATED
    )


@pytest.fixture
def fig9a():
    return EngineConfig(ModelParams(*ALPHAS, 1.0), DoubleSpectrum(((1.5j, 1.0, 1.0),)), CALIBRATED)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
