"""
Test configuration and fixtures
"""

import glogger
import numpy as np
import pytest

from dirac_warp.angular import PartialWaveIndex, SphereQuadrature
from dirac_warp.fields import RadialGrid
from dirac_warp.manifold import CONICAL, FLAT, HYPERBOLIC
from dirac_warp.models.config import EvolutionConfig
from dirac_warp.utils import gaussian_bump


class RecordingProvider:
    """Log provider that keeps every entry in memory."""

    def __init__(self):
        self.entries = []

    def initialize(self, config):
        return True

    def log(self, entry):
        self.entries.append(entry)
        return True

    def flush(self):
        pass

    def close(self):
        pass

    @property
    def name(self):
        return "recording"

    @property
    def supports_structured_logging(self):
        return True

    def messages(self, component=None):
        return [
            e.message for e in self.entries if component is None or e.context.component == component
        ]


@pytest.fixture
def log_records(monkeypatch):
    """Route every glogger logger to an in-memory provider for the duration of a test"""
    provider = RecordingProvider()
    monkeypatch.setattr(glogger._factory, "provider", provider)
    return provider


@pytest.fixture
def grid():
    """Default grid: R_max = 10, dr = 0.025"""
    return RadialGrid(400, 0.025)


@pytest.fixture
def coarse_grid():
    """Small grid for evolution tests: R_max = 8, dr = 0.05"""
    return RadialGrid(160, 0.05)


@pytest.fixture(params=[FLAT, HYPERBOLIC, CONICAL], ids=lambda w: w.name)
def warp(request):
    """Every built-in warp that satisfies the structural assumptions"""
    return request.param


@pytest.fixture
def curved_warps():
    return [HYPERBOLIC, CONICAL]


@pytest.fixture
def quadrature():
    """Exact for spherical polynomials of degree <= 12"""
    return SphereQuadrature(12)


@pytest.fixture
def halfspin_index():
    return PartialWaveIndex(0.5, 0.5, 1)


@pytest.fixture
def short_evolution():
    return EvolutionConfig(dt=0.01, T=0.2, sample_stride=5)


@pytest.fixture
def bump():
    """w-profile factory: amplitude * r * exp(-(r - r0)^2 / width^2)"""

    def make(r, r0=3.0, width=0.5, phase=0.0, amplitude=1.0):
        return gaussian_bump(np.asarray(r), r0, width, phase, amplitude)

    return make
