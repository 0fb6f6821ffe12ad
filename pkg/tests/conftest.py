"""
Circulant Spectra - Shared Test Fixtures

Graph fixtures and seeded reference sequences (picket fence, Poisson) used
across the test suite.
"""

import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from circulant_spectra import config
from circulant_spectra.graph import MetricGraph, validate_spec
from circulant_spectra.models import UnfoldedSpectrum


@pytest.fixture
def c5_equal():
    """C5(1,2) = K5 with every edge of length 1."""
    return MetricGraph.symmetric(validate_spec(5, [1, 2]), [1.0, 1.0])


@pytest.fixture
def c5_symmetric():
    """C5(1,2) with class lengths (1, 1.05)."""
    return MetricGraph.symmetric(validate_spec(5, [1, 2]), [1.0, 1.05])


@pytest.fixture
def c6_symmetric():
    """C6(1,2) with class lengths (1, 1.1); even n."""
    return MetricGraph.symmetric(validate_spec(6, [1, 2]), [1.0, 1.1])


@pytest.fixture
def c5_generic():
    """C5(1,2) with seeded per-edge lengths in (1, 1.5)."""
    return MetricGraph.random_uniform(validate_spec(5, [1, 2]), 1.0, 1.5, seed=3)


@pytest.fixture
def picket_fence():
    """Equally spaced unfolded sequence 0, 1, ..., N-1."""

    def make(N: int, offset: float = 0.0) -> UnfoldedSpectrum:
        return UnfoldedSpectrum(values=np.arange(N, dtype=float) + offset, density_used=1.0)

    return make


@pytest.fixture
def poisson_sequence():
    """Seeded sequence with iid unit-mean exponential gaps."""

    def make(N: int, seed: int = 0) -> UnfoldedSpectrum:
        rng = np.random.default_rng(seed)
        return UnfoldedSpectrum(values=np.cumsum(rng.exponential(1.0, size=N)), density_used=1.0)

    return make


@pytest.fixture
def temp_db():
    """Create a temporary checkpoint database."""
    fd, path = tempfile.mkstemp(suffix=".db")
    os.close(fd)
    yield path
    os.unlink(path)


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Point relative artifact paths at a temporary directory."""
    monkeypatch.setattr(config, "CIRC_OUTPUT_DIR", str(tmp_path))
    return tmp_path
