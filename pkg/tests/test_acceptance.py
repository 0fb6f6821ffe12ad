"""
Circulant Spectra - Long-Run Acceptance Tests

Sweeps large enough to check statistics and counting at scale. All marked
slow; run with `pytest -m slow`.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import brentq

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from circulant_spectra.graph import MetricGraph, random_spec, validate_spec
from circulant_spectra.models import INTERIOR
from circulant_spectra.secular import assemble_M, factorized_det, slogdet_M_batch
from circulant_spectra.solver import (
    roots_p,
    spectrum_generic,
    spectrum_symmetric,
    subspectrum_mode,
    unfold,
    weyl_check,
)
from circulant_spectra.stats import r2_estimate, r2_large_model, sup_distance

pytestmark = pytest.mark.slow


def dense_scan_roots(g: MetricGraph, kmax: float, step: float = 1e-4) -> np.ndarray:
    """Independent root list: fine sign scan of det M, then brentq."""
    ks = np.arange(step, kmax, step)
    sign, _ = slogdet_M_batch(g, ks, check=False)
    changes = np.flatnonzero(sign[:-1] * sign[1:] < 0)

    # sign flips across a Dirichlet point are poles, not roots
    poles = np.sort(
        np.concatenate([np.arange(1, int(kmax * ell / math.pi) + 1) * math.pi / ell for ell in g.lengths])
    )
    lo, hi = ks[changes], ks[changes + 1]
    straddles = np.searchsorted(poles, lo) != np.searchsorted(poles, hi)
    lo, hi = lo[~straddles], hi[~straddles]

    def det(k):
        s, logabs = slogdet_M_batch(g, np.array([k]), check=False)
        return s[0] * math.exp(logabs[0])

    return np.array([brentq(det, a, b, xtol=1e-13) for a, b in zip(lo, hi)])


def random_graph_set(count: int = 20):
    """Seeded symmetric graphs with n in 5..15 and d >= 2."""
    graphs = []
    seed = 0
    while len(graphs) < count:
        seed += 1
        n = 5 + seed % 11
        spec = random_spec(n, 0.5, seed=seed)
        if spec.d >= 2:
            graphs.append(MetricGraph.random_uniform(spec, 1.0, 1.5, seed=seed, symmetric=True))
    return graphs


def away_from_poles(g: MetricGraph, ks: np.ndarray, margin: float = 1e-3) -> np.ndarray:
    phase = np.multiply.outer(ks, g.class_lengths) / math.pi
    distance = np.abs(phase - np.round(phase)).min(axis=1)
    return ks[distance > margin]


class TestFactorization:
    """Tests for the representation factorization over a random graph set."""

    def test_det_matches_factorization(self):
        """Test det M(k) against the product of p_j at 100 random k per graph."""
        rng = np.random.default_rng(17)
        for g in random_graph_set():
            for k in away_from_poles(g, rng.uniform(0.1, 30.0, size=100)):
                direct = np.linalg.det(assemble_M(g, k).entries)
                assert abs(factorized_det(g, k) - direct) <= 1e-9 * max(1.0, abs(direct))


class TestGenericAgainstOracle:
    """Tests for spectrum_generic against a dense sign scan."""

    @pytest.mark.parametrize("n,a,seed", [(5, [1, 2], 11), (7, [1, 2, 3], 12)])
    def test_root_for_root(self, n, a, seed):
        """Test every root over (0, 50) agrees to 1e-9."""
        g = MetricGraph.random_uniform(validate_spec(n, a), 1.0, 1.5, seed=seed)
        solved = spectrum_generic(g, 50.0).ks
        oracle = dense_scan_roots(g, 50.0)
        assert solved.size == oracle.size
        assert np.max(np.abs(solved - oracle)) < 1e-9


class TestWeylAtScale:
    """Tests for counting over long sweeps."""

    @pytest.mark.parametrize("kmax", [50.0, 100.0])
    def test_random_graph_set(self, kmax):
        """Test both pipelines stay within nd + n + d of the Weyl estimate."""
        for g in random_graph_set():
            symmetric = spectrum_symmetric(g, kmax)
            assert abs(symmetric.count - kmax * g.total_length / math.pi) <= g.n * g.d + g.n + g.d
            generic_graph = MetricGraph.random_uniform(g.spec, 1.0, 1.5, seed=g.n)
            generic = spectrum_generic(generic_graph, kmax)
            assert generic.count_check.within

    def test_generic_c6(self):
        """Test C6(1,2) with lengths in (1, 1.5) stays within nd + n of the Weyl estimate."""
        g = MetricGraph.random_uniform(validate_spec(6, [1, 2]), 1.0, 1.5, seed=5)
        result = spectrum_generic(g, 100.0)
        check = weyl_check(g, result.count, 100.0)
        assert check.bound == 18
        assert check.within


class TestGOEStatistics:
    """Tests for the spacing statistics of a large random-length graph."""

    def test_c49_integrated_nnsd(self):
        """Test the integrated NNSD of C49 is within 0.02 of the Wigner CDF."""
        g = MetricGraph.random_uniform(validate_spec(49, [3, 4, 9, 12, 15, 19, 20]), 1.0, 1.5, seed=7)
        kmax = 2.05e4 * math.pi / g.total_length
        result = spectrum_generic(g, kmax)
        assert result.count >= 20000
        assert sup_distance(unfold(result), np.linspace(0.0, 4.0, 401)) < 0.02


class TestIntermediateStatistics:
    """Tests for R2 of one interior subspectrum of a large prime circulant."""

    def test_interior_subspectrum_r2(self):
        """Test level repulsion near 0 and the large-x law on (3, 10)."""
        spec = random_spec(401, 0.5, seed=9)
        g = MetricGraph.random_uniform(spec, 1.0, 1.5, seed=9, symmetric=True)
        assert subspectrum_mode(g, 1) == INTERIOR

        density = g.total_length / (math.pi * g.n)
        kmax = 2.05e5 / density
        entries = roots_p(g, 1, kmax)
        assert len(entries) >= 200000

        r2 = r2_estimate(unfold(entries, INTERIOR, graph=g), xmax=10.0, bins=100)
        x, values = r2.bin_centers, r2.values
        assert np.mean(values[x < 0.1]) < 0.3
        tail = (x > 3.0) & (x < 10.0)
        assert np.mean(np.abs(values[tail] - r2_large_model(x[tail], INTERIOR))) < 0.01


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-m", "slow"])
