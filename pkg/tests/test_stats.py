"""
Circulant Spectra - Statistics Tests

Estimators are checked on sequences whose statistics are known exactly
(picket fence) or in distribution (Poisson, Wigner-distributed gaps).
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import quad

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from circulant_spectra.errors import DomainViolation, NoBracket, TooFewLevels, XmaxTooLarge
from circulant_spectra.models import EDGE, INTERIOR, R2Estimate, UnfoldedSpectrum
from circulant_spectra.stats import (
    fit_small_c,
    form_factor_maclaurin,
    form_factor_theory,
    integrated_nnsd,
    mean_cos_squared,
    nnsd,
    poisson_nnsd,
    r2_estimate,
    r2_large_model,
    r2_small_model,
    sup_distance,
    wigner_goe,
    wigner_goe_cdf,
)


def synthetic_r2(c: float, noise: float = 0.0, seed: int = 0) -> R2Estimate:
    """R2 estimate that follows the small-x law exactly on [0, 10]."""
    centers = (np.arange(200) + 0.5) * 0.05
    values = np.log(centers / c) ** 2 * centers / np.pi
    if noise:
        values = values + np.random.default_rng(seed).normal(0.0, noise, size=values.size)
    return R2Estimate(bin_centers=centers, values=values, pair_count=0, xmax=10.0, sequence_length=0)


class TestReferenceCurves:
    """Tests for the closed-form reference distributions."""

    def test_wigner_normalized(self):
        """Test the Wigner surmise has unit mass and unit mean."""
        mass, _ = quad(wigner_goe, 0, np.inf)
        mean, _ = quad(lambda s: s * wigner_goe(s), 0, np.inf)
        assert mass == pytest.approx(1.0)
        assert mean == pytest.approx(1.0)

    def test_wigner_cdf(self):
        """Test the CDF matches the integral of the density."""
        for s in (0.3, 1.0, 2.5):
            integral, _ = quad(wigner_goe, 0, s)
            assert wigner_goe_cdf(s) == pytest.approx(integral)
        assert wigner_goe_cdf(0.0) == 0.0

    def test_level_repulsion(self):
        """Test P(0) = 0 for GOE and 1 for Poisson."""
        assert wigner_goe(0.0) == 0.0
        assert poisson_nnsd(0.0) == 1.0

    def test_vectorized(self):
        """Test arrays in, arrays out."""
        assert wigner_goe(np.array([0.5, 1.0])).shape == (2,)

    def test_negative_spacing(self):
        """Test negative spacings are rejected."""
        with pytest.raises(ValueError):
            wigner_goe(-0.1)
        with pytest.raises(ValueError):
            poisson_nnsd([-1.0])


class TestNNSD:
    """Tests for the spacing histogram and its CDF."""

    def test_picket_fence(self, picket_fence):
        """Test all mass of a picket fence lands in the bin holding s = 1."""
        hist = nnsd(picket_fence(500), bins=40, smax=4.0)
        nonzero = np.flatnonzero(hist.counts)
        assert nonzero.size == 1
        assert abs(hist.bin_centers[nonzero[0]] - 1.0) <= 0.1
        assert np.sum(hist.density * np.diff(hist.bin_edges)) == pytest.approx(1.0)

    def test_poisson_histogram(self, poisson_sequence):
        """Test Poisson gaps follow exp(-s)."""
        hist = nnsd(poisson_sequence(100000, seed=1), bins=40, smax=4.0)
        assert np.max(np.abs(hist.density - np.exp(-hist.bin_centers))) < 0.06

    def test_poisson_cdf(self, poisson_sequence):
        """Test the integrated NNSD of Poisson gaps against 1 - exp(-s)."""
        grid = np.linspace(0.0, 4.0, 81)
        cdf = integrated_nnsd(poisson_sequence(20000, seed=2), grid)
        assert np.max(np.abs(cdf + np.expm1(-grid))) < 0.02

    def test_integrated_step(self, picket_fence):
        """Test the CDF of a picket fence is a step at s = 1."""
        assert list(integrated_nnsd(picket_fence(50), [0.5, 1.0, 1.5])) == [0.0, 1.0, 1.0]

    def test_sup_distance_goe_gaps(self):
        """Test Wigner-distributed gaps sit close to the Wigner CDF."""
        rng = np.random.default_rng(3)
        gaps = np.sqrt(-4.0 * np.log1p(-rng.random(20000)) / np.pi)
        u = UnfoldedSpectrum(values=np.cumsum(gaps), density_used=1.0)
        assert sup_distance(u, np.linspace(0.0, 4.0, 401)) < 0.02

    def test_sup_distance_poisson(self, poisson_sequence):
        """Test Poisson gaps are far from the Wigner CDF."""
        assert sup_distance(poisson_sequence(20000), np.linspace(0.0, 4.0, 401)) > 0.1

    def test_too_few_levels(self):
        """Test a single level has no gaps."""
        with pytest.raises(TooFewLevels):
            nnsd(UnfoldedSpectrum(values=np.array([1.0]), density_used=1.0))


class TestR2:
    """Tests for the two-point correlation estimator."""

    def test_picket_fence(self, picket_fence):
        """Test a picket fence gives spikes at the integers with weight (N-k)/N."""
        N = 1000
        r2 = r2_estimate(picket_fence(N), xmax=5.0, bins=50)
        nonzero = np.flatnonzero(r2.values)
        assert nonzero.size == 5
        centers = r2.bin_centers[nonzero]
        assert np.all(np.abs(centers - np.arange(1, 6)) <= r2.bin_width)
        weights = r2.values[nonzero] * r2.bin_width
        assert weights == pytest.approx([(N - k) / N for k in range(1, 6)])
        assert r2.pair_count == 2 * (5 * N - 15)
        assert r2.sequence_length == N

    def test_poisson_flat(self, poisson_sequence):
        """Test R2 of a Poisson sequence is flat at 1."""
        r2 = r2_estimate(poisson_sequence(20000, seed=4), xmax=5.0, bins=10)
        assert np.max(np.abs(r2.values - 1.0)) < 0.05

    def test_too_few_levels(self, picket_fence):
        """Test fewer than 100 levels are refused."""
        with pytest.raises(TooFewLevels):
            r2_estimate(picket_fence(99), xmax=1.0, bins=10)

    def test_xmax_too_large(self, picket_fence):
        """Test xmax above 10% of the span is refused."""
        with pytest.raises(XmaxTooLarge):
            r2_estimate(picket_fence(200), xmax=50.0, bins=10)


class TestR2Models:
    """Tests for the small-x and large-x laws and the form factor."""

    def test_small_model_value(self):
        """Test a reference value of the small-x law."""
        assert r2_small_model(0.1, 5.5145) == pytest.approx(0.51184, rel=1e-4)

    def test_small_model_domain(self):
        """Test the small-x law is only defined on 0 < x < c."""
        with pytest.raises(DomainViolation):
            r2_small_model(6.0, 5.5)
        with pytest.raises(DomainViolation):
            r2_small_model([0.0, 0.1], 5.5)

    def test_large_model(self):
        """Test the large-x expansions."""
        assert r2_large_model(10.0, INTERIOR) == pytest.approx(1.0020259104, rel=1e-10)
        edge = 1 + 2 / (100 * math.pi**2) + 4 / (10000 * math.pi**4)
        assert r2_large_model(10.0, EDGE) == pytest.approx(edge)

    def test_large_model_rep_class(self):
        """Test an unknown representation class is rejected."""
        with pytest.raises(ValueError):
            r2_large_model(10.0, "full")

    def test_form_factor_origin(self):
        """Test K(0) = 1 for both classes."""
        assert form_factor_theory(0.0, INTERIOR) == pytest.approx(1.0)
        assert form_factor_theory(0.0, EDGE) == pytest.approx(1.0)

    def test_maclaurin_interior(self):
        """Test the interior form factor expansion."""
        coefficients = form_factor_maclaurin(4, INTERIOR)
        assert coefficients == pytest.approx([1, -4, 10, -2 / 3, -28 / 3], abs=1e-9)

    def test_maclaurin_edge(self):
        """Test the edge form factor expansion."""
        coefficients = form_factor_maclaurin(4, EDGE)
        assert coefficients == pytest.approx([1, -4, 12, 16 / 3, 0], abs=1e-9)

    def test_mean_cos_squared(self):
        """Test the average against a direct sum."""
        n, a = 7, 2
        direct = np.mean([math.cos(2 * math.pi * j * a / n) ** 2 for j in range(1, n)])
        assert mean_cos_squared(n) == pytest.approx(5 / 12)
        assert mean_cos_squared(n) == pytest.approx(direct)
        with pytest.raises(ValueError):
            mean_cos_squared(8)


class TestFitSmallC:
    """Tests for the least-squares fit of the small-x constant."""

    def test_exact_recovery(self):
        """Test c is recovered from noiseless data."""
        result = fit_small_c(synthetic_r2(5.5), window=(0.02, 0.5))
        assert result.c == pytest.approx(5.5, rel=1e-6)
        assert result.residual == pytest.approx(0.0, abs=1e-12)
        assert set(result.window_sensitivity) == {"xhi*0.8", "xhi*1.25"}
        assert all(abs(v) < 1e-6 for v in result.window_sensitivity.values())

    def test_noisy_recovery(self):
        """Test c is recovered to a few percent from noisy data."""
        result = fit_small_c(synthetic_r2(5.5, noise=0.005, seed=1), window=(0.02, 0.5))
        assert result.c == pytest.approx(5.5, rel=0.05)

    def test_no_bracket(self):
        """Test a minimum on the edge of the search range raises NoBracket."""
        r2 = synthetic_r2(5.5)
        r2.values[:] = 1e6
        with pytest.raises(NoBracket):
            fit_small_c(r2, window=(0.02, 0.5))

    def test_window_too_narrow(self):
        """Test a window with fewer than 5 bins is refused."""
        with pytest.raises(DomainViolation):
            fit_small_c(synthetic_r2(5.5), window=(0.02, 0.1))

    def test_window_inverted(self):
        """Test an inverted window is refused."""
        with pytest.raises(DomainViolation):
            fit_small_c(synthetic_r2(5.5), window=(0.5, 0.1))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
