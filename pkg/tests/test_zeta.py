"""
Circulant Spectra - Zeta Function Tests

Zeta values are cross-checked between the symmetric and generic integrands,
against truncated eigenvalue sums, under graph isomorphism and under scaling
of the lengths. Determinants are checked against the exact spanning-tree
coefficient.
"""

import math
import sys
import warnings
from pathlib import Path
from unittest.mock import patch

import pytest
from scipy.integrate import IntegrationWarning

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from circulant_spectra import zeta as zeta_module
from circulant_spectra.errors import (
    ArgumentOutOfRange,
    DegenerateC,
    NumericalSignError,
    PoleAtOne,
    QuadratureFailure,
)
from circulant_spectra.graph import MetricGraph, validate_spec
from circulant_spectra.models import CLOSED_FORM, NUMERIC_ZETA_PRIME
from circulant_spectra.secular import representations
from circulant_spectra.solver import spectrum_generic, spectrum_symmetric
from circulant_spectra.zeta import (
    determinant_closed_form,
    determinant_numeric,
    leading_coefficient_c,
    leading_coefficient_exact,
    riemann_zeta,
    vacuum_energy,
    zeta,
    zeta_generic,
    zeta_partial_sum,
    zeta_prime_at_zero,
    zeta_representation,
    zeta_symmetric,
)


class TestRiemannZeta:
    """Tests for the Riemann zeta helper."""

    def test_known_values(self):
        """Test zeta_R at 2, 0 and -1."""
        assert riemann_zeta(2.0) == pytest.approx(math.pi**2 / 6)
        assert riemann_zeta(0.0) == pytest.approx(-0.5)
        assert riemann_zeta(-1.0) == pytest.approx(-1.0 / 12)

    def test_pole(self):
        """Test s = 1 raises PoleAtOne."""
        with pytest.raises(PoleAtOne):
            riemann_zeta(1.0)


class TestZeta:
    """Tests for the spectral zeta function."""

    @pytest.mark.parametrize("s", [1.0, 1.5, 0.0, 0.5])
    def test_argument_out_of_range(self, c5_symmetric, s):
        """Test excluded arguments are refused."""
        with pytest.raises(ArgumentOutOfRange):
            zeta_symmetric(c5_symmetric, s)

    @pytest.mark.parametrize("s", [-0.25, 0.75])
    def test_symmetric_matches_generic(self, c5_symmetric, s):
        """Test the representation integrand and det M̂ give the same zeta."""
        symmetric = zeta_symmetric(c5_symmetric, s).value
        generic = zeta_generic(c5_symmetric.as_generic(), s).value
        assert symmetric == pytest.approx(generic, rel=1e-6)

    def test_representations_sum_to_total(self, c6_symmetric):
        """Test weighted representation zetas add up to the full zeta."""
        s = 0.3
        total = sum(
            rep.weight * zeta_representation(c6_symmetric, rep, s).value
            for rep in representations(6)
        )
        assert total == pytest.approx(zeta_symmetric(c6_symmetric, s).value, rel=1e-6)

    def test_parts_add_up(self, c5_symmetric):
        """Test the reported parts sum to the value."""
        result = zeta_symmetric(c5_symmetric, 0.75)
        parts = result.parts
        total = parts.pole_term + parts.integral01 + parts.integral1inf + parts.rational_term
        assert result.value == pytest.approx(total)
        assert result.quadrature_error < 1e-6

    def test_dispatch(self, c5_symmetric, c5_generic):
        """Test zeta picks the integrand from the metric."""
        assert zeta(c5_symmetric, 0.75).value == zeta_symmetric(c5_symmetric, 0.75).value
        assert zeta(c5_generic, 0.75).value == zeta_generic(c5_generic, 0.75).value

    def test_scaling(self, c5_symmetric):
        """Test zeta of lengths scaled by lam is lam^(2s) times zeta."""
        s = 0.75
        base = zeta_symmetric(c5_symmetric, s).value
        scaled = zeta_symmetric(c5_symmetric.scaled(2.0), s).value
        assert scaled == pytest.approx(2.0 ** (2 * s) * base, rel=1e-6)

    def test_isomorphic_graphs(self):
        """Test C7(1,3) and C7(1,2) with matching lengths share zeta and determinant."""
        first = MetricGraph.symmetric(validate_spec(7, [1, 3]), [1.0, 1.3])
        second = MetricGraph.symmetric(validate_spec(7, [1, 2]), [1.3, 1.0])
        assert zeta_symmetric(first, -0.25).value == pytest.approx(
            zeta_symmetric(second, -0.25).value, rel=1e-7
        )
        assert determinant_closed_form(first).value == pytest.approx(
            determinant_closed_form(second).value, rel=1e-10
        )

    def test_against_partial_sum_symmetric(self, c5_symmetric):
        """Test zeta(3/4) against the eigenvalue sum with a Weyl tail."""
        result = spectrum_symmetric(c5_symmetric, 200.0)
        expected = zeta_partial_sum(result, 0.75)
        assert zeta_symmetric(c5_symmetric, 0.75).value == pytest.approx(expected, abs=1e-3)

    def test_against_partial_sum_generic(self, c5_generic):
        """Test the generic zeta against its own eigenvalue sum."""
        result = spectrum_generic(c5_generic, 200.0)
        expected = zeta_partial_sum(result, 0.75)
        assert zeta_generic(c5_generic, 0.75).value == pytest.approx(expected, abs=1e-3)

    @pytest.mark.parametrize("s", [-0.5, 0.25, 0.75])
    def test_finite_values(self, c5_symmetric, c5_generic, s):
        """Test every integrand gives a finite zeta across the range of s."""
        assert math.isfinite(zeta_symmetric(c5_symmetric, s).value)
        assert math.isfinite(zeta_generic(c5_generic, s).value)
        for rep in representations(5):
            assert math.isfinite(zeta_representation(c5_symmetric, rep, s).value)

    def test_lower_panel_stays_off_zero(self):
        """Test the lower panel never samples t = 0 and keeps its value."""
        seen = []

        def log_derivative(t):
            seen.append(t)
            return t

        i01, _, _, _ = zeta_module._split_integrals(log_derivative, 0, 0.25, 2.0)
        assert min(seen) > 0.0
        assert i01 == pytest.approx(1.0 / 1.5, rel=1e-9)

    def test_partial_sum_needs_convergence(self, c5_symmetric):
        """Test the eigenvalue sum is refused for s <= 1/2."""
        result = spectrum_symmetric(c5_symmetric, 10.0)
        with pytest.raises(ArgumentOutOfRange):
            zeta_partial_sum(result, 0.25)


class TestQuadrature:
    """Tests for the quadrature wrapper."""

    def _fake_quad(self, error):
        def fake(f, a, b, **kwargs):
            warnings.warn("roundoff error detected", IntegrationWarning)
            return 1.0, error

        return fake

    def test_failure(self):
        """Test an unresolved warning with a large error raises QuadratureFailure."""
        with patch("circulant_spectra.zeta.quad", side_effect=self._fake_quad(1e-2)):
            with pytest.raises(QuadratureFailure) as excinfo:
                zeta_module._quad(lambda t: t, 0.0, 1.0)
        assert excinfo.value.detail["error"] == 1e-2

    def test_accepted_with_small_error(self, caplog):
        """Test a warning with a negligible error estimate is only logged."""
        with patch("circulant_spectra.zeta.quad", side_effect=self._fake_quad(1e-14)):
            value, error = zeta_module._quad(lambda t: t, 0.0, 1.0)
        assert value == 1.0
        assert "accepted" in caplog.text

    def test_non_finite_value(self):
        """Test a NaN result raises QuadratureFailure even without a warning."""
        with patch("circulant_spectra.zeta.quad", return_value=(float("nan"), 0.0)):
            with pytest.raises(QuadratureFailure):
                zeta_module._quad(lambda t: t, 0.0, 1.0)


class TestDeterminants:
    """Tests for spectral determinants."""

    def test_equilateral_k5(self, c5_equal):
        """Test the closed form for equilateral K5."""
        result = determinant_closed_form(c5_equal)
        assert result.value == pytest.approx(1250.0)
        assert result.method == CLOSED_FORM

    def test_exact_coefficient(self, c5_equal):
        """Test c = (-1)^n L T_w = -1250 for equilateral K5."""
        assert leading_coefficient_exact(c5_equal) == pytest.approx(-1250.0)

    def test_richardson_coefficient(self, c5_generic):
        """Test the extrapolated c against the spanning-tree formula."""
        assert leading_coefficient_c(c5_generic) == pytest.approx(
            leading_coefficient_exact(c5_generic), rel=1e-7
        )

    def test_generic_formula_on_symmetric_lengths(self, c5_symmetric):
        """Test the generic closed form reproduces the symmetric one."""
        symmetric = determinant_closed_form(c5_symmetric).value
        generic = determinant_closed_form(c5_symmetric.as_generic())
        assert generic.value == pytest.approx(symmetric, rel=1e-6)
        assert generic.c_coefficient < 0

    def test_even_n(self, c6_symmetric):
        """Test the even-n closed form against the generic formula."""
        symmetric = determinant_closed_form(c6_symmetric).value
        generic = determinant_closed_form(c6_symmetric.as_generic()).value
        assert generic == pytest.approx(symmetric, rel=1e-6)

    def test_numeric_matches_closed_form(self, c5_symmetric):
        """Test exp(-zeta'(0)) against the closed form."""
        numeric = determinant_numeric(c5_symmetric)
        assert numeric.method == NUMERIC_ZETA_PRIME
        assert numeric.value == pytest.approx(determinant_closed_form(c5_symmetric).value, rel=1e-6)

    def test_numeric_generic(self, c5_generic):
        """Test the numeric determinant of a generic metric."""
        numeric = determinant_numeric(c5_generic)
        closed = determinant_closed_form(c5_generic)
        assert numeric.value == pytest.approx(closed.value, rel=1e-6)
        assert numeric.c_coefficient == pytest.approx(closed.c_coefficient)

    @pytest.mark.parametrize(
        "n,a,seed", [(5, [1, 2], 21), (6, [1, 2], 22), (7, [1, 3], 23), (8, [1, 3], 24), (9, [1, 2, 4], 25)]
    )
    def test_numeric_matches_closed_form_generic(self, n, a, seed):
        """Test exp(-zeta'(0)) against the closed form on random generic metrics."""
        g = MetricGraph.random_uniform(validate_spec(n, a), 1.0, 1.5, seed=seed)
        numeric = determinant_numeric(g).value
        assert math.isfinite(numeric)
        assert numeric == pytest.approx(determinant_closed_form(g).value, rel=1e-6)

    def test_vacuum_and_determinant_finite(self, c5_symmetric, c5_generic):
        """Test the vacuum energy and numeric determinant are finite for both metric kinds."""
        for g in (c5_symmetric, c5_generic):
            assert math.isfinite(vacuum_energy(g))
            assert math.isfinite(determinant_numeric(g).value)

    def test_zeta_prime_step_independent(self, c5_symmetric):
        """Test zeta'(0) does not depend on the difference step."""
        assert zeta_prime_at_zero(c5_symmetric, h=2e-4) == pytest.approx(
            zeta_prime_at_zero(c5_symmetric, h=1e-4), rel=1e-5
        )

    def test_degenerate_c(self, c5_generic):
        """Test a vanishing leading coefficient raises DegenerateC."""
        with patch(
            "circulant_spectra.zeta._generic_scaled",
            side_effect=lambda g, t: (2.0 * math.log(t), 1.0, 2.0 / t),
        ):
            with pytest.raises(DegenerateC):
                leading_coefficient_c(c5_generic)

    def test_sign_error(self, c5_generic):
        """Test a determinant with the wrong sign raises NumericalSignError."""
        with patch("circulant_spectra.zeta.leading_coefficient_c", return_value=5.0):
            with pytest.raises(NumericalSignError):
                determinant_closed_form(c5_generic)


class TestVacuumEnergy:
    """Tests for the zeta-regularized vacuum energy."""

    def test_half_zeta(self, c5_symmetric):
        """Test E equals one half of zeta(-1/2)."""
        assert vacuum_energy(c5_symmetric) == pytest.approx(
            0.5 * zeta_symmetric(c5_symmetric, -0.5).value, rel=1e-8
        )

    def test_symmetric_matches_generic(self, c6_symmetric):
        """Test both integrands give the same vacuum energy."""
        assert vacuum_energy(c6_symmetric) == pytest.approx(
            vacuum_energy(c6_symmetric.as_generic()), rel=1e-8
        )

    def test_scaling(self, c5_generic):
        """Test the energy scales as 1/length."""
        assert vacuum_energy(c5_generic.scaled(2.0)) == pytest.approx(
            vacuum_energy(c5_generic) / 2.0, rel=1e-8
        )


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
