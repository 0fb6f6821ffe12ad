"""
Circulant Spectra - Spectral Zeta Function

Integral representation of the spectral zeta function on the imaginary axis,
its derivative at s = 0, spectral determinants (closed form and numeric) and
the zeta-regularized vacuum energy.

For a t-scaled secular function g(t) = t^q * f̂(t) with g(0) finite,

    zeta(s) = P(s) + sin(pi s)/pi * [ int_0^1 t^(-2s) g'/g dt
                                     + int_1^inf t^(-2s) (g'/g - q/t) dt
                                     + q/(2s) ]

where P(s) = zeta_R(2s) * sum over edges of (pi/L)^(-2s) collects the poles of
the secular function and the Dirichlet eigenvalues. The upper integral is
truncated at T = max(30/min L, 30), past which the integrand is below 1e-13.
"""

import logging
import math
import warnings
from typing import Callable, Tuple, Union

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import zetac

from .config import defaults
from .errors import (
    ArgumentOutOfRange,
    DegenerateC,
    NearSingularMhat,
    NumericalSignError,
    PoleAtOne,
    QuadratureFailure,
)
from .graph import MetricGraph
from .models import CLOSED_FORM, NUMERIC_ZETA_PRIME, DetResult, Spectrum, ZetaParts, ZetaValue
from .secular import (
    RepIndex,
    _generic_scaled,
    _symmetric_scaled_terms,
    class_coefficients,
    representations,
    weighted_log_derivative,
)

logger = logging.getLogger(__name__)

LogDerivative = Callable[[float], float]


def riemann_zeta(s: float) -> float:
    """
    Riemann zeta function for real s != 1.

    Raises:
        PoleAtOne: s == 1
    """
    if s == 1:
        raise PoleAtOne("the Riemann zeta function has a pole at s = 1", {"s": s})
    return 1.0 + float(zetac(s))


def _check_argument(s: float) -> None:
    if s >= 1 or s == 0 or s == 0.5:
        raise ArgumentOutOfRange(
            f"zeta is evaluated for s < 1 with s not in {{0, 1/2}}, got {s}",
            {"s": s},
        )


def _truncation(g: MetricGraph) -> float:
    factor = defaults.truncation_factor
    return max(factor / min(g.lengths), factor)


def _quad(f: Callable[[float], float], a: float, b: float, **kwargs) -> Tuple[float, float]:
    """scipy quad that turns unresolved integration warnings into QuadratureFailure."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, error = quad(f, a, b, epsabs=defaults.quad_epsabs, limit=defaults.quad_limit, **kwargs)
    issues = [str(w.message) for w in caught if issubclass(w.category, IntegrationWarning)]
    if not (math.isfinite(value) and math.isfinite(error)):
        raise QuadratureFailure(
            f"quadrature on ({a:g}, {b:g}) returned a non-finite result",
            {"interval": [a, b], "value": value, "error": error, "warnings": issues},
        )
    if issues:
        if error > 1e-8 * max(1.0, abs(value)):
            raise QuadratureFailure(
                f"quadrature on ({a:g}, {b:g}) did not converge: {issues[0]}",
                {"interval": [a, b], "value": value, "error": error, "warnings": issues},
            )
        logger.warning(f"quadrature on ({a:g}, {b:g}) accepted with error {error:.2e}: {issues[0]}")
    return value, error


def _split_integrals(
    log_derivative: LogDerivative, q: int, s: float, upper: float
) -> Tuple[float, float, float, float]:
    """
    int_0^1 t^(-2s) g'/g and int_1^upper t^(-2s) (g'/g - q/t), with error estimates.

    g'/g vanishes linearly at 0, so the lower panel integrates (g'/g)/t against
    the algebraic weight t^(1-2s). That quotient has a finite limit at 0, where
    the t-scaled functions themselves are 0/0, so the panel samples no closer
    to 0 than small_t_floor.
    """
    floor = defaults.small_t_floor

    def lower(t: float) -> float:
        t = max(t, floor)
        return log_derivative(t) / t

    i01, e01 = _quad(lower, 0.0, 1.0, weight="alg", wvar=(1.0 - 2.0 * s, 0.0))
    i1inf, e1inf = _quad(lambda t: t ** (-2.0 * s) * (log_derivative(t) - q / t), 1.0, upper)
    return i01, e01, i1inf, e1inf


def _assemble(g: MetricGraph, s: float, pole: float, log_derivative: LogDerivative, q: int) -> ZetaValue:
    i01, e01, i1inf, e1inf = _split_integrals(log_derivative, q, s, _truncation(g))
    prefactor = math.sin(math.pi * s) / math.pi
    parts = ZetaParts(
        pole_term=pole,
        integral01=prefactor * i01,
        integral1inf=prefactor * i1inf,
        rational_term=prefactor * q / (2.0 * s),
    )
    value = math.fsum([parts.pole_term, parts.integral01, parts.integral1inf, parts.rational_term])
    return ZetaValue(s=float(s), value=value, quadrature_error=abs(prefactor) * (e01 + e1inf), parts=parts)


def _pole_term(lengths, s: float) -> float:
    """zeta_R(2s) * sum (pi/L)^(-2s)."""
    return riemann_zeta(2.0 * s) * math.fsum((math.pi / L) ** (-2.0 * s) for L in lengths)


# Log-derivatives of the t-scaled secular functions


def _symmetric_log_derivative(g: MetricGraph) -> LogDerivative:
    def log_derivative(t: float) -> float:
        return weighted_log_derivative(g, t)[0]

    return log_derivative


def _rep_log_derivative(g: MetricGraph, j: int) -> LogDerivative:
    def log_derivative(t: float) -> float:
        value, deriv, _ = _symmetric_scaled_terms(g, j, t)
        return deriv / value

    return log_derivative


def _generic_log_derivative(g: MetricGraph) -> LogDerivative:
    def log_derivative(t: float) -> float:
        try:
            return _generic_scaled(g, t)[2]
        except NearSingularMhat:
            shifted = t * (1.0 + 1e-9)
            logger.warning(f"t*M̂(t) near singular at t={t!r}; evaluating at {shifted!r}")
            return _generic_scaled(g, shifted)[2]

    return log_derivative


def _log_derivative_for(g: MetricGraph) -> Tuple[LogDerivative, int]:
    if g.is_symmetric:
        return _symmetric_log_derivative(g), g.n - 2
    return _generic_log_derivative(g), g.n - 2


# Zeta functions


def zeta_representation(g: MetricGraph, rep: Union[RepIndex, int], s: float) -> ZetaValue:
    """
    Zeta function of one representation j of a symmetric metric.

    Covers the roots of p_j and, for each class and harmonic m, either the pole
    of p_j or the Dirichlet eigenvalue the representation carries, so the pole
    part is zeta_R(2s) * sum_h (pi/l_h)^(-2s) for every j.
    """
    _check_argument(s)
    if not g.is_symmetric:
        raise ValueError("zeta_representation needs a symmetric metric")
    rep = rep if isinstance(rep, RepIndex) else RepIndex.of(g.n, rep)
    _, _, q = _symmetric_scaled_terms(g, rep.j, 1.0)
    return _assemble(g, s, _pole_term(g.class_lengths, s), _rep_log_derivative(g, rep.j), q)


def zeta_symmetric(g: MetricGraph, s: float) -> ZetaValue:
    """
    Spectral zeta function of a symmetric metric.

    The representation integrands are combined with their weights before
    integrating; the rational terms (-1 for j = 0, +1 for every other j)
    accumulate to (n - 2)/(2s).

    Raises:
        ArgumentOutOfRange: s >= 1, s = 0 or s = 1/2
        QuadratureFailure: an integral did not converge
    """
    _check_argument(s)
    if not g.is_symmetric:
        raise ValueError("zeta_symmetric needs a symmetric metric")
    pole = g.n * _pole_term(g.class_lengths, s)
    return _assemble(g, s, pole, _symmetric_log_derivative(g), g.n - 2)


def zeta_generic(g: MetricGraph, s: float) -> ZetaValue:
    """
    Spectral zeta function from det M̂(t) for any metric.

    Raises:
        ArgumentOutOfRange: s >= 1, s = 0 or s = 1/2
        QuadratureFailure: an integral did not converge
    """
    _check_argument(s)
    return _assemble(g, s, _pole_term(g.lengths, s), _generic_log_derivative(g), g.n - 2)


def zeta(g: MetricGraph, s: float) -> ZetaValue:
    return zeta_symmetric(g, s) if g.is_symmetric else zeta_generic(g, s)


def zeta_partial_sum(spectrum: Spectrum, s: float) -> float:
    """
    Truncated eigenvalue sum with a Weyl tail.

    sum_{k <= K} m k^(-2s) + (L/pi) K^(1-2s)/(2s-1) + (mean R - R(K)) K^(-2s),
    where R(k) = N(k) - k L/pi and mean R is its average over [K/2, K].
    """
    if not s > 0.5:
        raise ArgumentOutOfRange(f"the eigenvalue sum converges for s > 1/2 only, got {s}", {"s": s})
    g, K = spectrum.graph, spectrum.kmax
    density = g.total_length / math.pi
    ks, mult = spectrum.ks, spectrum.multiplicities
    partial = math.fsum((mult * ks ** (-2.0 * s)).tolist())

    # exact average of the step function N over [K/2, K]
    half = 0.5 * K
    below = mult[ks <= half].sum()
    upper = ks > half
    integral_N = below * (K - half) + np.sum(mult[upper] * (K - ks[upper]))
    mean_R = integral_N / (K - half) - density * 0.75 * K
    R_K = mult.sum() - density * K

    tail = density * K ** (1.0 - 2.0 * s) / (2.0 * s - 1.0) + (mean_R - R_K) * K ** (-2.0 * s)
    return partial + tail


# Leading coefficient and determinants


def leading_coefficient_c(g: MetricGraph) -> float:
    """
    c = lim_{t->0} det[t M̂(t)] / t^2 by Richardson extrapolation.

    g(t) = det[t M̂(t)]/t^2 is even in t, so the table eliminates powers of
    t^2 on the sequence t0, t0/2, t0/4, ...

    Raises:
        DegenerateC: the limit vanishes relative to the sampled values
    """
    t0 = defaults.richardson_t0
    levels = defaults.richardson_levels
    samples = []
    for i in range(levels):
        log_abs, sign, _ = _generic_scaled(g, t0 / 2**i)
        samples.append(sign * math.exp(log_abs))

    table = [samples]
    for level in range(1, levels):
        factor = 4.0**level
        prev = table[-1]
        table.append([(factor * prev[i + 1] - prev[i]) / (factor - 1.0) for i in range(len(prev) - 1)])
    c = table[-1][0]
    previous = table[-2][0]

    scale = max(abs(x) for x in samples)
    if abs(c) < 1e-10 * scale:
        raise DegenerateC(
            f"leading coefficient vanishes (|c| = {abs(c):.3e}); perturb the lengths",
            {"c": c, "scale": scale},
        )
    drift = abs(c - previous) / abs(c)
    if drift > 1e-8:
        logger.warning(f"Richardson extrapolation of c converges slowly (relative change {drift:.2e})")
    return c


def leading_coefficient_exact(g: MetricGraph) -> float:
    """(-1)^n * total length * weighted spanning-tree count, weights 1/L."""
    weights = 1.0 / g.length_array
    laplacian = np.zeros((g.n, g.n))
    np.add.at(laplacian, (g.tails, g.tails), weights)
    np.add.at(laplacian, (g.heads, g.heads), weights)
    np.add.at(laplacian, (g.tails, g.heads), -weights)
    np.add.at(laplacian, (g.heads, g.tails), -weights)
    sign, log_trees = np.linalg.slogdet(laplacian[1:, 1:])
    if sign <= 0:
        raise NumericalSignError("weighted Laplacian minor is not positive", {"sign": float(sign)})
    return (-1.0) ** g.n * g.total_length * math.exp(log_trees)


def _symmetric_determinant(g: MetricGraph) -> float:
    n, d, E = g.n, g.d, g.E
    ell = np.asarray(g.class_lengths)
    log_value = (E - 1) * math.log(2.0) + math.log(g.total_length) - math.log(n) - n * math.log(d)
    log_value += n * np.log(ell).sum()
    for j in range(1, (n - 1) // 2 + 1):
        c, _ = class_coefficients(g.spec, j)
        log_value += 2.0 * math.log(float(np.sum((1.0 - c) / ell)))
    if n % 2 == 0:
        odd = np.asarray(g.spec.a) % 2 == 1
        log_value += math.log(float(np.sum(2.0 / ell[odd])))
    return math.exp(log_value)


def determinant_closed_form(g: MetricGraph) -> DetResult:
    """
    Regularized spectral determinant in closed form.

    Symmetric metrics use the representation product. Generic metrics use
    c * (-2^(d-1)/d)^n * prod L with c from leading_coefficient_c; the result
    is checked to be positive.

    Raises:
        DegenerateC, NumericalSignError
    """
    if g.is_symmetric:
        return DetResult(value=_symmetric_determinant(g), method=CLOSED_FORM)

    c = leading_coefficient_c(g)
    sign = math.copysign(1.0, c) * (-1.0) ** g.n
    if sign < 0:
        raise NumericalSignError(
            f"generic determinant came out negative (c = {c:.6g}, n = {g.n})", {"c": c, "n": g.n}
        )
    log_value = (
        math.log(abs(c))
        + g.n * ((g.d - 1) * math.log(2.0) - math.log(g.d))
        + float(np.log(g.length_array).sum())
    )
    return DetResult(value=math.exp(log_value), method=CLOSED_FORM, c_coefficient=c)


def _smooth_part(g: MetricGraph, s: float) -> float:
    """zeta(s) without the rational term, whose derivative at 0 vanishes."""
    log_derivative, q = _log_derivative_for(g)
    lengths = g.class_lengths if g.is_symmetric else g.lengths
    pole = (g.n if g.is_symmetric else 1) * _pole_term(lengths, s)
    i01, _, i1inf, _ = _split_integrals(log_derivative, q, s, _truncation(g))
    return pole + math.sin(math.pi * s) / math.pi * (i01 + i1inf)


def zeta_prime_at_zero(g: MetricGraph, h: float = None) -> float:
    """
    zeta'(0) by central differences at s = +-h and +-h/2 with one Richardson step.

    sin(pi s)/pi * q/(2s) is even in s, so the rational term drops out of the
    difference and only the pole part and the integrals are differenced.
    """
    h = h or defaults.zeta_prime_step

    def central(step: float) -> float:
        return (_smooth_part(g, step) - _smooth_part(g, -step)) / (2.0 * step)

    coarse, fine = central(h), central(0.5 * h)
    value = (4.0 * fine - coarse) / 3.0
    logger.debug(f"zeta'(0): D(h)={coarse!r}, D(h/2)={fine!r}, extrapolated {value!r}")
    return value


def determinant_numeric(g: MetricGraph) -> DetResult:
    """exp(-zeta'(0))."""
    c = None if g.is_symmetric else leading_coefficient_c(g)
    return DetResult(value=math.exp(-zeta_prime_at_zero(g)), method=NUMERIC_ZETA_PRIME, c_coefficient=c)


# Vacuum energy


def _vacuum(g: MetricGraph, log_derivative: LogDerivative) -> float:
    q = g.n - 2
    i01, _, i1inf, _ = _split_integrals(log_derivative, q, -0.5, _truncation(g))
    inverse_lengths = math.fsum(1.0 / L for L in g.lengths)
    return q / (2.0 * math.pi) - math.pi / 24.0 * inverse_lengths - (i01 + i1inf) / (2.0 * math.pi)


def vacuum_energy_symmetric(g: MetricGraph) -> float:
    if not g.is_symmetric:
        raise ValueError("vacuum_energy_symmetric needs a symmetric metric")
    return _vacuum(g, _symmetric_log_derivative(g))


def vacuum_energy_generic(g: MetricGraph) -> float:
    return _vacuum(g, _generic_log_derivative(g))


def vacuum_energy(g: MetricGraph) -> float:
    """
    Zeta-regularized vacuum energy, one half of zeta(-1/2).

    (n-2)/(2 pi) - (pi/24) sum 1/L - (1/2 pi) [ int_0^1 t g'/g
    + int_1^inf t (g'/g - (n-2)/t) ].
    """
    energy = vacuum_energy_symmetric(g) if g.is_symmetric else vacuum_energy_generic(g)
    logger.info(f"vacuum energy {energy!r}")
    return energy
