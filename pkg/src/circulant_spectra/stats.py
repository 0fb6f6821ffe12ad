"""
Circulant Spectra - Spectral Statistics

Estimators on unfolded sequences (nearest-neighbour spacing histogram, its
empirical CDF, the two-point correlation R2) and the closed-form reference
models they are compared with: the GOE Wigner surmise, the small-x and large-x
asymptotics of R2 for a single representation, and the theoretical form
factor. fit_small_c recovers the constant of the small-x law by least squares.
"""

import logging
import math
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .config import defaults
from .errors import DomainViolation, NoBracket, TooFewLevels, XmaxTooLarge
from .models import EDGE, INTERIOR, FitResult, Histogram, R2Estimate, UnfoldedSpectrum

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

MIN_R2_LEVELS = 100
MIN_FIT_BINS = 5


def _values(u: Union[UnfoldedSpectrum, Sequence[float], np.ndarray]) -> np.ndarray:
    values = u.values if isinstance(u, UnfoldedSpectrum) else u
    return np.sort(np.asarray(values, dtype=float))


def _gaps(u) -> np.ndarray:
    x = _values(u)
    if x.size < 2:
        raise TooFewLevels(f"need at least 2 levels, got {x.size}", {"levels": int(x.size)})
    return np.diff(x)


def _check_rep_class(rep_class: str) -> None:
    if rep_class not in (INTERIOR, EDGE):
        raise ValueError(f"rep_class must be {INTERIOR!r} or {EDGE!r}, got {rep_class!r}")


# Spacing distributions


def nnsd(u: UnfoldedSpectrum, bins: Optional[int] = None, smax: Optional[float] = None) -> Histogram:
    """
    Histogram of consecutive gaps on [0, smax].

    The density is normalized by the total number of gaps, so mass beyond smax
    is lost rather than redistributed.
    """
    bins = bins or defaults.nnsd_bins
    smax = smax or defaults.nnsd_smax
    gaps = _gaps(u)
    counts, edges = np.histogram(gaps, bins=bins, range=(0.0, smax))
    density = counts / (gaps.size * np.diff(edges))
    return Histogram(bin_edges=edges, counts=counts, density=density)


def integrated_nnsd(u: UnfoldedSpectrum, grid: ArrayLike) -> np.ndarray:
    """Empirical CDF of the gaps, P(s_i <= s), on grid."""
    gaps = np.sort(_gaps(u))
    grid = np.asarray(grid, dtype=float)
    return np.searchsorted(gaps, grid, side="right") / gaps.size


def wigner_goe(s: ArrayLike) -> Union[float, np.ndarray]:
    """Wigner surmise (pi/2) s exp(-pi s^2/4)."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("spacing must be nonnegative")
    out = 0.5 * np.pi * s_arr * np.exp(-0.25 * np.pi * s_arr**2)
    return float(out) if out.ndim == 0 else out


def wigner_goe_cdf(s: ArrayLike) -> Union[float, np.ndarray]:
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("spacing must be nonnegative")
    out = -np.expm1(-0.25 * np.pi * s_arr**2)
    return float(out) if out.ndim == 0 else out


def poisson_nnsd(s: ArrayLike) -> Union[float, np.ndarray]:
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("spacing must be nonnegative")
    out = np.exp(-s_arr)
    return float(out) if out.ndim == 0 else out


def sup_distance(u: UnfoldedSpectrum, grid: ArrayLike) -> float:
    """Largest gap between the integrated NNSD and the Wigner CDF on grid."""
    grid = np.asarray(grid, dtype=float)
    return float(np.max(np.abs(integrated_nnsd(u, grid) - wigner_goe_cdf(grid))))


# Two-point correlation


def r2_estimate(u: UnfoldedSpectrum, xmax: Optional[float] = None, bins: Optional[int] = None) -> R2Estimate:
    """
    Two-point correlation by ordered-pair counting.

    A bin of width w centred at x > 0 gets (#pairs i != j with x_i - x_j in the
    bin) / (N w). No edge correction is applied; the bias is O(xmax/N).

    Raises:
        TooFewLevels: fewer than 100 levels
        XmaxTooLarge: xmax above 10% of the span of the sequence
    """
    xmax = xmax or defaults.r2_xmax
    bins = bins or defaults.r2_bins
    x = _values(u)
    N = x.size
    if N < MIN_R2_LEVELS:
        raise TooFewLevels(f"R2 needs at least {MIN_R2_LEVELS} levels, got {N}", {"levels": N})
    span = float(x[-1] - x[0])
    if xmax > 0.1 * span:
        raise XmaxTooLarge(
            f"xmax={xmax} exceeds 10% of the sequence span {span:.6g}", {"xmax": xmax, "span": span}
        )

    edges = np.linspace(0.0, xmax, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    # pairs at offset k in the sorted sequence; stops once no difference fits
    for k in range(1, N):
        diffs = x[k:] - x[:-k]
        diffs = diffs[diffs <= xmax]
        if diffs.size == 0:
            break
        counts += np.histogram(diffs, bins=edges)[0]

    width = xmax / bins
    pairs = int(counts.sum())
    logger.debug(f"r2_estimate: {pairs} unordered pairs within xmax={xmax} over {N} levels")
    return R2Estimate(
        bin_centers=0.5 * (edges[1:] + edges[:-1]),
        values=counts / (N * width),
        pair_count=2 * pairs,
        xmax=float(xmax),
        sequence_length=N,
    )


def _small_model(x: np.ndarray, c: float) -> np.ndarray:
    return np.log(x / c) ** 2 * x / np.pi


def r2_small_model(x: ArrayLike, c: float) -> Union[float, np.ndarray]:
    """
    Small-x form of R2 for one representation, (1/pi) ln^2(x/c) x.

    Raises:
        DomainViolation: x outside (0, c)
    """
    x_arr = np.asarray(x, dtype=float)
    if c <= 0 or np.any(x_arr <= 0) or np.any(x_arr >= c):
        raise DomainViolation(f"small-x model needs 0 < x < c (c={c})", {"c": c})
    out = _small_model(x_arr, c)
    return float(out) if out.ndim == 0 else out


def r2_large_model(x: ArrayLike, rep_class: str = INTERIOR) -> Union[float, np.ndarray]:
    """
    Large-x expansion of R2.

    Interior: 1 + 2/(pi^2 x^2) - 1/(2 pi^4 x^4).
    Edge (j = 0 or n/2): 1 + 2/(pi^2 x^2) + 4/(pi^4 x^4).
    """
    _check_rep_class(rep_class)
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise ValueError("x must be positive")
    quartic = -0.5 if rep_class == INTERIOR else 4.0
    out = 1.0 + 2.0 / (np.pi**2 * x_arr**2) + quartic / (np.pi**4 * x_arr**4)
    return float(out) if out.ndim == 0 else out


def form_factor_theory(tau: ArrayLike, rep_class: str = INTERIOR):
    """
    Form factor K(tau) of one representation.

    Interior: (1 - tau - 4 tau^2) exp(-4 tau) + tau exp(2 tau).
    Edge: (1 - tau - 4 tau^2) exp(-4 tau) + tau exp(4 tau).
    Accepts complex tau so the Maclaurin coefficients can be read off a contour.
    """
    _check_rep_class(rep_class)
    tau_arr = np.asarray(tau)
    if not np.iscomplexobj(tau_arr) and np.any(tau_arr < 0):
        raise ValueError("tau must be nonnegative")
    rate = 2.0 if rep_class == INTERIOR else 4.0
    out = (1 - tau_arr - 4 * tau_arr**2) * np.exp(-4 * tau_arr) + tau_arr * np.exp(rate * tau_arr)
    return out.item() if out.ndim == 0 else out


def form_factor_maclaurin(order: int = 4, rep_class: str = INTERIOR, radius: float = 0.5, points: int = 64) -> np.ndarray:
    """Maclaurin coefficients 0..order of form_factor_theory from an FFT on |tau| = radius."""
    if order >= points:
        raise ValueError("order must be below the number of contour points")
    theta = 2.0 * np.pi * np.arange(points) / points
    samples = form_factor_theory(radius * np.exp(1j * theta), rep_class)
    coefficients = np.fft.fft(samples) / points
    return np.real(coefficients[: order + 1]) / radius ** np.arange(order + 1)


def mean_cos_squared(n: int) -> float:
    """Average of cos^2(2 pi j a/n) over j = 1..n-1 for odd n and a coprime to n."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd and at least 3, got {n}")
    return 0.5 * (1.0 - 1.0 / (n - 1))


# Fitting the small-x constant


def _fit(r2: R2Estimate, window: Tuple[float, float]) -> Tuple[float, float]:
    xlo, xhi = window
    if not (0 < xlo < xhi):
        raise DomainViolation(f"fit window must satisfy 0 < xlo < xhi, got {window}", {"window": list(window)})
    inside = (r2.bin_centers >= xlo) & (r2.bin_centers <= xhi)
    if inside.sum() < MIN_FIT_BINS:
        raise DomainViolation(
            f"fit window {window} holds {int(inside.sum())} bins, need {MIN_FIT_BINS}",
            {"window": list(window), "bins": int(inside.sum())},
        )
    x, y = r2.bin_centers[inside], r2.values[inside]

    def objective(c: float) -> float:
        return float(np.sum((y - _small_model(x, c)) ** 2))

    lo, hi = defaults.fit_c_range
    grid = np.geomspace(lo, hi, 61)
    values = np.array([objective(c) for c in grid])
    best = int(np.argmin(values))
    if best == 0 or best == grid.size - 1:
        raise NoBracket(
            f"least-squares objective has no interior minimum for c in [{lo}, {hi}]",
            {"window": list(window), "c_at_min": float(grid[best])},
        )
    result = minimize_scalar(
        objective, bracket=(grid[best - 1], grid[best], grid[best + 1]), method="golden", tol=1e-8
    )
    return float(result.x), float(result.fun)


def fit_small_c(r2: R2Estimate, window: Optional[Tuple[float, float]] = None) -> FitResult:
    """
    Least-squares fit of c in r2_small_model over the bins inside window.

    The objective is scanned on a geometric grid over the c search range to
    find a bracket, then minimized by golden section. The relative change of c
    when the upper window edge is scaled by 0.8 and 1.25 is reported as
    window_sensitivity.

    Raises:
        NoBracket: the minimum sits on the edge of the search range
    """
    window = tuple(window or defaults.fit_window)
    c, residual = _fit(r2, window)
    logger.info(f"fit_small_c: c={c:.6g} on window {window}, residual {residual:.3g}")

    sensitivity: Dict[str, float] = {}
    for scale in (0.8, 1.25):
        label = f"xhi*{scale:g}"
        try:
            c_alt, _ = _fit(r2, (window[0], window[1] * scale))
            sensitivity[label] = (c_alt - c) / c
        except (DomainViolation, NoBracket) as e:
            logger.warning(f"window sensitivity at {label} unavailable: {e}")
    return FitResult(c=c, window=window, residual=residual, window_sensitivity=sensitivity)
