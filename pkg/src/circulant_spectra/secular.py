"""
Circulant Spectra - Secular Functions

The secular matrix M(k) and its determinant, the factorized functions p_j(k)
of a symmetric metric with their pole sets, and the hyperbolic functions f̂(t)
that appear on the imaginary axis.

For a jump class h and representation j write c_h = cos(2*pi*j*a_h/n). Every
p_j is 2 * sum_h (c_h - cos(k l_h)) / sin(k l_h). When c_h is exactly +1 the
term reduces to tan(k l_h / 2), when it is exactly -1 to -cot(k l_h / 2); these
two cases are detected with integer arithmetic so removable poles never appear.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, NamedTuple, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, null_space

from .config import defaults
from .errors import NearSingularMhat, PoleHit, TooCloseToPole
from .graph import CirculantSpec, MetricGraph

logger = logging.getLogger(__name__)

GENERIC = "generic"

# Below this argument the small-x series forms are used.
_SMALL = 1.0


@dataclass(frozen=True)
class RepIndex:
    """
    Irreducible representation label j in 0..floor(n/2).

    j and n - j give the same p_j, so interior representations carry weight 2.
    """

    j: int
    weight: int

    @classmethod
    def of(cls, n: int, j: int) -> "RepIndex":
        j = int(j) % n
        j = min(j, n - j)
        return cls(j=j, weight=1 if j == 0 or 2 * j == n else 2)

    def is_edge(self, n: int) -> bool:
        """True for j = 0 and j = n/2."""
        return self.j == 0 or 2 * self.j == n

    def to_dict(self) -> dict:
        return {"j": self.j, "weight": self.weight}


def representations(n: int) -> List[RepIndex]:
    return [RepIndex.of(n, j) for j in range(n // 2 + 1)]


@dataclass(frozen=True)
class PolePoint:
    """A pole of p_j with the jump classes (1-based) that put it there."""

    k: float
    classes: Tuple[int, ...]

    @property
    def coincident(self) -> bool:
        return len(self.classes) > 1


@dataclass
class SecularMatrixValue:
    k: float
    entries: np.ndarray
    nearest_pole_distance: float


class ScaledFhat(NamedTuple):
    """g(t) = t^power * f̂(t) and its logarithmic derivative."""

    value: float
    log_derivative: float
    power: int


@lru_cache(maxsize=256)
def class_coefficients(spec: CirculantSpec, j: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-class cos(2*pi*j*a_h/n) and its exact type.

    Returns:
        (c, kind) where kind is +1 when j*a_h = 0 mod n, -1 when
        j*a_h = n/2 mod n, and 0 otherwise
    """
    a = np.asarray(spec.a)
    residue = (j * a) % spec.n
    kind = np.where(residue == 0, 1, np.where(2 * residue == spec.n, -1, 0))
    c = np.where(kind == 1, 1.0, np.where(kind == -1, -1.0, np.cos(2.0 * np.pi * residue / spec.n)))
    c.setflags(write=False)
    kind.setflags(write=False)
    return c, kind


# Secular matrix


def _guard_distance(x: np.ndarray) -> np.ndarray:
    return np.abs(np.sin(x))


def assemble_M(g: MetricGraph, k: float) -> SecularMatrixValue:
    """
    Secular matrix at wavenumber k.

    Diagonal entries are -sum cot(k L) over the incident edges, off-diagonal
    entries csc(k L) for adjacent vertices.

    Raises:
        TooCloseToPole: some edge has |sin(k L)| below the pole guard
    """
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    x = k * g.length_array
    if _guard_distance(x).min() < defaults.pole_guard:
        raise TooCloseToPole(f"k={k!r} lies on the Dirichlet set", {"k": k})
    entries = _assemble_batch(g, np.array([k]))[0]
    nearest = float(np.min(np.abs(x - np.pi * np.round(x / np.pi))))
    return SecularMatrixValue(k=float(k), entries=entries, nearest_pole_distance=nearest)


def _assemble_batch(g: MetricGraph, ks: np.ndarray) -> np.ndarray:
    x = np.multiply.outer(ks, g.length_array)
    sin = np.sin(x)
    csc = 1.0 / sin
    cot = np.cos(x) / sin
    M = np.zeros((len(ks), g.n, g.n))
    diag = np.arange(g.n)
    M[:, diag, diag] = -(cot @ g.incidence)
    M[:, g.tails, g.heads] = csc
    M[:, g.heads, g.tails] = csc
    return M


def _chunks(total: int, n: int):
    size = max(1, int(defaults.batch_entries // (n * n)))
    for start in range(0, total, size):
        yield slice(start, min(start + size, total))


def slogdet_M_batch(g: MetricGraph, ks: np.ndarray, check: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sign and log-magnitude of det M(k) for an array of wavenumbers.

    Uses LAPACK LU with partial pivoting on stacked matrices, in chunks sized by
    the batch_entries default.
    """
    ks = np.asarray(ks, dtype=float)
    if check and ks.size:
        dist = _guard_distance(np.multiply.outer(ks, g.length_array)).min(axis=1)
        bad = np.flatnonzero(dist < defaults.pole_guard)
        if bad.size:
            raise TooCloseToPole(f"k={ks[bad[0]]!r} lies on the Dirichlet set", {"k": float(ks[bad[0]])})
    sign = np.empty(ks.size)
    logabs = np.empty(ks.size)
    for part in _chunks(ks.size, g.n):
        sign[part], logabs[part] = np.linalg.slogdet(_assemble_batch(g, ks[part]))
    return sign, logabs


def negative_count_M_batch(g: MetricGraph, ks: np.ndarray) -> np.ndarray:
    """
    Number of negative eigenvalues of M(k) for an array of wavenumbers.

    dM/dk is positive definite between Dirichlet points, so every eigenvalue of
    M(k) increases there and the count falls by the multiplicity of each root
    it passes. The difference of two counts in one Dirichlet-free piece is the
    number of roots between them, close pairs included.
    """
    ks = np.asarray(ks, dtype=float)
    counts = np.empty(ks.size, dtype=int)
    for part in _chunks(ks.size, g.n):
        eigenvalues = np.linalg.eigvalsh(_assemble_batch(g, ks[part]))
        counts[part] = np.count_nonzero(eigenvalues < 0.0, axis=-1)
    return counts


def slogdet_M(g: MetricGraph, k: float) -> Tuple[float, float]:
    sign, logabs = slogdet_M_batch(g, np.array([float(k)]))
    return float(sign[0]), float(logabs[0])


def det_M(g: MetricGraph, k: float) -> float:
    """Determinant of M(k); the sign is reliable, the magnitude may overflow to inf."""
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    sign, logabs = slogdet_M(g, k)
    return sign * math.exp(logabs) if logabs < 709.0 else sign * math.inf


# Factorized secular functions p_j


def _require_symmetric(g: MetricGraph) -> None:
    if not g.is_symmetric:
        raise ValueError("p_j is defined for symmetric metrics only")


def eval_p_many(g: MetricGraph, rep: RepIndex, ks: np.ndarray, check: bool = True) -> np.ndarray:
    """Vectorized p_j(k)."""
    _require_symmetric(g)
    ks = np.asarray(ks, dtype=float)
    c, kind = class_coefficients(g.spec, rep.j)
    x = np.multiply.outer(ks, np.asarray(g.class_lengths))
    plus, minus, other = kind == 1, kind == -1, kind == 0

    if check and ks.size:
        dist = np.concatenate(
            [
                np.abs(np.cos(x[:, plus] / 2)),
                np.abs(np.sin(x[:, minus] / 2)),
                np.abs(np.sin(x[:, other])),
            ],
            axis=1,
        ).min(axis=1)
        bad = np.flatnonzero(dist < defaults.pole_guard)
        if bad.size:
            raise PoleHit(f"k={ks[bad[0]]!r} is a pole of p_{rep.j}", {"k": float(ks[bad[0]]), "j": rep.j})

    terms = np.empty_like(x)
    terms[:, plus] = np.tan(x[:, plus] / 2)
    terms[:, minus] = -1.0 / np.tan(x[:, minus] / 2)
    terms[:, other] = (c[other] - np.cos(x[:, other])) / np.sin(x[:, other])
    return 2.0 * terms.sum(axis=1)


def eval_p(g: MetricGraph, rep: RepIndex, k: float) -> float:
    """
    Evaluate p_j(k) for a symmetric metric.

    Raises:
        PoleHit: k is within the pole guard of a pole of p_j
    """
    return float(eval_p_many(g, rep, np.array([float(k)]))[0])


def pole_array(g: MetricGraph, rep: RepIndex, kmax: float) -> Tuple[np.ndarray, List[Tuple[int, ...]]]:
    """Sorted, merged poles of p_j up to kmax with their class tags."""
    _require_symmetric(g)
    _, kind = class_coefficients(g.spec, rep.j)
    ks, tags = [], []
    for h, (ell, kd) in enumerate(zip(g.class_lengths, kind), start=1):
        top = math.floor(kmax * ell / math.pi)
        m = np.arange(1, top + 1)
        if kd == 1:
            m = m[m % 2 == 1]
        elif kd == -1:
            m = m[m % 2 == 0]
        ks.append(m * math.pi / ell)
        tags.append(np.full(m.size, h))
    if not ks:
        return np.empty(0), []
    k_all = np.concatenate(ks)
    h_all = np.concatenate(tags)
    order = np.lexsort((h_all, k_all))
    k_all, h_all = k_all[order], h_all[order]

    merged_k: List[float] = []
    merged_tags: List[Tuple[int, ...]] = []
    for k, h in zip(k_all, h_all):
        if merged_k and k - merged_k[-1] <= 1e-10 * k:
            merged_tags[-1] = merged_tags[-1] + (int(h),)
        else:
            merged_k.append(float(k))
            merged_tags.append((int(h),))
    return np.asarray(merged_k), merged_tags


def poles_p(g: MetricGraph, rep: RepIndex, kmax: float) -> List[PolePoint]:
    """
    Poles of p_j in (0, kmax].

    j = 0: odd multiples of pi/l_h. j = n/2: odd multiples for even a_h, even
    multiples for odd a_h. Interior j: all multiples, except that a class with
    2*j*a_h = 0 (mod n) keeps only the multiples that survive the reduction to
    tan or cot of half the argument. Coincident poles are merged and tagged.
    """
    if not kmax > 0:
        raise ValueError(f"kmax must be positive, got {kmax}")
    ks, tags = pole_array(g, rep, kmax)
    return [PolePoint(k=float(k), classes=t) for k, t in zip(ks, tags)]


def factorized_det(g: MetricGraph, k: float) -> float:
    """
    det M(k) through the representation factorization.

    p_0 * prod p_j^2 (odd n), with the extra factor p_{n/2} for even n.
    """
    _require_symmetric(g)
    result = 1.0
    for rep in representations(g.n):
        result *= eval_p(g, rep, k) ** rep.weight
    return result


# Hyperbolic functions on the imaginary axis


def _coth(x: np.ndarray) -> np.ndarray:
    return (1.0 + np.exp(-2.0 * x)) / -np.expm1(-2.0 * x)


def _csch(x: np.ndarray) -> np.ndarray:
    return 2.0 * np.exp(-x) / -np.expm1(-2.0 * x)


def _sinh_minus_identity(z: np.ndarray) -> np.ndarray:
    """sinh(z) - z, by its Taylor series for |z| < 1/2."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < 0.5
    zs = z[small]
    z2 = zs * zs
    out[small] = zs * z2 / 6.0 * (
        1 + z2 / 20 * (1 + z2 / 42 * (1 + z2 / 72 * (1 + z2 / 110 * (1 + z2 / 156))))
    )
    out[~small] = np.sinh(z[~small]) - z[~small]
    return out


def _split(x: np.ndarray, small_fn, large_fn, *args: np.ndarray) -> np.ndarray:
    """Apply small_fn where x < _SMALL and large_fn elsewhere; args broadcast with x."""
    x = np.asarray(x, dtype=float)
    args = [np.broadcast_to(a, x.shape) for a in args]
    out = np.empty_like(x)
    mask = x < _SMALL
    out[mask] = small_fn(x[mask], *[a[mask] for a in args])
    out[~mask] = large_fn(x[~mask], *[a[~mask] for a in args])
    return out


def _coth_minus_c_csch(x, c):
    """coth(x) - c*csch(x)."""
    return _split(
        x,
        lambda x, c: (2.0 * np.sinh(x / 2) ** 2 + (1.0 - c)) / np.sinh(x),
        lambda x, c: _coth(x) - c * _csch(x),
        c,
    )


def _d_t_coth_minus_c_csch(x, c):
    """d/dx of x*(coth(x) - c*csch(x))."""

    def small(x, c):
        v = _sinh_minus_identity(x) - 2.0 * x * np.sinh(x / 2) ** 2
        return (0.5 * _sinh_minus_identity(2.0 * x) - c * v) / np.sinh(x) ** 2

    def large(x, c):
        coth, csch = _coth(x), _csch(x)
        return (coth - c * csch) + x * csch * (c * coth - csch)

    return _split(x, small, large, c)


def _tanh_deficit(y):
    """tanh(y) - y*sech(y)^2, the numerator of -d/dt [tanh(t l/2)/t] * t^2."""
    return _split(
        y,
        lambda y: 0.5 * _sinh_minus_identity(2.0 * y) / np.cosh(y) ** 2,
        lambda y: np.tanh(y) - y * (1.0 - np.tanh(y) ** 2),
    )


def _symmetric_scaled_terms(g: MetricGraph, j: int, t: float) -> Tuple[float, float, int]:
    c, kind = class_coefficients(g.spec, j)
    ell = np.asarray(g.class_lengths)
    x = t * ell
    if np.all(kind == 1):
        # f̂_0(t)/t: every term is tanh(t l/2)/t
        y = x / 2
        value = np.tanh(y).sum() / t
        deriv = -_tanh_deficit(y).sum() / t**2
        return value, deriv, -1
    value = t * _coth_minus_c_csch(x, c).sum()
    deriv = _d_t_coth_minus_c_csch(x, c).sum()
    return value, deriv, 1


def weighted_log_derivative(g: MetricGraph, t: float) -> Tuple[float, int]:
    """
    Sum over representations of weight_j * d/dt log g_j(t) for a symmetric metric.

    Returns:
        (value, total power) where the total power is n - 2
    """
    total, power = 0.0, 0
    for rep in representations(g.n):
        value, deriv, q = _symmetric_scaled_terms(g, rep.j, t)
        total += rep.weight * deriv / value
        power += rep.weight * q
    return total, power


@lru_cache(maxsize=64)
def _complement_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the complement of the constant vector."""
    basis = null_space(np.ones((1, n)))
    basis.setflags(write=False)
    return basis


def _edge_terms(g: MetricGraph, t: float):
    L = g.length_array
    x = t * L
    t_coth = x / (L * np.tanh(x))
    t_csch = x * _csch(x) / L
    d_t_coth = _split(
        x,
        lambda x: 0.5 * _sinh_minus_identity(2.0 * x) / np.sinh(x) ** 2,
        lambda x: _coth(x) - x * _csch(x) ** 2,
    )
    d_t_csch = _split(
        x,
        lambda x: (_sinh_minus_identity(x) - 2.0 * x * np.sinh(x / 2) ** 2) / np.sinh(x) ** 2,
        lambda x: _csch(x) * (1.0 - x * _coth(x)),
    )
    return t_coth, t_csch, d_t_coth, d_t_csch


def _generic_scaled(g: MetricGraph, t: float) -> Tuple[float, float, float]:
    """
    g(t) = det[t*M̂(t)] / t^2 and its log-derivative.

    t*M̂(t) tends to minus a weighted Laplacian, so it is split on the constant
    vector and its complement. The complement block C stays negative definite;
    the constant direction contributes the Schur complement sigma(t), whose
    row sums are evaluated from tanh(t L/2) directly.

    Returns:
        (log|g|, sign of g, d/dt log g)
    """
    n = g.n
    t_coth, t_csch, d_t_coth, d_t_csch = _edge_terms(g, t)
    diag = np.arange(n)

    A = np.zeros((n, n))
    A[diag, diag] = -(t_coth @ g.incidence)
    A[g.tails, g.heads] = t_csch
    A[g.heads, g.tails] = t_csch
    dA = np.zeros((n, n))
    dA[diag, diag] = -(d_t_coth @ g.incidence)
    dA[g.tails, g.heads] = d_t_csch
    dA[g.heads, g.tails] = d_t_csch

    # row sums of A are t^2 * rho
    y = t * g.length_array / 2
    rho = -(np.tanh(y) / t) @ g.incidence
    d_rho = (_tanh_deficit(y) / t**2) @ g.incidence

    Q = _complement_basis(n)
    C = Q.T @ A @ Q
    dC = Q.T @ dA @ Q
    try:
        factor = cho_factor(-C)
    except LinAlgError as e:
        raise NearSingularMhat(f"t*M̂(t) is not definite at t={t!r}", {"t": t}) from e

    w = Q.T @ rho
    dw = Q.T @ d_rho
    Cinv_w = -cho_solve(factor, w)
    wCw = w @ Cinv_w
    d_wCw = 2.0 * dw @ Cinv_w - Cinv_w @ dC @ Cinv_w
    sigma = (rho.sum() - t**2 * wCw) / n
    d_sigma = (d_rho.sum() - 2.0 * t * wCw - t**2 * d_wCw) / n

    trace = -np.trace(cho_solve(factor, dC))
    log_det_C = 2.0 * np.log(np.diag(factor[0])).sum()
    sign = (-1.0) ** (n - 1) * np.sign(sigma)
    return log_det_C + math.log(abs(sigma)), sign, trace + d_sigma / sigma


def scaled_fhat(g: MetricGraph, rep: Union[RepIndex, str], t: float) -> ScaledFhat:
    """
    The small-t regular form of f̂ and its logarithmic derivative.

    Symmetric representations: g = f̂_0/t for j = 0, g = t*f̂_j otherwise.
    GENERIC: g = det[t*M̂(t)]/t^2 = t^(n-2) * det M̂(t).
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if rep == GENERIC:
        log_abs, sign, dlog = _generic_scaled(g, t)
        return ScaledFhat(sign * math.exp(log_abs), dlog, g.n - 2)
    _require_symmetric(g)
    value, deriv, q = _symmetric_scaled_terms(g, rep.j, t)
    return ScaledFhat(value, deriv / value, q)


def eval_fhat(g: MetricGraph, rep: Union[RepIndex, str], t: float) -> float:
    """
    Hyperbolic secular function at imaginary wavenumber k = i*t.

    Symmetric metrics: f̂_j(t) = sum_h [coth(t l_h) - c_h csch(t l_h)], which is
    sum tanh(t l_h/2) for j = 0 and mixes tanh/coth of t l_h/2 for j = n/2.
    GENERIC: det[t*M̂(t)], finite as t -> 0 where it behaves like c*t^2.
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if rep == GENERIC:
        log_abs, sign, _ = _generic_scaled(g, t)
        return sign * math.exp(log_abs + 2.0 * math.log(t))
    _require_symmetric(g)
    c, _ = class_coefficients(g.spec, rep.j)
    return float(_coth_minus_c_csch(t * np.asarray(g.class_lengths), c).sum())
