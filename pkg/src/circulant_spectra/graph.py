"""
Circulant Spectra - Graphs

Circulant graph specifications, metric graphs (symmetric or generic edge
lengths), the Dirichlet set and the Weyl count estimate.
"""

import json
import logging
import math
from dataclasses import dataclass
from functools import cached_property, reduce
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from .config import defaults
from .errors import (
    Disconnected,
    EmptyJumpSet,
    GraphError,
    InvalidLength,
    InvalidProbability,
    JumpOutOfRange,
    NotStrictlyIncreasing,
    SchemaError,
    SpecFileNotFound,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CirculantSpec:
    """
    Jump set of a circulant graph C_n(a).

    Vertices are 1..n; vertex i is joined to i ± a_h (mod n) for every jump a_h.
    """

    n: int
    a: Tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.a)

    @property
    def E(self) -> int:
        return self.n * self.d

    def to_dict(self) -> dict:
        return {"n": self.n, "a": list(self.a)}

    @classmethod
    def from_dict(cls, data: dict) -> "CirculantSpec":
        return validate_spec(data["n"], data["a"])


def validate_spec(n: int, a: Sequence[int]) -> CirculantSpec:
    """
    Validate a jump set and build its spec.

    Args:
        n: Number of vertices (at least 3)
        a: Jumps, strictly increasing, each below n/2

    Returns:
        CirculantSpec with d and E populated

    Raises:
        EmptyJumpSet, NotStrictlyIncreasing, JumpOutOfRange, Disconnected
    """
    n = int(n)
    jumps = tuple(int(x) for x in a)
    if n < 3:
        raise JumpOutOfRange(f"n must be at least 3, got {n}", {"n": n})
    if not jumps:
        raise EmptyJumpSet("jump set is empty", {"n": n})
    for left, right in zip(jumps, jumps[1:]):
        if right <= left:
            raise NotStrictlyIncreasing(
                f"jumps must be strictly increasing, got {list(jumps)}", {"a": list(jumps)}
            )
    # 2*a < n also rejects the double-edge jump a = n/2
    if jumps[0] <= 0 or 2 * jumps[-1] >= n:
        raise JumpOutOfRange(
            f"jumps must satisfy 0 < a < n/2 for n={n}, got {list(jumps)}",
            {"n": n, "a": list(jumps)},
        )
    g = reduce(math.gcd, jumps, n)
    if g != 1:
        raise Disconnected(
            f"gcd({', '.join(map(str, jumps))}, {n}) = {g}; C_{n}{list(jumps)} is disconnected",
            {"n": n, "a": list(jumps), "gcd": g},
        )
    return CirculantSpec(n=n, a=jumps)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for p in range(3, math.isqrt(n) + 1, 2):
        if n % p == 0:
            return False
    return True


def random_spec(n: int, p: float, seed: int) -> CirculantSpec:
    """
    Draw a random jump set by a Bernoulli trial on each of 1..floor((n-1)/2).

    The same seed always gives the same spec. Empty or disconnected draws are
    redrawn from the same generator, up to the configured retry budget.

    Args:
        n: Number of vertices (prime recommended)
        p: Inclusion probability, 0 < p <= 1
        seed: Generator seed

    Returns:
        Validated CirculantSpec
    """
    if not (0.0 < p <= 1.0):
        raise InvalidProbability(f"p must lie in (0, 1], got {p}", {"p": p})
    if not is_prime(n):
        logger.warning(f"random_spec: n={n} is not prime; subspectrum statistics may mix in Dirichlet levels")

    rng = np.random.default_rng(seed)
    candidates = np.arange(1, (n - 1) // 2 + 1)
    last_error: Optional[GraphError] = None
    for attempt in range(defaults.random_spec_retries):
        picked = candidates[rng.random(candidates.size) < p]
        try:
            return validate_spec(n, picked.tolist())
        except (EmptyJumpSet, Disconnected) as e:
            logger.debug(f"random_spec attempt {attempt + 1} rejected: {e}")
            last_error = e

    if isinstance(last_error, Disconnected):
        raise last_error
    raise EmptyJumpSet(
        f"no valid jump set after {defaults.random_spec_retries} draws (n={n}, p={p})",
        {"n": n, "p": p, "seed": seed},
    )


def neighbors(spec: CirculantSpec, i: int) -> List[int]:
    """Neighbours of vertex i (1-based), sorted."""
    n = spec.n
    found = set()
    for a in spec.a:
        found.add((i - 1 + a) % n + 1)
        found.add((i - 1 - a) % n + 1)
    return sorted(found)


def edges(spec: CirculantSpec) -> List[Tuple[int, int, int]]:
    """
    Canonical edge list as (tail, head, class) triples.

    Edges are ordered class-major: all n edges of jump a_1 first, then a_2, and
    so on. Edge (i, i + a_h mod n) is oriented from i; vertices are 1-based and
    classes are 1-based.
    """
    return [
        (i, (i - 1 + a) % spec.n + 1, h)
        for h, a in enumerate(spec.a, start=1)
        for i in range(1, spec.n + 1)
    ]


def _check_lengths(values: Sequence[float], expected: int, what: str) -> Tuple[float, ...]:
    lengths = tuple(float(x) for x in values)
    if len(lengths) != expected:
        raise InvalidLength(
            f"expected {expected} {what} lengths, got {len(lengths)}",
            {"expected": expected, "got": len(lengths)},
        )
    if not all(math.isfinite(x) and x > 0 for x in lengths):
        raise InvalidLength(f"{what} lengths must be positive and finite", {"lengths": list(lengths)})
    return lengths


@dataclass(frozen=True)
class MetricGraph:
    """
    A circulant graph with edge lengths.

    Symmetric metrics give every edge of jump class h the same length
    class_lengths[h-1]; generic metrics carry one length per canonical edge.
    `lengths` always holds the per-edge values.
    """

    spec: CirculantSpec
    lengths: Tuple[float, ...]
    class_lengths: Optional[Tuple[float, ...]] = None

    @classmethod
    def symmetric(cls, spec: CirculantSpec, lengths: Sequence[float]) -> "MetricGraph":
        ell = _check_lengths(lengths, spec.d, "class")
        return cls(spec=spec, lengths=tuple(x for x in ell for _ in range(spec.n)), class_lengths=ell)

    @classmethod
    def generic(cls, spec: CirculantSpec, lengths: Sequence[float]) -> "MetricGraph":
        return cls(spec=spec, lengths=_check_lengths(lengths, spec.E, "edge"))

    @classmethod
    def random_uniform(
        cls,
        spec: CirculantSpec,
        lo: Optional[float] = None,
        hi: Optional[float] = None,
        seed: int = 0,
        symmetric: bool = False,
    ) -> "MetricGraph":
        """Lengths drawn uniformly from (lo, hi), per edge or per class."""
        default_lo, default_hi = defaults.default_length_interval
        lo = default_lo if lo is None else float(lo)
        hi = default_hi if hi is None else float(hi)
        if not (0 < lo < hi):
            raise InvalidLength(f"length interval must satisfy 0 < lo < hi, got ({lo}, {hi})")
        rng = np.random.default_rng(seed)
        if symmetric:
            return cls.symmetric(spec, rng.uniform(lo, hi, size=spec.d).tolist())
        return cls.generic(spec, rng.uniform(lo, hi, size=spec.E).tolist())

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def d(self) -> int:
        return self.spec.d

    @property
    def E(self) -> int:
        return self.spec.E

    @property
    def is_symmetric(self) -> bool:
        return self.class_lengths is not None

    @property
    def total_length(self) -> float:
        return math.fsum(self.lengths)

    @cached_property
    def length_array(self) -> np.ndarray:
        return np.asarray(self.lengths, dtype=float)

    @cached_property
    def tails(self) -> np.ndarray:
        """0-based tail vertex of each canonical edge."""
        return np.tile(np.arange(self.n), self.d)

    @cached_property
    def heads(self) -> np.ndarray:
        """0-based head vertex of each canonical edge."""
        return np.concatenate([(np.arange(self.n) + a) % self.n for a in self.spec.a])

    @cached_property
    def edge_classes(self) -> np.ndarray:
        """1-based jump class of each canonical edge."""
        return np.repeat(np.arange(1, self.d + 1), self.n)

    @cached_property
    def incidence(self) -> np.ndarray:
        """Unsigned E x n incidence matrix (1 at both endpoints)."""
        inc = np.zeros((self.E, self.n))
        rows = np.arange(self.E)
        inc[rows, self.tails] = 1.0
        inc[rows, self.heads] = 1.0
        return inc

    def as_generic(self) -> "MetricGraph":
        """The same graph with the per-class structure forgotten."""
        return MetricGraph(spec=self.spec, lengths=self.lengths)

    def scaled(self, lam: float) -> "MetricGraph":
        if self.is_symmetric:
            return MetricGraph.symmetric(self.spec, [lam * x for x in self.class_lengths])
        return MetricGraph.generic(self.spec, [lam * x for x in self.lengths])

    def to_dict(self) -> dict:
        data = self.spec.to_dict()
        if self.is_symmetric:
            data["metric"] = {"symmetric": list(self.class_lengths)}
        else:
            data["metric"] = {"generic": list(self.lengths)}
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "MetricGraph":
        return graph_from_document(data)


@dataclass(frozen=True)
class DirichletPoint:
    """
    A wavenumber k = m*pi/length of the decoupled-edge Dirichlet spectrum.

    `source` is the 1-based jump class for symmetric metrics (kind "class") or
    the 0-based canonical edge index for generic metrics (kind "edge").
    """

    k: float
    source: int
    m: int
    length: float
    kind: str = "class"

    def is_consistent(self, tol: float = 1e-9) -> bool:
        ratio = self.k * self.length / math.pi
        return abs(ratio - round(ratio)) <= tol * max(1.0, ratio)


def dirichlet_points(g: MetricGraph, kmax: float) -> List[DirichletPoint]:
    """
    All Dirichlet points m*pi/L <= kmax, sorted by k.

    Symmetric metrics enumerate one family per jump class; generic metrics one
    family per edge.
    """
    if not kmax > 0:
        raise ValueError(f"kmax must be positive, got {kmax}")
    if g.is_symmetric:
        families = [(h, L, "class") for h, L in enumerate(g.class_lengths, start=1)]
    else:
        families = [(e, L, "edge") for e, L in enumerate(g.lengths)]

    points = []
    for source, L, kind in families:
        for m in range(1, math.floor(kmax * L / math.pi) + 1):
            points.append(DirichletPoint(k=m * math.pi / L, source=source, m=m, length=L, kind=kind))
    points.sort(key=lambda p: (p.k, p.source))
    return points


def weyl_remainder_bound(g: MetricGraph) -> float:
    n, d = g.n, g.d
    return float(n * d + n + d) if g.is_symmetric else float(n * d + n)


def weyl_estimate(g: MetricGraph, a: float, b: float) -> Tuple[float, float]:
    """
    Weyl count estimate for the number of k-eigenvalues in (a, b].

    Returns:
        (expected, bound) with expected = (b - a) * total_length / pi and the
        remainder bound n*d + n + d (symmetric) or n*d + n (generic)
    """
    if not (0 <= a <= b):
        raise ValueError(f"need 0 <= a <= b, got ({a}, {b})")
    return (b - a) * g.total_length / math.pi, weyl_remainder_bound(g)


# Graph spec files


class RandomUniformMetric(BaseModel):
    lo: float = Field(..., gt=0)
    hi: float = Field(..., gt=0)
    seed: int = 0
    symmetric: bool = False


class MetricSpec(BaseModel):
    symmetric: Optional[List[float]] = None
    generic: Optional[List[float]] = None
    random_uniform: Optional[RandomUniformMetric] = None

    @model_validator(mode="after")
    def exactly_one(self) -> "MetricSpec":
        given = [k for k in ("symmetric", "generic", "random_uniform") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(f"metric needs exactly one of symmetric/generic/random_uniform, got {given}")
        return self


class GraphSpecFile(BaseModel):
    """Schema of a graph spec JSON document."""

    n: int
    a: List[int]
    metric: MetricSpec


def graph_from_document(data: Union[dict, GraphSpecFile]) -> MetricGraph:
    """
    Build a MetricGraph from a parsed spec document.

    Raises:
        SchemaError: the document violates the schema or describes an invalid graph
    """
    try:
        doc = data if isinstance(data, GraphSpecFile) else GraphSpecFile.model_validate(data)
    except ValidationError as e:
        raise SchemaError(
            f"invalid graph spec: {e.errors()[0]['msg']}", {"errors": json.loads(e.json())}
        ) from e
    try:
        spec = validate_spec(doc.n, doc.a)
        metric = doc.metric
        if metric.symmetric is not None:
            return MetricGraph.symmetric(spec, metric.symmetric)
        if metric.generic is not None:
            return MetricGraph.generic(spec, metric.generic)
        r = metric.random_uniform
        return MetricGraph.random_uniform(spec, r.lo, r.hi, seed=r.seed, symmetric=r.symmetric)
    except GraphError as e:
        raise SchemaError(
            f"invalid graph spec: {e.message}", {"cause": type(e).__name__, **e.detail}
        ) from e


def load_graph_spec(path: Union[str, Path]) -> MetricGraph:
    """Read and validate a graph spec JSON file."""
    path = Path(path)
    if not path.exists():
        raise SpecFileNotFound(f"spec file not found: {path}", {"path": str(path)})
    try:
        data = json.loads(path.read_text())
    except ValueError as e:
        raise SchemaError(f"spec file is not valid JSON: {e}", {"path": str(path)}) from e
    return graph_from_document(data)


def spec_document(spec: CirculantSpec, metric: Dict) -> dict:
    """Spec-file document for a jump set and a metric block."""
    return {**spec.to_dict(), "metric": metric}
