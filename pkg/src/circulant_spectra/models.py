"""
Circulant Spectra - Result Models

Records produced by the solver, statistics and zeta modules.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .graph import MetricGraph

# Provenance kinds
REP = "rep"
DIRICHLET = "dirichlet"
GENERIC_ROOT = "generic"

# Unfolding modes and representation classes
FULL = "full"
INTERIOR = "interior"
EDGE = "edge"

# Determinant methods
CLOSED_FORM = "closed_form"
NUMERIC_ZETA_PRIME = "numeric_zeta_prime"


@dataclass(frozen=True)
class Provenance:
    """
    Where an eigenvalue came from.

    REP entries are roots of p_j (rep_index = j). DIRICHLET entries sit on the
    Dirichlet set (edge_class, harmonic m, multiplicity |J|). GENERIC_ROOT
    entries are roots of det M(k) found by the generic solver.
    """

    kind: str
    rep_index: Optional[int] = None
    edge_class: Optional[int] = None
    harmonic_m: Optional[int] = None
    j_size: Optional[int] = None

    @classmethod
    def rep(cls, j: int) -> "Provenance":
        return cls(kind=REP, rep_index=j)

    @classmethod
    def dirichlet(cls, edge_class: int, m: int, j_size: int) -> "Provenance":
        return cls(kind=DIRICHLET, edge_class=edge_class, harmonic_m=m, j_size=j_size)

    @classmethod
    def generic_root(cls) -> "Provenance":
        return cls(kind=GENERIC_ROOT)


@dataclass
class SpectrumEntry:
    k: float
    multiplicity: int
    provenance: Provenance

    def to_dict(self) -> dict:
        p = self.provenance
        return {
            "k": self.k,
            "multiplicity": self.multiplicity,
            "provenance": p.kind,
            "rep_index": p.rep_index,
            "edge_class": p.edge_class,
            "harmonic_m": p.harmonic_m,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpectrumEntry":
        def opt_int(key):
            value = data.get(key)
            return None if value in (None, "") else int(value)

        kind = data.get("provenance", GENERIC_ROOT)
        m = opt_int("harmonic_m")
        multiplicity = int(data["multiplicity"])
        provenance = Provenance(
            kind=kind,
            rep_index=opt_int("rep_index"),
            edge_class=opt_int("edge_class"),
            harmonic_m=m,
            j_size=multiplicity if kind == DIRICHLET else None,
        )
        return cls(k=float(data["k"]), multiplicity=multiplicity, provenance=provenance)


@dataclass
class WeylCheck:
    """Assembled count against the Weyl estimate on (0, kmax]."""

    expected: float
    count: int
    bound: float

    @property
    def residual(self) -> float:
        return self.count - self.expected

    @property
    def within(self) -> bool:
        return abs(self.residual) <= self.bound

    def to_dict(self) -> dict:
        return {
            "expected": self.expected,
            "count": self.count,
            "residual": self.residual,
            "bound": self.bound,
            "within": self.within,
        }


@dataclass
class Spectrum:
    graph: MetricGraph
    entries: List[SpectrumEntry]
    kmax: float
    count_check: WeylCheck

    @property
    def ks(self) -> np.ndarray:
        return np.array([e.k for e in self.entries])

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([e.multiplicity for e in self.entries], dtype=int)

    @property
    def count(self) -> int:
        return int(self.multiplicities.sum()) if self.entries else 0

    def expanded(self) -> np.ndarray:
        """Every k repeated according to its multiplicity."""
        return np.repeat(self.ks, self.multiplicities)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class UnfoldedSpectrum:
    values: np.ndarray
    density_used: float
    mode: str = FULL

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])


@dataclass
class R2Estimate:
    bin_centers: np.ndarray
    values: np.ndarray
    pair_count: int
    xmax: float
    sequence_length: int

    @property
    def bin_width(self) -> float:
        return self.xmax / len(self.bin_centers)


@dataclass
class FitResult:
    c: float
    window: Tuple[float, float]
    residual: float
    window_sensitivity: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "window": list(self.window),
            "residual": self.residual,
            "window_sensitivity": self.window_sensitivity,
        }


@dataclass
class ZetaParts:
    pole_term: float
    integral01: float
    integral1inf: float
    rational_term: float

    def to_dict(self) -> dict:
        return {
            "pole_term": self.pole_term,
            "integral01": self.integral01,
            "integral1inf": self.integral1inf,
            "rational_term": self.rational_term,
        }


@dataclass
class ZetaValue:
    s: float
    value: float
    quadrature_error: float
    parts: ZetaParts

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "value": self.value,
            "quadrature_error": self.quadrature_error,
            "parts": self.parts.to_dict(),
        }


@dataclass
class DetResult:
    value: float
    method: str
    c_coefficient: Optional[float] = None

    def to_dict(self) -> dict:
        return {"value": self.value, "method": self.method, "c_coefficient": self.c_coefficient}
