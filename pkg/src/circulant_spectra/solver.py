"""
Circulant Spectra - Spectrum Solver

Complete, annotated k-spectra of quantum circulant graphs with standard vertex
conditions.

Symmetric metrics are solved one representation at a time: p_j is increasing
between its poles, so each inter-pole interval holds exactly one root, found by
bisection. Points of the Dirichlet set are added with their multiplicity.
Generic metrics are solved from M(k) itself: between Dirichlet points the
number of its negative eigenvalues drops by one at each root. Both paths validate the final count against the Weyl law.
"""

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import config
from .checkpoints import CheckpointStore, run_key
from .config import defaults
from .errors import (
    DimensionTooSmall,
    EmptySpectrum,
    MonotonicityViolation,
    SymmetricMetricWarning,
    WeylCountMismatch,
)
from .graph import MetricGraph, dirichlet_points, weyl_estimate
from .models import (
    EDGE,
    FULL,
    INTERIOR,
    Provenance,
    Spectrum,
    SpectrumEntry,
    UnfoldedSpectrum,
    WeylCheck,
)
from .secular import (
    RepIndex,
    class_coefficients,
    eval_p_many,
    negative_count_M_batch,
    pole_array,
    representations,
)

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int], None]

# Checkpoint-only marker for p_j roots that fell on the Dirichlet set
_EXCLUDED = "excluded"

# Relative distance below which a p_j root counts as sitting on a Dirichlet point
_ON_DIRICHLET = 1e-9


def _as_rep(n: int, rep: Union[RepIndex, int]) -> RepIndex:
    return rep if isinstance(rep, RepIndex) else RepIndex.of(n, rep)


def _evaluate_chunked(f: Callable[[np.ndarray], np.ndarray], ks: np.ndarray, width: int) -> np.ndarray:
    size = max(1, int(defaults.batch_entries // max(width, 1)))
    if ks.size <= size:
        return f(ks)
    return np.concatenate([f(ks[i : i + size]) for i in range(0, ks.size, size)])


def _bisect_increasing(f, lo: np.ndarray, hi: np.ndarray, tol: float, width: int) -> np.ndarray:
    """Simultaneous bisection of brackets with f(lo) < 0 < f(hi)."""
    if lo.size == 0:
        return lo
    span = float(np.max(hi - lo))
    steps = max(1, math.ceil(math.log2(span / tol))) if span > tol else 1
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        negative = _evaluate_chunked(f, mid, width) < 0
        lo = np.where(negative, mid, lo)
        hi = np.where(negative, hi, mid)
    return 0.5 * (lo + hi)


def _on_dirichlet_set(ks: np.ndarray, lengths: Sequence[float], tol: float) -> np.ndarray:
    hit = np.zeros(ks.shape, dtype=bool)
    for ell in lengths:
        step = math.pi / ell
        hit |= np.abs(ks - step * np.round(ks / step)) < tol
    return hit


def _rep_roots(g: MetricGraph, rep: RepIndex, kmax: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Roots of p_j in (0, kmax].

    Returns:
        (roots, excluded): roots off the Dirichlet set, and roots that coincide
        with a Dirichlet point (left for the Dirichlet stage to resolve)
    """
    tol = defaults.bisection_rel_tol * kmax
    ell = g.class_lengths
    # every class has a pole within 2*pi/l past kmax
    poles, _ = pole_array(g, rep, kmax + 2.0 * math.pi / min(ell))
    d = g.d

    def p(ks):
        return eval_p_many(g, rep, ks, check=False)

    lefts = np.concatenate([[0.0], poles[:-1]])
    rights = poles
    keep = lefts < kmax
    lefts, rights = lefts[keep], rights[keep]
    widths = rights - lefts

    lo = lefts + 1e-9 * widths
    hi = rights - 1e-9 * widths
    f_lo = _evaluate_chunked(p, lo, d)
    f_hi = _evaluate_chunked(p, hi, d)

    # a root hugging a pole needs a tighter guard
    for shrink in (1e-3, 1e-6):
        bad = (f_lo >= 0) & (np.arange(lo.size) > 0)
        if bad.any():
            lo[bad] = lefts[bad] + 1e-9 * shrink * widths[bad]
            f_lo[bad] = p(lo[bad])
        bad = f_hi <= 0
        if bad.any():
            hi[bad] = rights[bad] - 1e-9 * shrink * widths[bad]
            f_hi[bad] = p(hi[bad])

    # the leading interval (0, first pole) holds a root only if p starts negative
    has_root = np.ones(lo.size, dtype=bool)
    if lo.size and f_lo[0] >= 0:
        has_root[0] = False
    broken = has_root & ~((f_lo < 0) & (f_hi > 0))
    if broken.any():
        i = int(np.flatnonzero(broken)[0])
        raise MonotonicityViolation(
            f"p_{rep.j} has no sign change on ({lefts[i]!r}, {rights[i]!r})",
            {"j": rep.j, "interval": [float(lefts[i]), float(rights[i])],
             "values": [float(f_lo[i]), float(f_hi[i])]},
        )

    roots = _bisect_increasing(p, lo[has_root], hi[has_root], tol, d)
    roots = roots[roots <= kmax]
    on_set = _on_dirichlet_set(roots, ell, _ON_DIRICHLET * max(kmax, 1.0))
    logger.debug(f"p_{rep.j}: {roots.size} roots, {int(on_set.sum())} on the Dirichlet set")
    return roots[~on_set], roots[on_set]


def roots_p(g: MetricGraph, rep: Union[RepIndex, int], kmax: float) -> List[SpectrumEntry]:
    """
    Roots of p_j up to kmax, one per inter-pole interval.

    Roots that land on a Dirichlet point are left out; the Dirichlet stage of
    spectrum_symmetric accounts for them.

    Args:
        g: Graph with a symmetric metric
        rep: Representation (RepIndex or j)
        kmax: Upper end of the search

    Returns:
        SpectrumEntry list with multiplicity equal to the representation weight
    """
    if not g.is_symmetric:
        raise ValueError("roots_p needs a symmetric metric")
    rep = _as_rep(g.n, rep)
    roots, _ = _rep_roots(g, rep, kmax)
    provenance = Provenance.rep(rep.j)
    return [SpectrumEntry(k=float(k), multiplicity=rep.weight, provenance=provenance) for k in roots]


def dirichlet_j_set(g: MetricGraph, edge_class: int, m: int) -> List[int]:
    """Representations j in 0..n-1 with 2*j*a_g = q*n, q of the same parity as m."""
    n = g.n
    a = g.spec.a[edge_class - 1]
    return [j for j in range(n) if (2 * j * a) % n == 0 and ((2 * j * a) // n) % 2 == m % 2]


def dirichlet_multiplicity(g: MetricGraph, kmax: float) -> List[SpectrumEntry]:
    """
    Multiplicities of the Dirichlet points up to kmax for generic symmetric lengths.

    Each point m*pi/l_g has multiplicity |J|; points with empty J are omitted.

    Raises:
        DimensionTooSmall: d = 1, where the counting argument does not apply
    """
    if not g.is_symmetric:
        raise ValueError("dirichlet_multiplicity needs a symmetric metric")
    if g.d < 2:
        raise DimensionTooSmall("Dirichlet multiplicities need d >= 2", {"d": g.d})
    sizes: Dict[Tuple[int, int], int] = {}
    entries = []
    for point in dirichlet_points(g, kmax):
        key = (point.source, point.m % 2)
        if key not in sizes:
            sizes[key] = len(dirichlet_j_set(g, point.source, point.m))
        size = sizes[key]
        if size:
            entries.append(
                SpectrumEntry(
                    k=point.k,
                    multiplicity=size,
                    provenance=Provenance.dirichlet(point.source, point.m, size),
                )
            )
    return entries


def dirichlet_nullity(g: MetricGraph, k: float, tol: float = 1e-9) -> int:
    """
    Exact multiplicity of k^2 when k lies on the Dirichlet set.

    Unknowns are the vertex values and, on every edge with sin(k L) = 0, the
    amplitude of sin(k x). The equations are continuity across those edges and
    the Kirchhoff sum at every vertex; the multiplicity is the nullity.
    """
    L = g.length_array
    x = k * L
    on = np.abs(np.sin(x)) < tol
    n = g.n
    D = int(on.sum())
    if D == 0:
        return 0
    sign = np.round(np.cos(x[on]))
    tails, heads = g.tails[on], g.heads[on]

    continuity = np.zeros((D, n + D))
    rows = np.arange(D)
    continuity[rows, heads] += 1.0
    continuity[rows, tails] -= sign

    kirchhoff = np.zeros((n, n + D))
    off = ~on
    if off.any():
        cot = np.cos(x[off]) / np.sin(x[off])
        csc = 1.0 / np.sin(x[off])
        t_off, h_off = g.tails[off], g.heads[off]
        np.add.at(kirchhoff, (t_off, t_off), -cot)
        np.add.at(kirchhoff, (h_off, h_off), -cot)
        np.add.at(kirchhoff, (t_off, h_off), csc)
        np.add.at(kirchhoff, (h_off, t_off), csc)
    kirchhoff[tails, n + rows] += 1.0
    kirchhoff[heads, n + rows] -= sign

    system = np.vstack([continuity, kirchhoff])
    singular = np.linalg.svd(system, compute_uv=False)
    rank = int(np.sum(singular > 1e-8 * singular[0]))
    return n + D - rank


def _merge_entries(entries: List[SpectrumEntry], tol: float) -> List[SpectrumEntry]:
    entries = sorted(entries, key=lambda e: e.k)
    merged: List[SpectrumEntry] = []
    for entry in entries:
        if merged and entry.k - merged[-1].k <= tol:
            last = merged[-1]
            merged[-1] = SpectrumEntry(
                k=last.k, multiplicity=last.multiplicity + entry.multiplicity, provenance=last.provenance
            )
        else:
            merged.append(entry)
    return merged


def weyl_check(g: MetricGraph, count: int, kmax: float) -> WeylCheck:
    expected, bound = weyl_estimate(g, 0.0, kmax)
    return WeylCheck(expected=expected, count=int(count), bound=bound)


def _assert_weyl(check: WeylCheck, method: str, detail: Optional[dict] = None) -> None:
    if not check.within:
        raise WeylCountMismatch(
            f"{method}: count {check.count} is {check.residual:+.2f} from the Weyl estimate "
            f"{check.expected:.2f} (bound {check.bound:g})",
            {**check.to_dict(), **(detail or {})},
        )


def _dirichlet_stage(g: MetricGraph, kmax: float, excluded: np.ndarray) -> List[SpectrumEntry]:
    points = dirichlet_points(g, kmax)
    groups: List[list] = []
    for point in points:
        if groups and point.k - groups[-1][0].k <= 1e-10 * point.k:
            groups[-1].append(point)
        else:
            groups.append([point])

    tol = _ON_DIRICHLET * max(kmax, 1.0)
    rule_sizes: Dict[Tuple[int, int], int] = {}
    entries = []
    for group in groups:
        head = group[0]
        flagged = excluded.size and np.min(np.abs(excluded - head.k)) < tol
        if g.d == 1 or len(group) > 1 or flagged:
            size = dirichlet_nullity(g, head.k)
            logger.debug(f"Dirichlet point k={head.k:.12g}: null-space multiplicity {size}")
        else:
            key = (head.source, head.m % 2)
            if key not in rule_sizes:
                rule_sizes[key] = len(dirichlet_j_set(g, head.source, head.m))
            size = rule_sizes[key]
        if size:
            entries.append(
                SpectrumEntry(k=head.k, multiplicity=size, provenance=Provenance.dirichlet(head.source, head.m, size))
            )
    return entries


def spectrum_symmetric(
    g: MetricGraph,
    kmax: float,
    threads: Optional[int] = None,
    checkpoint: Optional[CheckpointStore] = None,
    progress: Optional[ProgressCallback] = None,
) -> Spectrum:
    """
    Full spectrum of a symmetric metric up to kmax.

    The union of the roots of every p_j (with weights) and the Dirichlet
    points. Isolated Dirichlet points take the multiplicity |J|; points where
    classes coincide, where some p_j vanishes, or where d = 1 are resolved
    from the null space of the vertex system.

    Raises:
        WeylCountMismatch: the assembled count violates the Weyl bound
    """
    if not g.is_symmetric:
        raise ValueError("spectrum_symmetric needs a symmetric metric")
    if not kmax > 0:
        raise ValueError(f"kmax must be positive, got {kmax}")
    if len(set(g.class_lengths)) < g.d:
        logger.warning("Coincident class lengths: shared Dirichlet points are resolved by null-space rank")

    reps = representations(g.n)
    key = run_key(g, kmax, "symmetric") if checkpoint else None
    done = checkpoint.completed_units(key) if checkpoint else {}

    found: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
    for rep in reps:
        stored = done.get(f"rep:{rep.j}")
        if stored is not None:
            found[rep.j] = (
                np.array([e.k for e in stored if e.provenance.kind != _EXCLUDED]),
                np.array([e.k for e in stored if e.provenance.kind == _EXCLUDED]),
            )
    todo = [rep for rep in reps if rep.j not in found]
    if found:
        logger.info(f"Resuming: {len(found)} of {len(reps)} representations restored from checkpoint")

    def solve(rep: RepIndex):
        return rep, _rep_roots(g, rep, kmax)

    workers = max(1, min(threads or config.CIRC_THREADS, len(todo) or 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for rep, (roots, excluded) in pool.map(solve, todo):
            found[rep.j] = (roots, excluded)
            if checkpoint:
                marker = Provenance(kind=_EXCLUDED, rep_index=rep.j)
                checkpoint.commit(
                    key,
                    f"rep:{rep.j}",
                    [SpectrumEntry(float(k), rep.weight, Provenance.rep(rep.j)) for k in roots]
                    + [SpectrumEntry(float(k), rep.weight, marker) for k in excluded],
                )
            if progress:
                progress(len(found), len(reps))

    entries: List[SpectrumEntry] = []
    for rep in reps:
        roots, _ = found[rep.j]
        logger.info(f"p_{rep.j}: {roots.size} roots up to k={kmax:g}")
        provenance = Provenance.rep(rep.j)
        entries.extend(SpectrumEntry(float(k), rep.weight, provenance) for k in roots)
    excluded_all = np.concatenate([found[rep.j][1] for rep in reps])
    entries.extend(_dirichlet_stage(g, kmax, excluded_all))

    merged = _merge_entries(entries, 1e-10 * max(kmax, 1.0))
    check = weyl_check(g, sum(e.multiplicity for e in merged), kmax)
    _assert_weyl(check, "spectrum_symmetric")
    if checkpoint:
        checkpoint.clear(key)
    return Spectrum(graph=g, entries=merged, kmax=float(kmax), count_check=check)


# Generic metrics


def _has_symmetric_lengths(g: MetricGraph) -> bool:
    if g.is_symmetric:
        return True
    per_class = g.length_array.reshape(g.d, g.n)
    return bool(np.all(per_class == per_class[:, :1]))


def _dirichlet_boundaries(g: MetricGraph, kmax: float) -> np.ndarray:
    # no positive eigenvalue lies below pi / total_length
    start = 0.5 * math.pi / g.total_length
    if kmax <= start:
        return np.array([start])
    points = np.concatenate(
        [np.arange(1, math.floor(kmax * L / math.pi) + 1) * math.pi / L for L in g.lengths]
    )
    points = np.sort(points[points < kmax])
    if points.size:
        keep = np.concatenate([[True], np.diff(points) > 1e-10 * points[1:]])
        points = points[keep]
    return np.concatenate([[start], points, [kmax]])


def _scan(g: MetricGraph, lefts: np.ndarray, rights: np.ndarray, step: float):
    """Sample every Dirichlet-free piece; return the sample intervals where the negative count moves."""
    widths = rights - lefts
    lo = lefts + 1e-9 * widths
    hi = rights - 1e-9 * widths
    counts = np.maximum(np.ceil((hi - lo) / step).astype(int), 2) + 1
    seg_id = np.repeat(np.arange(lo.size), counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    frac = (np.arange(seg_id.size) - starts) / np.repeat(counts - 1, counts)
    samples = np.repeat(lo, counts) + frac * np.repeat(hi - lo, counts)
    negative = negative_count_M_batch(g, samples)

    moved = (seg_id[1:] == seg_id[:-1]) & (negative[1:] != negative[:-1])
    idx = np.flatnonzero(moved)
    return samples[idx], samples[idx + 1], negative[idx], negative[idx + 1]


def _isolate(g: MetricGraph, lo, hi, n_lo, n_hi, tol: float):
    """
    Split intervals holding several roots until each holds exactly one.

    Returns:
        (lo, hi, n_lo) of single-root intervals, and the midpoints of intervals
        narrower than tol that still hold several roots, one per root
    """
    frac = np.linspace(0.0, 1.0, 9)
    several = np.abs(n_hi - n_lo) > 1
    single = [(lo[~several], hi[~several], n_lo[~several])]
    coincident = []
    lo, hi, n_lo, n_hi = lo[several], hi[several], n_lo[several], n_hi[several]

    while lo.size:
        narrow = hi - lo <= tol
        if narrow.any():
            coincident.append(np.repeat(0.5 * (lo + hi)[narrow], np.abs(n_hi - n_lo)[narrow]))
            lo, hi, n_lo, n_hi = lo[~narrow], hi[~narrow], n_lo[~narrow], n_hi[~narrow]
            if lo.size == 0:
                break
        logger.debug(f"splitting {lo.size} intervals holding several roots")
        grid = lo[:, None] + frac[None, :] * (hi - lo)[:, None]
        inner = negative_count_M_batch(g, grid[:, 1:-1].ravel()).reshape(lo.size, frac.size - 2)
        negative = np.concatenate([n_lo[:, None], inner, n_hi[:, None]], axis=1)
        a, b = grid[:, :-1].ravel(), grid[:, 1:].ravel()
        n_a, n_b = negative[:, :-1].ravel(), negative[:, 1:].ravel()
        moved = n_a != n_b
        a, b, n_a, n_b = a[moved], b[moved], n_a[moved], n_b[moved]
        several = np.abs(n_b - n_a) > 1
        single.append((a[~several], b[~several], n_a[~several]))
        lo, hi, n_lo, n_hi = a[several], b[several], n_a[several], n_b[several]

    lo, hi, n_lo = (np.concatenate(parts) for parts in zip(*single))
    return lo, hi, n_lo, (np.concatenate(coincident) if coincident else np.empty(0))


def _bisect_count(g: MetricGraph, lo, hi, n_lo, tol: float) -> np.ndarray:
    """Bisect single-root intervals on the negative count."""
    if lo.size == 0:
        return lo
    span = float(np.max(hi - lo))
    steps = max(1, math.ceil(math.log2(span / tol))) if span > tol else 1
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        right = negative_count_M_batch(g, mid) == n_lo
        lo = np.where(right, mid, lo)
        hi = np.where(right, hi, mid)
    return 0.5 * (lo + hi)


def _solve_pieces(g: MetricGraph, lefts: np.ndarray, rights: np.ndarray, step: float, tol: float) -> np.ndarray:
    lo, hi, n_lo, n_hi = _scan(g, lefts, rights, step)
    lo, hi, n_lo, coincident = _isolate(g, lo, hi, n_lo, n_hi, tol)
    if coincident.size:
        logger.warning(f"{coincident.size} roots closer than {tol:.1e} reported at shared midpoints")
    return np.sort(np.concatenate([_bisect_count(g, lo, hi, n_lo, tol), coincident]))


def _generic_sweep(
    g: MetricGraph,
    kmax: float,
    step: float,
    checkpoint: Optional[CheckpointStore],
    progress: Optional[ProgressCallback],
) -> np.ndarray:
    boundaries = _dirichlet_boundaries(g, kmax)
    lefts, rights = boundaries[:-1], boundaries[1:]
    tol = defaults.bisection_rel_tol * kmax

    block_width = config.CIRC_CHECKPOINT_EVERY * math.pi / g.total_length
    block_of = np.floor(lefts / block_width).astype(int)
    blocks = np.unique(block_of)

    key = run_key(g, kmax, "generic", step=repr(step)) if checkpoint else None
    done = checkpoint.completed_units(key) if checkpoint else {}
    if done:
        logger.info(f"Resuming: {len(done)} of {blocks.size} k-blocks restored from checkpoint")

    found = []
    for i, block in enumerate(blocks):
        unit = f"block:{block}"
        if unit in done:
            found.append(np.array([e.k for e in done[unit]]))
        else:
            mask = block_of == block
            roots = _solve_pieces(g, lefts[mask], rights[mask], step, tol)
            found.append(roots)
            if checkpoint:
                provenance = Provenance.generic_root()
                checkpoint.commit(key, unit, [SpectrumEntry(float(k), 1, provenance) for k in roots])
        if progress:
            progress(i + 1, blocks.size)
    if checkpoint:
        checkpoint.clear(key)
    return np.sort(np.concatenate(found)) if found else np.empty(0)


def _first_excess(g: MetricGraph, roots: np.ndarray, bound: float) -> Optional[float]:
    residual = np.arange(1, roots.size + 1) - roots * g.total_length / math.pi
    over = np.flatnonzero(np.abs(residual) > bound)
    return float(roots[over[0]]) if over.size else None


def spectrum_generic(
    g: MetricGraph,
    kmax: float,
    checkpoint: Optional[CheckpointStore] = None,
    progress: Optional[ProgressCallback] = None,
) -> Spectrum:
    """
    Spectrum from the roots of det M(k) up to kmax.

    (pi/(2*total_length), kmax) is cut at every Dirichlet point and each piece
    is sampled with step pi/(4*total_length). The negative-eigenvalue count of
    M(k) tells how many roots each sample interval holds; intervals with
    several are split until each root is alone, then bisected on the count to
    bisection_rel_tol * kmax.
    When the count misses the Weyl bound the step is halved, up to
    max_refinements times.

    Raises:
        WeylCountMismatch: the count still misses the bound after refinement
    """
    if not kmax > 0:
        raise ValueError(f"kmax must be positive, got {kmax}")
    if _has_symmetric_lengths(g):
        message = "symmetric lengths put eigenvalues on the Dirichlet set where the generic solver cannot see them; use spectrum_symmetric"
        logger.warning(message)
        warnings.warn(message, SymmetricMetricWarning, stacklevel=2)

    step = math.pi / (4.0 * g.total_length)
    for attempt in range(defaults.max_refinements + 1):
        roots = _generic_sweep(g, kmax, step, checkpoint, progress)
        check = weyl_check(g, roots.size, kmax)
        if check.within:
            entries = [SpectrumEntry(float(k), 1, Provenance.generic_root()) for k in roots]
            return Spectrum(graph=g, entries=entries, kmax=float(kmax), count_check=check)
        logger.warning(
            f"spectrum_generic: residual {check.residual:+.2f} exceeds {check.bound:g} at step {step:.3g}; "
            f"refining (pass {attempt + 1})"
        )
        step /= 2.0

    _assert_weyl(check, "spectrum_generic", {"first_excess_k": _first_excess(g, roots, check.bound)})


def spectrum(g: MetricGraph, kmax: float, method: str = "auto", **kwargs) -> Spectrum:
    """Dispatch to spectrum_symmetric or spectrum_generic."""
    if method == "auto":
        method = "symmetric" if g.is_symmetric else "generic"
    if method == "symmetric":
        return spectrum_symmetric(g, kmax, **kwargs)
    if method == "generic":
        kwargs.pop("threads", None)
        return spectrum_generic(g, kmax, **kwargs)
    raise ValueError(f"unknown method {method!r}")


def unfold(
    s: Union[Spectrum, List[SpectrumEntry]],
    mode: str = FULL,
    graph: Optional[MetricGraph] = None,
) -> UnfoldedSpectrum:
    """
    Rescale wavenumbers by the Weyl density so the mean spacing is 1.

    FULL uses total_length/pi and repeats each level by its multiplicity.
    INTERIOR and EDGE use the subspectrum densities total_length/(pi*n) and
    total_length/(2*pi*n) and count each level once.
    """
    if isinstance(s, Spectrum):
        entries, graph = s.entries, s.graph
    else:
        entries = list(s)
    if not entries:
        raise EmptySpectrum("nothing to unfold")
    if graph is None:
        raise ValueError("unfolding an entry list needs the graph")

    densities = {
        FULL: graph.total_length / math.pi,
        INTERIOR: graph.total_length / (math.pi * graph.n),
        EDGE: graph.total_length / (2.0 * math.pi * graph.n),
    }
    if mode not in densities:
        raise ValueError(f"unknown unfolding mode {mode!r}")
    if mode != FULL:
        ks = np.array([e.k for e in entries])
    elif isinstance(s, Spectrum):
        ks = s.expanded()
    else:
        ks = np.repeat([e.k for e in entries], [e.multiplicity for e in entries])
    density = densities[mode]
    return UnfoldedSpectrum(values=np.sort(ks) * density, density_used=density, mode=mode)


def subspectrum_mode(g: MetricGraph, rep: Union[RepIndex, int]) -> str:
    """Unfolding mode for the subspectrum of one representation."""
    return EDGE if _as_rep(g.n, rep).is_edge(g.n) else INTERIOR
