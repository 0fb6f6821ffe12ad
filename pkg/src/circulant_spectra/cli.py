"""
Circulant Spectra - Command Line Interface

Spectra, spectral statistics, zeta values, determinants and vacuum energies of
quantum circulant graphs from the shell. Results are written as CSV/JSON
artifacts; a one-line summary goes to the console and failures are reported as
a JSON document on stderr with a distinct exit code.
"""

import argparse
import json
import logging
import math
import sys
from typing import Callable, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, ValidationError, model_validator
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
    TimeRemainingColumn,
)

from . import config as settings
from .artifacts import (
    read_r2_csv,
    read_spectrum_csv,
    resolve_output,
    write_integrated_nnsd_csv,
    write_json,
    write_nnsd_csv,
    write_r2_csv,
    write_spectrum_csv,
    zeta_report,
)
from .checkpoints import CheckpointStore
from .config import defaults
from .errors import CirculantError, DomainViolation, NoBracket, UsageError, VerificationFailed
from .graph import MetricGraph, is_prime, load_graph_spec, random_spec, spec_document, validate_spec
from .models import FULL
from .perf import PerformanceLogger
from .secular import RepIndex
from .solver import roots_p, spectrum, subspectrum_mode, unfold
from .stats import fit_small_c, integrated_nnsd, nnsd, r2_estimate, sup_distance
from .zeta import determinant_closed_form, determinant_numeric, vacuum_energy, zeta

logger = logging.getLogger(__name__)

console = Console()
err_console = Console(stderr=True)

VERIFY_RTOL = 1e-6


# Run configuration


class GraphSource(BaseModel):
    """Inline graph flags or a spec file, never both."""

    n: Optional[int] = None
    a: Optional[List[int]] = None
    symmetric_lengths: Optional[List[float]] = None
    generic_lengths: Optional[List[float]] = None
    random_lengths: Optional[Tuple[float, float]] = None
    seed: int = 0
    per_class: bool = False
    spec_file: Optional[str] = None

    @property
    def inline_flags(self) -> List[str]:
        names = {
            "n": "--n",
            "a": "--a",
            "symmetric_lengths": "--symmetric-lengths",
            "generic_lengths": "--generic-lengths",
            "random_lengths": "--random-lengths",
        }
        return [flag for field, flag in names.items() if getattr(self, field) is not None]

    @model_validator(mode="after")
    def exactly_one_source(self) -> "GraphSource":
        inline = self.inline_flags
        if self.spec_file is not None:
            if inline:
                raise ValueError(f"ambiguous graph source: --spec together with {', '.join(inline)}")
            return self
        if self.n is None:
            raise ValueError("missing --n (or give --spec FILE)")
        if self.a is None:
            raise ValueError("missing --a")
        metrics = [f for f in inline if f.endswith("-lengths")]
        if len(metrics) != 1:
            raise ValueError(
                "give exactly one of --symmetric-lengths, --generic-lengths, --random-lengths"
            )
        return self


class RunConfig(BaseModel):
    command: Literal["spectrum", "stats", "zeta", "det", "vacuum", "random-graph"]
    stats_command: Optional[Literal["nnsd", "r2", "fit-c"]] = None
    graph: Optional[GraphSource] = None
    kmax: Optional[float] = Field(None, gt=0)
    levels: Optional[int] = Field(None, gt=0)
    method: Literal["auto", "symmetric", "generic"] = "auto"
    rep: Optional[int] = None
    s: Optional[float] = None
    bins: Optional[int] = Field(None, gt=0)
    smax: Optional[float] = Field(None, gt=0)
    xmax: Optional[float] = Field(None, gt=0)
    window: Optional[Tuple[float, float]] = None
    output: Optional[str] = None
    cdf_output: Optional[str] = None
    checkpoint: Optional[str] = None
    from_csv: Optional[str] = None
    verify: bool = False
    n: Optional[int] = None
    p: Optional[float] = None
    seed: int = 0
    lengths: Optional[Tuple[float, float]] = None
    per_class: bool = False
    verbose: bool = False

    @model_validator(mode="after")
    def command_requirements(self) -> "RunConfig":
        needs_graph = self.command in ("spectrum", "zeta", "det", "vacuum") or self.stats_command in (
            "nnsd",
            "r2",
        )
        if needs_graph and self.graph is None:
            raise ValueError("missing --n (or give --spec FILE)")
        if self.command == "spectrum" and self.kmax is None:
            raise ValueError("spectrum needs --kmax")
        if self.command == "zeta" and self.s is None:
            raise ValueError("zeta needs --s")
        if self.stats_command == "nnsd" and (self.kmax is None) == (self.from_csv is None):
            raise ValueError("stats nnsd needs exactly one of --kmax and --from-csv")
        if self.stats_command == "r2":
            if self.rep is None:
                raise ValueError("stats r2 needs --rep")
            if (self.levels is None) == (self.kmax is None):
                raise ValueError("stats r2 needs exactly one of --levels and --kmax")
        if self.stats_command == "fit-c" and self.from_csv is None:
            raise ValueError("stats fit-c needs --from-csv")
        if self.command == "random-graph" and (self.n is None or self.p is None):
            raise ValueError("random-graph needs --n and --p")
        return self


# Argument parsing


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, {"usage": self.format_usage().strip()})


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _float_pair(text: str) -> Tuple[float, float]:
    values = _float_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return values[0], values[1]


def _graph_flags() -> argparse.ArgumentParser:
    parent = _ArgumentParser(add_help=False)
    group = parent.add_argument_group("graph")
    group.add_argument("--n", type=int, help="Number of vertices")
    group.add_argument("--a", type=_int_list, help="Jumps, e.g. 1,2")
    group.add_argument("--symmetric-lengths", type=_float_list, help="One length per jump class")
    group.add_argument("--generic-lengths", type=_float_list, help="One length per edge (class-major)")
    group.add_argument("--random-lengths", type=_float_pair, help="Uniform lengths from lo,hi")
    group.add_argument("--seed", type=int, default=0, help="Seed for --random-lengths (default: 0)")
    group.add_argument("--per-class", action="store_true", help="Draw random lengths per class")
    group.add_argument("--spec", dest="spec_file", help="Graph spec JSON file")
    return parent


def create_parser() -> argparse.ArgumentParser:
    """Create and configure the argument parser."""
    parser = _ArgumentParser(
        prog="circulant-spectra",
        description="Spectra, statistics and zeta functions of quantum circulant graphs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  circulant-spectra spectrum --n 5 --a 1,2 --symmetric-lengths 1,1.05 --kmax 200
  circulant-spectra stats r2 --n 101 --a 3,17 --random-lengths 1,1.5 --per-class --rep 20 --levels 5000
  circulant-spectra det --n 5 --a 1,2 --symmetric-lengths 1,1 --verify
  circulant-spectra random-graph --n 49 --p 0.3 --seed 7 --output spec.json
        """,
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Log progress at INFO level")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    graph = _graph_flags()

    spectrum_parser = subparsers.add_parser("spectrum", parents=[graph], help="Eigenvalues up to kmax")
    spectrum_parser.add_argument("--kmax", type=float, help="Upper wavenumber")
    spectrum_parser.add_argument("--method", choices=["auto", "symmetric", "generic"], default="auto")
    spectrum_parser.add_argument("--output", "-o", help="Spectrum CSV (default: spectrum.csv)")
    spectrum_parser.add_argument("--checkpoint", help="SQLite checkpoint file for resumable sweeps")

    stats_parser = subparsers.add_parser("stats", help="Spectral statistics")
    stats_sub = stats_parser.add_subparsers(dest="stats_command", help="Statistic")

    nnsd_parser = stats_sub.add_parser("nnsd", parents=[graph], help="Nearest-neighbour spacings")
    nnsd_parser.add_argument("--kmax", type=float, help="Solve the spectrum up to kmax")
    nnsd_parser.add_argument("--from-csv", help="Read the spectrum from a spectrum CSV")
    nnsd_parser.add_argument("--bins", type=int, help=f"Histogram bins (default: {defaults.nnsd_bins})")
    nnsd_parser.add_argument("--smax", type=float, help=f"Histogram range (default: {defaults.nnsd_smax})")
    nnsd_parser.add_argument("--output", "-o", help="NNSD CSV (default: nnsd.csv)")
    nnsd_parser.add_argument("--cdf-output", help="Also write the integrated NNSD CSV")

    r2_parser = stats_sub.add_parser("r2", parents=[graph], help="Two-point correlation of a subspectrum")
    r2_parser.add_argument("--rep", type=int, help="Representation j")
    r2_parser.add_argument("--levels", type=int, help="Number of subspectrum levels")
    r2_parser.add_argument("--kmax", type=float, help="Upper wavenumber instead of --levels")
    r2_parser.add_argument("--xmax", type=float, help=f"Largest separation (default: {defaults.r2_xmax})")
    r2_parser.add_argument("--bins", type=int, help=f"Bins (default: {defaults.r2_bins})")
    r2_parser.add_argument("--window", type=_float_pair, help="Fit window xlo,xhi for c")
    r2_parser.add_argument("--output", "-o", help="R2 CSV (default: r2.csv)")

    fit_parser = stats_sub.add_parser("fit-c", help="Fit the small-x constant to an R2 CSV")
    fit_parser.add_argument("--from-csv", help="R2 CSV")
    fit_parser.add_argument("--window", type=_float_pair, help="Fit window xlo,xhi")
    fit_parser.add_argument("--output", "-o", help="Also write the fit as JSON")

    zeta_parser = subparsers.add_parser("zeta", parents=[graph], help="Spectral zeta function")
    zeta_parser.add_argument("--s", type=float, help="Argument s < 1")
    zeta_parser.add_argument("--output", "-o", help="JSON report (default: zeta.json)")

    det_parser = subparsers.add_parser("det", parents=[graph], help="Spectral determinant")
    det_parser.add_argument("--verify", action="store_true", help="Cross-check with exp(-zeta'(0))")
    det_parser.add_argument("--output", "-o", help="JSON report (default: det.json)")

    vacuum_parser = subparsers.add_parser("vacuum", parents=[graph], help="Vacuum energy")
    vacuum_parser.add_argument("--output", "-o", help="JSON report (default: vacuum.json)")

    random_parser = subparsers.add_parser("random-graph", help="Draw a random circulant graph spec")
    random_parser.add_argument("--n", type=int, help="Number of vertices (prime recommended)")
    random_parser.add_argument("--p", type=float, help="Jump inclusion probability")
    random_parser.add_argument("--seed", type=int, default=0, help="Seed (default: 0)")
    random_parser.add_argument("--lengths", type=_float_pair, help="Length interval lo,hi")
    random_parser.add_argument("--per-class", action="store_true", help="One random length per class")
    random_parser.add_argument("--output", "-o", help="Spec JSON (default: spec.json)")

    return parser


COMMANDS = ("spectrum", "stats", "zeta", "det", "vacuum", "random-graph")

_GRAPH_FIELDS = (
    "n",
    "a",
    "symmetric_lengths",
    "generic_lengths",
    "random_lengths",
    "seed",
    "per_class",
    "spec_file",
)


def parse_config(argv: Optional[List[str]] = None, spec_file: Optional[str] = None) -> RunConfig:
    """
    Parse command-line arguments into a validated RunConfig.

    A spec file, passed here or as --spec, is loaded once so schema problems
    surface before any computation starts.

    Raises:
        UsageError: bad flags, a missing or ambiguous graph source
        SpecFileNotFound, SchemaError: the spec file is missing or invalid
    """
    args = create_parser().parse_args(argv)
    if args.command is None:
        raise UsageError("a command is required", {"commands": list(COMMANDS)})
    if args.command == "stats" and args.stats_command is None:
        raise UsageError("stats needs one of nnsd, r2, fit-c")

    values = vars(args)
    if spec_file is not None and "spec_file" in values and values["spec_file"] is None:
        values["spec_file"] = spec_file

    data = {k: v for k, v in values.items() if k not in _GRAPH_FIELDS and v is not None}
    try:
        if args.command == "random-graph":
            data.update({k: values[k] for k in ("n", "seed", "per_class") if values[k] is not None})
        elif "spec_file" in values:
            data["graph"] = GraphSource(**{k: values[k] for k in _GRAPH_FIELDS})
        config = RunConfig(**data)
    except ValidationError as e:
        message = e.errors()[0]["msg"]
        if message.startswith("Value error, "):
            message = message[len("Value error, ") :]
        raise UsageError(message, {"errors": json.loads(e.json())}) from e

    if config.graph is not None and config.graph.spec_file is not None:
        load_graph_spec(config.graph.spec_file)
    return config


# Command handlers


def build_graph(source: GraphSource) -> MetricGraph:
    if source.spec_file is not None:
        return load_graph_spec(source.spec_file)
    spec = validate_spec(source.n, source.a)
    if source.symmetric_lengths is not None:
        return MetricGraph.symmetric(spec, source.symmetric_lengths)
    if source.generic_lengths is not None:
        return MetricGraph.generic(spec, source.generic_lengths)
    lo, hi = source.random_lengths
    return MetricGraph.random_uniform(spec, lo, hi, seed=source.seed, symmetric=source.per_class)


def _progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        TimeRemainingColumn(),
        console=err_console,
        transient=True,
    )


def _solve(g: MetricGraph, config: RunConfig, perf: PerformanceLogger):
    store = CheckpointStore(config.checkpoint) if config.checkpoint else None
    with _progress() as progress:
        task = progress.add_task("🔎 Solving", total=None)

        def advance(done: int, total: int):
            progress.update(task, completed=done, total=total)

        with perf.timed("spectrum", kmax=config.kmax):
            return spectrum(g, config.kmax, method=config.method, checkpoint=store, progress=advance)


def cmd_spectrum(config: RunConfig, perf: PerformanceLogger):
    """Handle the 'spectrum' command."""
    g = build_graph(config.graph)
    result = _solve(g, config, perf)
    path = write_spectrum_csv(result, resolve_output(config.output or "spectrum.csv"))
    check = result.count_check
    console.print(
        f"[green]✅ {result.count} eigenvalues ({len(result)} distinct) up to k={config.kmax:g}; "
        f"Weyl residual {check.residual:+.2f} (bound {check.bound:g}); "
        f"{perf.total('spectrum'):.2f}s → {path}[/green]"
    )


def cmd_stats_nnsd(config: RunConfig, perf: PerformanceLogger):
    g = build_graph(config.graph)
    if config.from_csv:
        entries = read_spectrum_csv(config.from_csv)
    else:
        entries = _solve(g, config, perf).entries
    u = unfold(entries, FULL, graph=g)
    histogram = nnsd(u, config.bins, config.smax)
    path = write_nnsd_csv(histogram, resolve_output(config.output or "nnsd.csv"))

    grid = histogram.bin_edges[1:]
    if config.cdf_output:
        write_integrated_nnsd_csv(grid, integrated_nnsd(u, grid), resolve_output(config.cdf_output))
    console.print(
        f"[green]✅ {len(u)} unfolded levels; sup|F - F_GOE| = {sup_distance(u, grid):.4f} → {path}[/green]"
    )


def _kmax_for_levels(g: MetricGraph, levels: int) -> float:
    """Wavenumber below which a representation holds roughly `levels` roots."""
    per_unit_k = g.total_length / (math.pi * g.n)
    return 1.05 * (levels + 2 * g.d + 10) / per_unit_k


def _report_fit(r2, window) -> Optional[float]:
    try:
        fit = fit_small_c(r2, window)
    except (NoBracket, DomainViolation) as e:
        logger.warning(f"fit of c unavailable: {e.message}")
        return None
    return fit.c


def cmd_stats_r2(config: RunConfig, perf: PerformanceLogger):
    g = build_graph(config.graph)
    if not g.is_symmetric:
        raise UsageError("stats r2 needs a symmetric metric (--symmetric-lengths or --per-class)")
    rep = RepIndex.of(g.n, config.rep)
    if not is_prime(g.n):
        logger.warning(f"n={g.n} is not prime; the subspectrum of j={rep.j} may contain Dirichlet levels")

    with perf.timed("roots", j=rep.j):
        if config.levels is not None:
            kmax = _kmax_for_levels(g, config.levels)
            entries = roots_p(g, rep, kmax)
            while len(entries) < config.levels:
                kmax *= 1.1
                entries = roots_p(g, rep, kmax)
            entries = entries[: config.levels]
        else:
            entries = roots_p(g, rep, config.kmax)

    u = unfold(entries, subspectrum_mode(g, rep), graph=g)
    r2 = r2_estimate(u, config.xmax, config.bins)
    path = write_r2_csv(r2, resolve_output(config.output or "r2.csv"))
    c = _report_fit(r2, config.window)
    c_text = f"c = {c:.4f}" if c is not None else "c unavailable"
    console.print(
        f"[green]✅ j={rep.j}: {len(u)} levels, {r2.pair_count} pairs; {c_text}; "
        f"{perf.total('roots'):.2f}s → {path}[/green]"
    )


def cmd_stats_fit_c(config: RunConfig, perf: PerformanceLogger):
    r2 = read_r2_csv(config.from_csv)
    fit = fit_small_c(r2, config.window)
    if config.output:
        write_json(fit.to_dict(), resolve_output(config.output))
    console.print(f"[green]✅ c = {fit.c:.6g} on window {fit.window}, residual {fit.residual:.3g}[/green]")


def cmd_stats(config: RunConfig, perf: PerformanceLogger):
    """Handle the 'stats' command."""
    handlers = {"nnsd": cmd_stats_nnsd, "r2": cmd_stats_r2, "fit-c": cmd_stats_fit_c}
    handlers[config.stats_command](config, perf)


def cmd_zeta(config: RunConfig, perf: PerformanceLogger):
    """Handle the 'zeta' command."""
    g = build_graph(config.graph)
    with perf.timed("zeta", s=config.s):
        value = zeta(g, config.s)
    report = zeta_report(s=value.s, zeta=value.value, quadrature_error=value.quadrature_error)
    path = write_json(report, resolve_output(config.output or "zeta.json"))
    console.print(
        f"[green]✅ zeta({config.s:g}) = {value.value:.12g} ± {value.quadrature_error:.1e}; "
        f"{perf.total('zeta'):.2f}s → {path}[/green]"
    )


def cmd_det(config: RunConfig, perf: PerformanceLogger):
    """Handle the 'det' command."""
    g = build_graph(config.graph)
    with perf.timed("det"):
        closed = determinant_closed_form(g)
        numeric = determinant_numeric(g) if config.verify else None
    if numeric is not None:
        rel = abs(numeric.value - closed.value) / abs(closed.value)
        if not rel <= VERIFY_RTOL:
            raise VerificationFailed(
                f"closed form {closed.value:.12g} and exp(-zeta'(0)) {numeric.value:.12g} differ by {rel:.2e}",
                {"det_closed": closed.value, "det_numeric": numeric.value, "relative": rel},
            )
    report = zeta_report(
        det_closed=closed.value,
        det_numeric=numeric.value if numeric else None,
        c_coefficient=closed.c_coefficient,
    )
    path = write_json(report, resolve_output(config.output or "det.json"))
    verified = f"; exp(-zeta'(0)) = {numeric.value:.12g}" if numeric else ""
    console.print(f"[green]✅ det = {closed.value:.12g}{verified}; {perf.total('det'):.2f}s → {path}[/green]")


def cmd_vacuum(config: RunConfig, perf: PerformanceLogger):
    """Handle the 'vacuum' command."""
    g = build_graph(config.graph)
    with perf.timed("vacuum"):
        energy = vacuum_energy(g)
    path = write_json(zeta_report(vacuum_energy=energy), resolve_output(config.output or "vacuum.json"))
    console.print(f"[green]✅ vacuum energy = {energy:.12g}; {perf.total('vacuum'):.2f}s → {path}[/green]")


def cmd_random_graph(config: RunConfig, perf: PerformanceLogger):
    """Handle the 'random-graph' command."""
    spec = random_spec(config.n, config.p, config.seed)
    lo, hi = config.lengths or tuple(defaults.default_length_interval)
    metric = {"random_uniform": {"lo": lo, "hi": hi, "seed": config.seed, "symmetric": config.per_class}}
    path = write_json(spec_document(spec, metric), resolve_output(config.output or "spec.json"))
    console.print(f"[green]✅ C_{spec.n}{list(spec.a)} (d={spec.d}) → {path}[/green]")


COMMAND_HANDLERS: Dict[str, Callable[[RunConfig, PerformanceLogger], None]] = {
    "spectrum": cmd_spectrum,
    "stats": cmd_stats,
    "zeta": cmd_zeta,
    "det": cmd_det,
    "vacuum": cmd_vacuum,
    "random-graph": cmd_random_graph,
}


def _emit_error(error: CirculantError):
    print(json.dumps(error.to_dict(), default=str), file=sys.stderr)


def run(config: RunConfig) -> int:
    """
    Execute a parsed configuration.

    Returns:
        0 on success, otherwise the exit code of the error that stopped the run
    """
    perf = PerformanceLogger()
    try:
        COMMAND_HANDLERS[config.command](config, perf)
    except CirculantError as e:
        _emit_error(e)
        return e.exit_code
    except ValueError as e:
        error = UsageError(str(e))
        _emit_error(error)
        return error.exit_code
    return 0


def setup_logging(verbose: bool = False):
    level = logging.INFO if verbose else getattr(logging, settings.CIRC_LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, rich_tracebacks=True)],
    )


def main(argv: Optional[List[str]] = None):
    """Main CLI entry point."""
    try:
        config = parse_config(argv)
    except CirculantError as e:
        _emit_error(e)
        sys.exit(e.exit_code)

    setup_logging(config.verbose)
    try:
        code = run(config)
    except KeyboardInterrupt:
        err_console.print("\n[yellow]Interrupted; committed checkpoints are kept.[/yellow]")
        code = 130
    sys.exit(code)


if __name__ == "__main__":
    main()
