"""
Circulant Spectra - Artifact Files

CSV and JSON outputs: spectra, NNSD histograms, integrated NNSD, R2 estimates,
zeta reports and graph spec documents.

Every file has a header row and a fixed column order. Floats are written with
17 significant digits so they read back exactly. Files are written to a
temporary sibling and renamed into place, so a failed run leaves no partial
output.
"""

import csv
import json
import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from . import config
from .models import Histogram, R2Estimate, Spectrum, SpectrumEntry
from .stats import wigner_goe_cdf

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SPECTRUM_COLUMNS = ["k", "multiplicity", "provenance", "rep_index", "edge_class", "harmonic_m"]
NNSD_COLUMNS = ["bin_center", "density"]
INTEGRATED_NNSD_COLUMNS = ["s", "empirical_cdf", "wigner_cdf"]
R2_COLUMNS = ["x", "R2"]
REPORT_KEYS = ["s", "zeta", "det_closed", "det_numeric", "vacuum_energy", "c_coefficient", "quadrature_error"]


def get_output_path() -> Path:
    """Get the base output directory, creating it if needed."""
    path = Path(config.CIRC_OUTPUT_DIR)
    path.mkdir(parents=True, exist_ok=True)
    return path


def resolve_output(path: PathLike) -> Path:
    """Relative paths land in the output directory; absolute paths are kept."""
    path = Path(path)
    if path.is_absolute():
        return path
    return get_output_path() / path


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


@contextmanager
def atomic_write(path: PathLike):
    """Yield a text handle on a temporary sibling; rename over path on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            yield handle
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.info(f"Wrote {path}")


def _write_rows(path: PathLike, columns: List[str], rows) -> Path:
    path = Path(path)
    with atomic_write(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def _read_rows(path: PathLike, columns: List[str]) -> List[Dict[str, str]]:
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != columns:
            raise ValueError(f"{path}: expected columns {columns}, got {reader.fieldnames}")
        return list(reader)


# Spectra


def write_spectrum_csv(spectrum: Union[Spectrum, Sequence[SpectrumEntry]], path: PathLike) -> Path:
    entries = spectrum.entries if isinstance(spectrum, Spectrum) else spectrum
    rows = ([e.to_dict()[c] for c in SPECTRUM_COLUMNS] for e in entries)
    return _write_rows(path, SPECTRUM_COLUMNS, rows)


def read_spectrum_csv(path: PathLike) -> List[SpectrumEntry]:
    return [SpectrumEntry.from_dict(row) for row in _read_rows(path, SPECTRUM_COLUMNS)]


# Statistics


def write_nnsd_csv(histogram: Histogram, path: PathLike) -> Path:
    return _write_rows(path, NNSD_COLUMNS, zip(histogram.bin_centers, histogram.density))


def write_integrated_nnsd_csv(grid: Sequence[float], empirical: Sequence[float], path: PathLike) -> Path:
    grid = np.asarray(grid, dtype=float)
    return _write_rows(path, INTEGRATED_NNSD_COLUMNS, zip(grid, empirical, wigner_goe_cdf(grid)))


def write_r2_csv(r2: R2Estimate, path: PathLike) -> Path:
    return _write_rows(path, R2_COLUMNS, zip(r2.bin_centers, r2.values))


def read_r2_csv(path: PathLike) -> R2Estimate:
    """
    Read an R2 CSV back into an estimate.

    The file holds bin centres and values only; xmax is rebuilt from the bin
    layout and the pair and level counts come back as 0.
    """
    rows = _read_rows(path, R2_COLUMNS)
    if len(rows) < 2:
        raise ValueError(f"{path}: an R2 file needs at least two bins")
    centers = np.array([float(r["x"]) for r in rows])
    values = np.array([float(r["R2"]) for r in rows])
    width = centers[1] - centers[0]
    return R2Estimate(
        bin_centers=centers,
        values=values,
        pair_count=0,
        xmax=float(centers[-1] + 0.5 * width),
        sequence_length=0,
    )


# JSON documents


def write_json(data: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    with atomic_write(path) as handle:
        json.dump(data, handle, indent=2, allow_nan=False)
        handle.write("\n")
    return path


def zeta_report(**values: Optional[float]) -> Dict[str, Optional[float]]:
    """The zeta/determinant JSON report; keys not computed are null."""
    unknown = set(values) - set(REPORT_KEYS)
    if unknown:
        raise KeyError(f"unknown report keys: {sorted(unknown)}")
    return {key: values.get(key) for key in REPORT_KEYS}


def read_json(path: PathLike) -> Dict[str, Any]:
    with open(path) as handle:
        return json.load(handle)
