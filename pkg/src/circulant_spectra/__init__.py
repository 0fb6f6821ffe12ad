"""
Circulant Spectra - Spectral theory of quantum circulant graphs.

Eigenvalues of circulant graphs with standard vertex conditions from their
secular equations, spectral statistics of the full spectrum and of symmetry
subspectra, and spectral zeta functions, determinants and vacuum energies.
"""

__version__ = "0.1.0"
__project__ = "Circulant Spectra"

# Convenient imports
from .graph import CirculantSpec, MetricGraph, load_graph_spec, random_spec, validate_spec
from .secular import GENERIC, RepIndex, det_M, eval_fhat, eval_p, poles_p
from .solver import roots_p, spectrum, spectrum_generic, spectrum_symmetric, unfold
from .stats import fit_small_c, nnsd, r2_estimate, wigner_goe
from .zeta import (
    determinant_closed_form,
    vacuum_energy,
    zeta_generic,
    zeta_prime_at_zero,
    zeta_symmetric,
)

__all__ = [
    "__version__",
    "CirculantSpec",
    "MetricGraph",
    "load_graph_spec",
    "random_spec",
    "validate_spec",
    "GENERIC",
    "RepIndex",
    "det_M",
    "eval_fhat",
    "eval_p",
    "poles_p",
    "roots_p",
    "spectrum",
    "spectrum_generic",
    "spectrum_symmetric",
    "unfold",
    "fit_small_c",
    "nnsd",
    "r2_estimate",
    "wigner_goe",
    "determinant_closed_form",
    "vacuum_energy",
    "zeta_generic",
    "zeta_prime_at_zero",
    "zeta_symmetric",
]
