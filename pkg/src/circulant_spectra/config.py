"""
Circulant Spectra - Configuration

Environment settings and packaged numerical defaults.
"""

import json
import logging
import os
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

# Environment
CIRC_THREADS = int(os.getenv("CIRC_THREADS", str(min(os.cpu_count() or 1, 8))))
CIRC_OUTPUT_DIR = os.getenv("CIRC_OUTPUT_DIR", "outputs")
CIRC_LOG_LEVEL = os.getenv("CIRC_LOG_LEVEL", "WARNING")
CIRC_CHECKPOINT_EVERY = int(os.getenv("CIRC_CHECKPOINT_EVERY", "100000"))

_FALLBACK_DEFAULTS: Dict[str, Any] = {
    "pole_guard": 1e-12,
    "bisection_rel_tol": 1e-12,
    "random_spec_retries": 16,
    "default_length_interval": [1.0, 1.5],
    "nnsd_bins": 100,
    "nnsd_smax": 4.0,
    "r2_bins": 200,
    "r2_xmax": 10.0,
    "fit_window": [0.02, 0.5],
    "fit_c_range": [0.1, 100.0],
    "quad_epsabs": 1e-12,
    "quad_limit": 200,
    "truncation_factor": 30.0,
    "max_refinements": 8,
    "richardson_t0": 0.01,
    "richardson_levels": 6,
    "zeta_prime_step": 1e-4,
    "small_t_floor": 1e-8,
    "batch_entries": 4_000_000,
}


class NumericalDefaults:
    """
    Tolerances, bin counts and search ranges used across the package.

    Values come from numerics_config.json next to this module; any key the file
    lacks falls back to the built-in table.
    """

    def __init__(self, config_path: Optional[str] = None):
        if config_path is None:
            config_path = os.path.join(os.path.dirname(__file__), "numerics_config.json")
        self.config_path = config_path
        self.values = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        values = dict(_FALLBACK_DEFAULTS)
        if os.path.exists(self.config_path):
            try:
                with open(self.config_path, "r") as f:
                    values.update(json.load(f))
            except (OSError, ValueError) as e:
                logger.warning(f"Ignoring unreadable numerics config {self.config_path}: {e}")
        return values

    def __getattr__(self, name: str) -> Any:
        try:
            return self.__dict__["values"][name]
        except KeyError:
            raise AttributeError(name) from None


defaults = NumericalDefaults()
