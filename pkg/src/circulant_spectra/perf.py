"""
Circulant Spectra - Performance Log

Timing of the expensive stages (root searches, scans, quadratures).
"""

import logging
import time
from collections import defaultdict
from contextlib import contextmanager
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class PerformanceLogger:
    """
    Tracks and logs run times per component.
    """

    def __init__(self):
        self.logs = []

    def log_event(self, component: str, duration: float, metadata: Optional[Dict] = None):
        entry = {
            "timestamp": time.time(),
            "component": component,
            "duration": duration,
            "metadata": metadata or {},
        }
        self.logs.append(entry)
        logger.info(f"Performance: {component} took {duration:.3f}s")

    @contextmanager
    def timed(self, component: str, **metadata):
        """Time the enclosed block and log it under component."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.log_event(component, time.perf_counter() - start, metadata)

    def total(self, component: str) -> float:
        return sum(log["duration"] for log in self.logs if log["component"] == component)

    def get_stats(self) -> Dict[str, Any]:
        """avg/max/min/count of the durations per component."""
        grouped: Dict[str, list] = defaultdict(list)
        for log in self.logs:
            grouped[log["component"]].append(log["duration"])
        return {
            comp: {
                "avg": sum(durations) / len(durations),
                "max": max(durations),
                "min": min(durations),
                "count": len(durations),
            }
            for comp, durations in grouped.items()
        }


perf_logger = PerformanceLogger()
