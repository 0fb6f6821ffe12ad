"""
Circulant Spectra - Checkpoint Store

SQLite persistence for long spectrum sweeps. A sweep is split into units
(one representation, or one block of wavenumbers); each finished unit is
committed with its roots so an interrupted run resumes where it stopped.
"""

import hashlib
import json
import logging
import sqlite3
from typing import Dict, List, Optional

from .graph import MetricGraph
from .models import Provenance, SpectrumEntry

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 1
DEFAULT_DB_NAME = "circulant_checkpoints.db"


def run_key(graph: MetricGraph, kmax: float, method: str, **extra) -> str:
    """Stable identifier of a sweep: graph, kmax, method and solver settings."""
    payload = json.dumps(
        {"graph": graph.to_dict(), "kmax": repr(float(kmax)), "method": method, **extra},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


class CheckpointStore:
    """
    Committed sweep units and their roots.
    """

    def __init__(self, db_path: Optional[str] = None):
        self.db_path = db_path or DEFAULT_DB_NAME
        self._init_db()

    def _get_connection(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        return conn

    def _init_db(self):
        conn = self._get_connection()
        cursor = conn.cursor()

        cursor.execute("CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL)")
        cursor.execute("SELECT value FROM meta WHERE key = 'format_version'")
        row = cursor.fetchone()
        if row is not None and int(row["value"]) != CHECKPOINT_FORMAT_VERSION:
            logger.warning(
                f"Checkpoint store {self.db_path} has format {row['value']}, "
                f"expected {CHECKPOINT_FORMAT_VERSION}; discarding it"
            )
            cursor.execute("DROP TABLE IF EXISTS units")
            cursor.execute("DROP TABLE IF EXISTS roots")
        cursor.execute(
            "INSERT OR REPLACE INTO meta (key, value) VALUES ('format_version', ?)",
            (str(CHECKPOINT_FORMAT_VERSION),),
        )
        cursor.execute("""
            CREATE TABLE IF NOT EXISTS units (
                run_key TEXT NOT NULL,
                unit TEXT NOT NULL,
                root_count INTEGER NOT NULL,
                PRIMARY KEY (run_key, unit)
            )
        """)
        cursor.execute("""
            CREATE TABLE IF NOT EXISTS roots (
                run_key TEXT NOT NULL,
                unit TEXT NOT NULL,
                k REAL NOT NULL,
                multiplicity INTEGER NOT NULL,
                provenance TEXT NOT NULL,
                rep_index INTEGER,
                edge_class INTEGER,
                harmonic_m INTEGER,
                j_size INTEGER
            )
        """)
        cursor.execute("CREATE INDEX IF NOT EXISTS roots_by_unit ON roots (run_key, unit)")

        conn.commit()
        conn.close()

    def commit(self, key: str, unit: str, entries: List[SpectrumEntry]) -> None:
        """Store a finished unit atomically."""
        conn = self._get_connection()
        with conn:
            conn.execute("DELETE FROM roots WHERE run_key = ? AND unit = ?", (key, unit))
            conn.executemany(
                """INSERT INTO roots (run_key, unit, k, multiplicity, provenance, rep_index,
                   edge_class, harmonic_m, j_size) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)""",
                [
                    (
                        key,
                        unit,
                        e.k,
                        e.multiplicity,
                        e.provenance.kind,
                        e.provenance.rep_index,
                        e.provenance.edge_class,
                        e.provenance.harmonic_m,
                        e.provenance.j_size,
                    )
                    for e in entries
                ],
            )
            conn.execute(
                "INSERT OR REPLACE INTO units (run_key, unit, root_count) VALUES (?, ?, ?)",
                (key, unit, len(entries)),
            )
        conn.close()
        logger.info(f"Checkpoint: committed unit {unit} ({len(entries)} entries)")

    def completed_units(self, key: str) -> Dict[str, List[SpectrumEntry]]:
        """Committed units of a sweep with their entries."""
        conn = self._get_connection()
        cursor = conn.cursor()
        cursor.execute("SELECT unit FROM units WHERE run_key = ?", (key,))
        result: Dict[str, List[SpectrumEntry]] = {row["unit"]: [] for row in cursor.fetchall()}
        cursor.execute(
            """SELECT unit, k, multiplicity, provenance, rep_index, edge_class, harmonic_m, j_size
               FROM roots WHERE run_key = ? ORDER BY unit, k""",
            (key,),
        )
        for row in cursor.fetchall():
            if row["unit"] not in result:
                continue
            provenance = Provenance(
                kind=row["provenance"],
                rep_index=row["rep_index"],
                edge_class=row["edge_class"],
                harmonic_m=row["harmonic_m"],
                j_size=row["j_size"],
            )
            result[row["unit"]].append(
                SpectrumEntry(k=row["k"], multiplicity=row["multiplicity"], provenance=provenance)
            )
        conn.close()
        return result

    def clear(self, key: str) -> None:
        conn = self._get_connection()
        with conn:
            conn.execute("DELETE FROM roots WHERE run_key = ?", (key,))
            conn.execute("DELETE FROM units WHERE run_key = ?", (key,))
        conn.close()
