from __future__ import annotations

import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path

import aiosqlite
import pandas as pd

from src.config import Config
from src.models import ExperimentRun
from src.repository.base import Repository

logger = logging.getLogger(__name__)

SAMPLE_FIELDS = (
    "sample",
    "rule",
    "n_agents",
    "n_resources",
    "w_ne",
    "rounds",
    "switches",
    "converged",
    "w_opt",
    "w_tot",
    "ratio",
    "worst_nash",
    "worst_ratio",
    "oracle_error",
)

_CREATE_RUNS = """
CREATE TABLE IF NOT EXISTS runs (
    run_id    TEXT PRIMARY KEY,
    scenario  TEXT NOT NULL,
    config    TEXT NOT NULL,
    seed      INTEGER NOT NULL,
    samples   INTEGER NOT NULL,
    summary   TEXT NOT NULL,
    started   TEXT NOT NULL
)
"""

_CREATE_SAMPLES = """
CREATE TABLE IF NOT EXISTS samples (
    run_id       TEXT NOT NULL,
    sample       INTEGER NOT NULL,
    rule         TEXT NOT NULL,
    n_agents     INTEGER NOT NULL,
    n_resources  INTEGER NOT NULL,
    w_ne         REAL NOT NULL,
    rounds       INTEGER NOT NULL,
    switches     INTEGER NOT NULL,
    converged    INTEGER NOT NULL,
    w_opt        REAL,
    w_tot        REAL,
    ratio        REAL,
    worst_nash   REAL,
    worst_ratio  REAL,
    oracle_error TEXT,
    PRIMARY KEY (run_id, sample, rule)
)
"""


def _parse_dt(value: str) -> datetime:
    """Parse an ISO-format datetime string into a timezone-aware datetime."""
    dt = datetime.fromisoformat(value)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def _row_to_run(row: aiosqlite.Row) -> ExperimentRun:
    return ExperimentRun(
        run_id=row["run_id"],
        scenario=row["scenario"],
        config=json.loads(row["config"]),
        seed=row["seed"],
        samples=row["samples"],
        summary=json.loads(row["summary"]),
        started=_parse_dt(row["started"]),
    )


def _sql_value(value: object) -> object:
    # sqlite has no NaN; missing oracle values become NULL
    if isinstance(value, float) and math.isnan(value):
        return None
    if hasattr(value, "item"):
        return _sql_value(value.item())
    return value


def _json_safe(value: object) -> object:
    value = _sql_value(value)
    return value if isinstance(value, (int, float, str, bool, type(None))) else str(value)


class SQLiteRepository(Repository):
    """Async SQLite implementation of the Repository interface."""

    def __init__(self, config: Config) -> None:
        self._db_path: Path = config.sqlite_path
        self._db: aiosqlite.Connection | None = None

    async def initialize(self) -> None:
        self._db_path.parent.mkdir(parents=True, exist_ok=True)
        self._db = await aiosqlite.connect(str(self._db_path))
        self._db.row_factory = aiosqlite.Row
        await self._db.execute(_CREATE_RUNS)
        await self._db.execute(_CREATE_SAMPLES)
        await self._db.commit()
        logger.info("SQLite database initialized at %s", self._db_path)

    @property
    def db(self) -> aiosqlite.Connection:
        if self._db is None:
            raise RuntimeError("Repository not initialized; call initialize() first")
        return self._db

    # ── Runs ────────────────────────────────────────────────────────

    async def save_run(self, run: ExperimentRun) -> None:
        summary = [{k: _json_safe(v) for k, v in row.items()} for row in run.summary]
        await self.db.execute(
            """
            INSERT OR REPLACE INTO runs
                (run_id, scenario, config, seed, samples, summary, started)
            VALUES (?, ?, ?, ?, ?, ?, ?)
            """,
            (
                run.run_id,
                run.scenario,
                json.dumps(run.config, sort_keys=True, default=str),
                run.seed,
                run.samples,
                json.dumps(summary),
                run.started.isoformat(),
            ),
        )
        await self.db.commit()
        logger.debug("Saved run %s", run.run_id)

    async def get_run(self, run_id: str) -> ExperimentRun | None:
        cursor = await self.db.execute("SELECT * FROM runs WHERE run_id = ?", (run_id,))
        row = await cursor.fetchone()
        return _row_to_run(row) if row else None

    async def get_runs(self, limit: int = 20) -> list[ExperimentRun]:
        cursor = await self.db.execute(
            "SELECT * FROM runs ORDER BY started DESC LIMIT ?", (limit,)
        )
        rows = await cursor.fetchall()
        return [_row_to_run(r) for r in rows]

    # ── Samples ─────────────────────────────────────────────────────

    async def save_samples(self, run_id: str, rows: pd.DataFrame) -> None:
        records = [
            (run_id, *(_sql_value(record[name]) for name in SAMPLE_FIELDS))
            for record in rows.to_dict("records")
        ]
        placeholders = ", ".join("?" * (len(SAMPLE_FIELDS) + 1))
        await self.db.executemany(
            f"INSERT OR REPLACE INTO samples (run_id, {', '.join(SAMPLE_FIELDS)}) "
            f"VALUES ({placeholders})",
            records,
        )
        await self.db.commit()
        logger.debug("Saved %d sample rows for run %s", len(records), run_id)

    async def get_samples(self, run_id: str) -> pd.DataFrame:
        cursor = await self.db.execute(
            f"SELECT {', '.join(SAMPLE_FIELDS)} FROM samples WHERE run_id = ? "
            "ORDER BY sample, rowid",
            (run_id,),
        )
        rows = await cursor.fetchall()
        frame = pd.DataFrame([tuple(r) for r in rows], columns=list(SAMPLE_FIELDS))
        frame["converged"] = frame["converged"].astype(bool)
        return frame

    # ── Lifecycle ───────────────────────────────────────────────────

    async def close(self) -> None:
        if self._db:
            await self._db.close()
            self._db = None
            logger.info("SQLite connection closed")
