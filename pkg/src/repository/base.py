from __future__ import annotations

from abc import ABC, abstractmethod

import pandas as pd

from src.models import ExperimentRun


class Repository(ABC):
    """Abstract experiment archive."""

    @abstractmethod
    async def initialize(self) -> None:
        """Create tables / run migrations."""

    @abstractmethod
    async def save_run(self, run: ExperimentRun) -> None:
        """Persist (or replace) an experiment run record."""

    @abstractmethod
    async def get_run(self, run_id: str) -> ExperimentRun | None:
        """Retrieve a run by ID."""

    @abstractmethod
    async def get_runs(self, limit: int = 20) -> list[ExperimentRun]:
        """Most recent runs, newest first."""

    @abstractmethod
    async def save_samples(self, run_id: str, rows: pd.DataFrame) -> None:
        """Persist the per-sample result table of a run."""

    @abstractmethod
    async def get_samples(self, run_id: str) -> pd.DataFrame:
        """Per-sample rows of a run ordered by (sample, rule); empty frame if unknown."""

    @abstractmethod
    async def close(self) -> None:
        """Clean up connections."""
