"""Seeded experiment sweeps: sample instances, run best response, compare to ground truth."""

from __future__ import annotations

import asyncio
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import pandas as pd

from src.closed_forms import covering_w_star
from src.config import get_config
from src.dynamics.best_response import run_best_response
from src.dynamics.scheduler import RandomOrderScheduler, RoundRobinScheduler, Scheduler
from src.errors import CapacityError, StructuralError
from src.game import welfare
from src.harness.scenarios import (
    INIT_STREAM,
    Scenario,
    random_choices,
    resolve_rule,
    sample_rng,
)
from src.models import Allocation, DistributionRule, ExperimentRun, GameInstance, WelfareBasis
from src.oracle import exact_optimum, worst_nash
from src.poa.certificate import compute_poa
from src.repository.base import Repository
from src.repository.sqlite import SAMPLE_FIELDS

logger = logging.getLogger(__name__)

ROW_COLUMNS = ["seed", "scenario", *SAMPLE_FIELDS]
SUMMARY_COLUMNS = [
    "rule",
    "samples",
    "converged",
    "worst_ratio",
    "mean_ratio",
    "p05",
    "p25",
    "median",
    "p75",
    "worst_nash_ratio",
    "mean_rounds",
    "max_rounds",
    "poa",
]
FLOAT_FORMAT = "%.12g"


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    rules: tuple[str, ...] = ("sv",)
    seed: int = 0
    samples: int = 100
    oracle: bool = True
    max_rounds: int | None = None
    random_order: bool = False
    out: Path | None = None

    def __post_init__(self) -> None:
        if self.seed < 0 or self.seed >= 2**64:
            raise StructuralError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.samples < 0:
            raise StructuralError(f"sample count must be >= 0, got {self.samples}")
        if not self.rules:
            raise StructuralError("at least one rule is required")

    def describe(self) -> dict[str, Any]:
        return {
            **self.scenario.describe(),
            "rules": list(self.rules),
            "seed": self.seed,
            "samples": self.samples,
            "oracle": self.oracle,
            "max_rounds": self.max_rounds,
            "random_order": self.random_order,
        }


@dataclass
class ExperimentResult:
    rows: pd.DataFrame
    summary: pd.DataFrame
    run: ExperimentRun


# ── One sample ─────────────────────────────────────────────────────


def _scheduler(config: ExperimentConfig, sample: int) -> Scheduler:
    if config.random_order:
        return RandomOrderScheduler(config.seed, stream=sample)
    return RoundRobinScheduler()


def _oracle_optimum(instance: GameInstance) -> tuple[float, str]:
    try:
        return exact_optimum(instance)[1], ""
    except CapacityError as exc:
        logger.warning("Sample oracle skipped: %s", exc)
        return math.nan, str(exc)


def _ratio(numerator: float, denominator: float) -> float:
    if math.isnan(denominator) or denominator <= 0.0:
        return math.nan
    return numerator / denominator


def evaluate_sample(config: ExperimentConfig, sample: int) -> list[dict[str, Any]]:
    """Rows (one per rule) for sample number ``sample``; pure function of (config, sample)."""
    instance = config.scenario.generate(config.seed, sample)
    choices = random_choices(instance, sample_rng(config.seed, sample, INIT_STREAM))
    w_opt, oracle_error = _oracle_optimum(instance) if config.oracle else (math.nan, "")
    surrogate = config.scenario.surrogate()
    w_tot = math.nan if surrogate is None else surrogate
    rows = []
    for spec in config.rules:
        game = instance.with_rule(resolve_rule(spec, instance.basis))
        final, trace = run_best_response(
            game,
            Allocation.of(game, choices),
            config.max_rounds,
            scheduler=_scheduler(config, sample),
        )
        w_ne = welfare(game, final)
        worst = math.nan
        if config.oracle and not oracle_error:
            worst = worst_nash(game)[1]
        rows.append(
            {
                "seed": config.seed,
                "scenario": config.scenario.name,
                "sample": sample,
                "rule": spec,
                "n_agents": game.n_agents,
                "n_resources": game.n_resources,
                "w_ne": w_ne,
                "rounds": trace.rounds,
                "switches": trace.switches,
                "converged": trace.converged,
                "w_opt": w_opt,
                "w_tot": w_tot,
                "ratio": _ratio(w_ne, w_tot if math.isnan(w_opt) else w_opt),
                "worst_nash": worst,
                "worst_ratio": _ratio(worst, w_opt),
                "oracle_error": oracle_error,
            }
        )
    return rows


# ── Summary ────────────────────────────────────────────────────────


def theoretical_poa(rule: DistributionRule, w: WelfareBasis) -> float:
    """PoA of ``rule`` for ``w``; the covering formula replaces the LP when w ≡ 1."""
    if all(v == 1.0 for v in w.inner):
        return covering_w_star(rule, w.n).poa
    return compute_poa(rule, w, w.n).poa


def summarize(rows: pd.DataFrame, config: ExperimentConfig) -> pd.DataFrame:
    records = []
    basis = config.scenario.basis if len(rows) else None
    for spec in config.rules:
        group = rows[rows["rule"] == spec]
        if group.empty or basis is None:
            continue
        ratio = group["ratio"].astype(float)
        records.append(
            {
                "rule": spec,
                "samples": len(group),
                "converged": int(group["converged"].sum()),
                "worst_ratio": ratio.min(),
                "mean_ratio": ratio.mean(),
                "p05": ratio.quantile(0.05),
                "p25": ratio.quantile(0.25),
                "median": ratio.quantile(0.5),
                "p75": ratio.quantile(0.75),
                "worst_nash_ratio": group["worst_ratio"].astype(float).min(),
                "mean_rounds": group["rounds"].mean(),
                "max_rounds": int(group["rounds"].max()),
                "poa": theoretical_poa(resolve_rule(spec, basis), basis),
            }
        )
    return pd.DataFrame(records, columns=SUMMARY_COLUMNS)


def summary_path(out: Path) -> Path:
    return out.with_suffix(".summary.csv")


def write_results(rows: pd.DataFrame, summary: pd.DataFrame, out: Path) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    rows.to_csv(out, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    summary.to_csv(summary_path(out), index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("Wrote %d rows to %s", len(rows), out)


# ── Runner ─────────────────────────────────────────────────────────


class ExperimentRunner:
    """Evaluates samples, in a process pool when ``workers`` > 1, then archives the run."""

    def __init__(
        self,
        config: ExperimentConfig,
        workers: int | None = None,
        repository: Repository | None = None,
    ) -> None:
        self._config = config
        self._workers = get_config().workers if workers is None else max(1, workers)
        self._repository = repository

    async def _collect(self) -> list[dict[str, Any]]:
        config = self._config
        if self._workers == 1:
            rows: list[dict[str, Any]] = []
            for sample in range(config.samples):
                rows.extend(evaluate_sample(config, sample))
                if (sample + 1) % max(1, config.samples // 10) == 0:
                    logger.info("Evaluated %d/%d samples", sample + 1, config.samples)
            return rows
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=self._workers) as pool:
            batches = await asyncio.gather(
                *(
                    loop.run_in_executor(pool, evaluate_sample, config, sample)
                    for sample in range(config.samples)
                )
            )
        return [row for batch in batches for row in batch]

    async def run(self) -> ExperimentResult:
        config = self._config
        logger.info(
            "Experiment %s: %d samples, rules=%s, seed=%d, workers=%d",
            config.scenario.name,
            config.samples,
            ",".join(config.rules),
            config.seed,
            self._workers,
        )
        rows = pd.DataFrame(await self._collect(), columns=ROW_COLUMNS)
        rows = rows.sort_values("sample", kind="stable").reset_index(drop=True)
        summary = summarize(rows, config)
        if config.out is not None:
            write_results(rows, summary, config.out)
        run = ExperimentRun(
            scenario=config.scenario.name,
            config=config.describe(),
            seed=config.seed,
            samples=config.samples,
            summary=summary.to_dict("records"),
        )
        if self._repository is not None:
            await self._repository.save_run(run)
            await self._repository.save_samples(run.run_id, rows)
        for record in run.summary:
            logger.info(
                "%s: worst=%.4f mean=%.4f PoA=%.4f",
                record["rule"],
                record["worst_ratio"],
                record["mean_ratio"],
                record["poa"],
            )
        return ExperimentResult(rows, summary, run)


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> ExperimentResult:
    return asyncio.run(ExperimentRunner(config, workers).run())
