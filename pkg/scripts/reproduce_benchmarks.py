"""벤치마크 재현: vehicle-target / caching 시나리오 + 커버링 PoA 표.

Seeded sweeps를 돌려 CSV로 저장하고 sqlite에 아카이브한다.
Usage: uv run python scripts/reproduce_benchmarks.py [--samples 200] [--seed 0]
"""

from __future__ import annotations

import argparse
import asyncio
import logging
from pathlib import Path

from src.bases import covering
from src.closed_forms import covering_w_star, gairing_limit, poa_gairing
from src.config import Config
from src.distributions import marginal_contribution, shapley
from src.harness.experiment import ExperimentConfig, ExperimentResult, ExperimentRunner
from src.harness.scenarios import CachingParams, CachingScenario, VehicleTargetScenario
from src.repository.sqlite import SQLiteRepository

logging.basicConfig(level=logging.INFO, format="%(asctime)s | %(message)s")


def covering_table(sizes: tuple[int, ...] = (2, 3, 5, 10, 20, 50)) -> None:
    print(f"{'n':>4} | {'SV':>8} | {'MC':>8} | {'optimal':>8}")
    for n in sizes:
        sv = covering_w_star(shapley(n), n).poa
        mc = covering_w_star(marginal_contribution(covering(n)), n).poa
        print(f"{n:>4} | {sv:>8.4f} | {mc:>8.4f} | {poa_gairing(n):>8.4f}")
    print(f"{'inf':>4} | {'':>8} | {'0.5':>8} | {gairing_limit():>8.4f}")


async def _sweep(config: ExperimentConfig, repo: SQLiteRepository) -> ExperimentResult:
    result = await ExperimentRunner(config, None, repo).run()
    print(f"\n{config.scenario.name} (run {result.run.run_id})")
    print(result.summary.to_string(index=False))
    return result


async def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--paper-scale", action="store_true", help="800x800 grid, 100 nodes")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    covering_table()

    repo = SQLiteRepository(Config())
    await repo.initialize()
    try:
        await _sweep(
            ExperimentConfig(
                scenario=VehicleTargetScenario(10, 11, 0.8),
                rules=("sv", "mc", "optimal"),
                seed=args.seed,
                samples=args.samples,
                out=out_dir / "vehicle_target.csv",
            ),
            repo,
        )
        for alpha in (0.4, 0.8, 1.2):
            params = CachingParams.paper_scale(alpha) if args.paper_scale else CachingParams(
                alpha=alpha
            )
            await _sweep(
                ExperimentConfig(
                    scenario=CachingScenario(params),
                    rules=("sv", "mc", "gairing"),
                    seed=args.seed,
                    samples=args.samples,
                    oracle=False,
                    out=out_dir / f"caching_alpha{alpha}.csv",
                ),
                repo,
            )
    finally:
        await repo.close()


if __name__ == "__main__":
    asyncio.run(main())
