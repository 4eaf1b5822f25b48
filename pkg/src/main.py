"""Command-line entry point: ``gmmc-poa <command> ...``.

Exit codes: 0 success, 1 solver failure, 2 validation failure, 3 oracle capacity
exceeded, 4 I/O error.
"""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

from rich.console import Console
from rich.table import Table

from src.closed_forms import (
    Maximizer,
    covering_w_star,
    covering_w_star_nonincreasing,
    curvature,
    curvature_approx,
    gairing_limit,
    poa_gairing,
    poa_mc_submodular,
    poa_shapley_submodular,
    submodular_w_star,
    supermodular_poa,
)
from src.config import get_config, use_config
from src.design import optimal_rule, optimal_rule_covering, optimal_rule_submodular
from src.dynamics.best_response import run_best_response, trace_to_csv
from src.dynamics.scheduler import RandomOrderScheduler, RoundRobinScheduler
from src.errors import CapacityError, PoAError, SolverError
from src.game import is_nash, validate_standing_assumptions, welfare
from src.harness.experiment import ExperimentConfig, ExperimentResult, ExperimentRunner
from src.harness.scenarios import (
    INIT_STREAM,
    SCENARIOS,
    CachingParams,
    CachingScenario,
    FileScenario,
    RandomSingletonScenario,
    Scenario,
    VehicleTargetScenario,
    random_choices,
    resolve_basis,
    resolve_rule,
    sample_rng,
)
from src.harness.serialization import load_instance, save_instance, save_rule
from src.models import Allocation, DistributionRule, GameInstance, Method, PoAReport, WelfareBasis
from src.oracle import all_nash, exact_optimum, worst_nash
from src.poa.certificate import compute_poa
from src.poa.smoothness import smoothness_bound
from src.repository.sqlite import SQLiteRepository

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_VALIDATION = 2
EXIT_CAPACITY = 3
EXIT_IO = 4

_METHODS = {
    "primal": Method.PRIMAL,
    "dual": Method.DUAL,
    "reduced": Method.REDUCED_DUAL,
    "auto": Method.AUTO,
}

console = Console()


def setup_logging(level: str = "INFO") -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.12g}"


def _key_value_table(title: str, rows: Sequence[tuple[str, str]]) -> Table:
    table = Table(title=title)
    table.add_column("field", style="cyan")
    table.add_column("value", justify="right")
    for key, value in rows:
        table.add_row(key, value)
    return table


def _load_with_rule(args: argparse.Namespace) -> GameInstance:
    instance = load_instance(Path(args.instance))
    if args.rule:
        instance = instance.with_rule(resolve_rule(args.rule, instance.basis))
    return instance


# ── poa ────────────────────────────────────────────────────────────


def _report_rows(report: PoAReport) -> list[tuple[str, str]]:
    return [
        ("n", str(report.n)),
        ("rule", report.rule.name or "-"),
        ("basis", report.basis.name or "-"),
        ("method", report.method.value),
        ("W*", _fmt(report.w_star)),
        ("PoA", _fmt(report.poa)),
        ("lambda*", _fmt(report.lambda_star)),
        ("mu*", _fmt(report.mu_star)),
    ]


def cmd_poa(args: argparse.Namespace) -> int:
    basis = resolve_basis(args.basis, args.n)
    rule = resolve_rule(args.rule, basis)
    report = compute_poa(rule, basis, args.n, _METHODS[args.method], witness=args.witness)
    rows = _report_rows(report)
    if report.witness is not None:
        case = report.witness
        w_eq = welfare(case.instance, case.equilibrium)
        w_opt = welfare(case.instance, case.optimum)
        rows += [
            ("witness resources", str(case.instance.n_resources)),
            ("W(equilibrium)", _fmt(w_eq)),
            ("W(optimum)", _fmt(w_opt)),
            ("equilibrium is Nash", str(bool(is_nash(case.instance, case.equilibrium)))),
        ]
        if args.out:
            save_instance(case.instance, Path(args.out))
    console.print(_key_value_table("Price of anarchy", rows))
    return EXIT_OK


# ── design ─────────────────────────────────────────────────────────


def cmd_design(args: argparse.Namespace) -> int:
    if args.family == "covering":
        rule, report = optimal_rule_covering(args.n)
    else:
        basis = resolve_basis(args.basis, args.n)
        design = optimal_rule_submodular if args.family == "submodular" else optimal_rule
        rule, report = design(basis, args.n)
    table = Table(title=f"Optimal rule ({args.family})")
    table.add_column("j", justify="right")
    table.add_column("f(j)", justify="right")
    for j, value in enumerate(rule.inner, start=1):
        table.add_row(str(j), _fmt(value))
    console.print(table)
    console.print(_key_value_table("Certificate", _report_rows(report)))
    if args.out:
        save_rule(rule, Path(args.out))
    return EXIT_OK


# ── closed-form ────────────────────────────────────────────────────


@dataclass
class _FormulaInputs:
    n: int
    basis_spec: str
    rule_spec: str

    @cached_property
    def basis(self) -> WelfareBasis:
        return resolve_basis(self.basis_spec, self.n)

    @cached_property
    def rule(self) -> DistributionRule:
        return resolve_rule(self.rule_spec, self.basis)


CLOSED_FORMS: dict[str, Callable[[_FormulaInputs], float | Maximizer]] = {
    "submodular-wstar": lambda x: submodular_w_star(x.rule, x.basis, x.n),
    "shapley-submodular": lambda x: poa_shapley_submodular(x.basis, x.n),
    "mc-submodular": lambda x: poa_mc_submodular(x.basis, x.n),
    "covering-wstar": lambda x: covering_w_star(x.rule, x.n),
    "covering-nonincreasing": lambda x: covering_w_star_nonincreasing(x.rule, x.n),
    "supermodular": lambda x: supermodular_poa(x.rule, x.basis, x.n),
    "gairing": lambda x: poa_gairing(x.n),
    "gairing-limit": lambda x: gairing_limit(),
    "smoothness-bound": lambda x: smoothness_bound(x.n),
    "curvature": lambda x: curvature(x.basis, x.n),
    "curvature-approx": lambda x: curvature_approx(x.basis, x.n),
}


def cmd_closed_form(args: argparse.Namespace) -> int:
    result = CLOSED_FORMS[args.formula](_FormulaInputs(args.n, args.basis, args.rule))
    if isinstance(result, Maximizer):
        rows = [
            ("W*", _fmt(result.value)),
            ("PoA", _fmt(result.poa)),
            ("attained at", str(result.at)),
        ]
    else:
        rows = [("value", _fmt(result))]
    console.print(_key_value_table(f"{args.formula} (n={args.n})", rows))
    return EXIT_OK


# ── dynamics / oracle / validate ───────────────────────────────────


def cmd_dynamics(args: argparse.Namespace) -> int:
    instance = _load_with_rule(args)
    if args.init == "first":
        choices = [0] * instance.n_agents
    else:
        choices = random_choices(instance, sample_rng(args.seed, 0, INIT_STREAM))
    scheduler = RandomOrderScheduler(args.seed) if args.random_order else RoundRobinScheduler()
    final, trace = run_best_response(
        instance, Allocation.of(instance, choices), args.max_rounds, scheduler=scheduler
    )
    rows = [
        ("rounds", str(trace.rounds)),
        ("switches", str(trace.switches)),
        ("converged", str(trace.converged)),
        ("initial potential", _fmt(trace.initial_potential)),
        ("final potential", _fmt(trace.potential_path[-1])),
        ("W(final)", _fmt(welfare(instance, final))),
        ("final is Nash", str(bool(is_nash(instance, final)))),
        ("final actions", str(list(final.choices))),
    ]
    console.print(_key_value_table(f"Best response ({scheduler.name})", rows))
    if args.out:
        Path(args.out).write_text(trace_to_csv(trace), encoding="utf-8")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    instance = _load_with_rule(args)
    optimum, w_opt = exact_optimum(instance, args.cap)
    equilibria = all_nash(instance, args.cap)
    worst, w_worst = worst_nash(instance, args.cap)
    rows = [
        ("profiles", str(instance.profile_count)),
        ("optimum", str(list(optimum.choices))),
        ("W(optimum)", _fmt(w_opt)),
        ("pure Nash equilibria", str(len(equilibria))),
        ("worst equilibrium", str(list(worst.choices))),
        ("W(worst equilibrium)", _fmt(w_worst)),
        ("efficiency", _fmt(w_worst / w_opt) if w_opt > 0 else "-"),
    ]
    console.print(_key_value_table("Exhaustive analysis", rows))
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    instance = _load_with_rule(args)
    violations = validate_standing_assumptions(instance)
    if not violations:
        console.print(f"[green]ok[/green]: {instance.n_agents} agents, "
                      f"{instance.n_resources} resources")
        return EXIT_OK
    for violation in violations:
        console.print(f"[red]violation[/red]: {violation}")
    return EXIT_VALIDATION


# ── bench ──────────────────────────────────────────────────────────


def _caching_params(args: argparse.Namespace) -> CachingParams:
    if args.paper_scale:
        return CachingParams.paper_scale(args.alpha)
    return CachingParams(
        grid_x=args.grid,
        grid_y=args.grid,
        n_nodes=args.nodes,
        n_items=args.items,
        alpha=args.alpha,
        radius=args.radius,
        capacity=args.capacity,
        exact=args.exact,
    )


def build_scenario(args: argparse.Namespace) -> Scenario:
    if args.scenario == "vehicle-target":
        n_targets = args.n_targets if args.n_targets else args.n_agents + 1
        return VehicleTargetScenario(args.n_agents, n_targets, args.p)
    if args.scenario == "caching":
        return CachingScenario(_caching_params(args))
    if args.scenario == "random-singleton":
        return RandomSingletonScenario(args.n_agents, args.n_resources, args.basis)
    return FileScenario(str(args.instance))


async def _bench(config: ExperimentConfig, workers: int | None, archive: bool) -> ExperimentResult:
    if not archive:
        return await ExperimentRunner(config, workers).run()
    repository = SQLiteRepository(get_config())
    await repository.initialize()
    try:
        return await ExperimentRunner(config, workers, repository).run()
    finally:
        await repository.close()


def cmd_bench(args: argparse.Namespace) -> int:
    if args.scenario == "file" and not args.instance:
        raise PoAError("bench file needs --instance")
    scenario = build_scenario(args)
    oracle = args.oracle if args.oracle is not None else args.scenario != "caching"
    config = ExperimentConfig(
        scenario=scenario,
        rules=tuple(spec.strip() for spec in args.rules.split(",") if spec.strip()),
        seed=args.seed,
        samples=args.samples,
        oracle=oracle,
        max_rounds=args.max_rounds,
        random_order=args.random_order,
        out=Path(args.out) if args.out else None,
    )
    result = asyncio.run(_bench(config, args.workers, args.archive))
    table = Table(title=f"{scenario.name}: {config.samples} samples (seed {config.seed})")
    for column in ("rule", "worst_ratio", "mean_ratio", "median", "worst_nash_ratio", "poa",
                   "max_rounds"):
        table.add_column(column, justify="right")
    for record in result.summary.to_dict("records"):
        table.add_row(
            str(record["rule"]),
            *(_fmt(float(record[k])) for k in ("worst_ratio", "mean_ratio", "median",
                                               "worst_nash_ratio", "poa")),
            str(record["max_rounds"]),
        )
    console.print(table)
    if args.archive:
        console.print(f"archived as run [bold]{result.run.run_id}[/bold]")
    return EXIT_OK


# ── Parser ─────────────────────────────────────────────────────────


def _add_rule_basis(parser: argparse.ArgumentParser, *, with_rule: bool = True) -> None:
    parser.add_argument("--n", type=int, required=True, help="max number of agents")
    parser.add_argument(
        "--basis", default="covering", help="covering | power:D | vehicle:P | file:PATH"
    )
    if with_rule:
        parser.add_argument("--rule", default="sv", help="sv | mc | gairing | optimal | file:PATH")


def _add_instance_commands(sub: argparse._SubParsersAction) -> None:
    dynamics = sub.add_parser("dynamics", help="best-response dynamics on an instance file")
    dynamics.add_argument("instance")
    dynamics.add_argument("--rule", default=None, help="override the file's rule")
    dynamics.add_argument("--max-rounds", type=int, default=None)
    dynamics.add_argument("--random-order", action="store_true")
    dynamics.add_argument("--init", choices=["random", "first"], default="random")
    dynamics.set_defaults(handler=cmd_dynamics)

    oracle = sub.add_parser("oracle", help="exhaustive optimum / equilibria of an instance")
    oracle.add_argument("instance")
    oracle.add_argument("--rule", default=None)
    oracle.add_argument("--cap", type=int, default=None, help="profile cap")
    oracle.set_defaults(handler=cmd_oracle)

    validate = sub.add_parser("validate", help="check the standing assumptions")
    validate.add_argument("instance")
    validate.add_argument("--rule", default=None)
    validate.set_defaults(handler=cmd_validate)


def _add_bench_command(sub: argparse._SubParsersAction) -> None:
    bench = sub.add_parser("bench", help="seeded benchmark sweeps")
    bench.add_argument("scenario", choices=SCENARIOS)
    bench.add_argument("--samples", type=int, default=100)
    bench.add_argument("--rules", default="sv", help="comma separated rule specs")
    bench.add_argument("--n-agents", type=int, default=10)
    bench.add_argument("--n-targets", type=int, default=None)
    bench.add_argument("--p", type=float, default=0.8)
    bench.add_argument("--n-resources", type=int, default=5)
    bench.add_argument("--basis", default="covering")
    bench.add_argument("--instance", default=None)
    bench.add_argument("--grid", type=int, default=200)
    bench.add_argument("--nodes", type=int, default=20)
    bench.add_argument("--items", type=int, default=200)
    bench.add_argument("--alpha", type=float, default=0.8)
    bench.add_argument("--radius", type=float, default=50.0)
    bench.add_argument("--capacity", type=int, default=1)
    bench.add_argument("--exact", action="store_true", help="caches hold exactly capacity items")
    bench.add_argument("--paper-scale", action="store_true")
    bench.add_argument("--oracle", action=argparse.BooleanOptionalAction, default=None)
    bench.add_argument("--max-rounds", type=int, default=None)
    bench.add_argument("--random-order", action="store_true")
    bench.add_argument("--workers", type=int, default=None)
    bench.add_argument("--archive", action="store_true", help="store the run in sqlite")
    bench.set_defaults(handler=cmd_bench)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmmc-poa", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="output file")
    parser.add_argument("--tol", type=float, default=None, help="LP feasibility tolerance")
    parser.add_argument("--log-level", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    poa = sub.add_parser("poa", help="exact PoA of a rule")
    _add_rule_basis(poa)
    poa.add_argument("--method", choices=sorted(_METHODS), default="auto")
    poa.add_argument("--witness", action="store_true", help="build a tight instance")
    poa.set_defaults(handler=cmd_poa)

    design = sub.add_parser("design", help="PoA-optimal distribution rule")
    _add_rule_basis(design, with_rule=False)
    design.add_argument("--family", choices=["general", "submodular", "covering"],
                        default="general")
    design.set_defaults(handler=cmd_design)

    closed = sub.add_parser("closed-form", help="evaluate an explicit formula")
    closed.add_argument("formula", choices=sorted(CLOSED_FORMS))
    _add_rule_basis(closed)
    closed.set_defaults(handler=cmd_closed_form)

    _add_instance_commands(sub)
    _add_bench_command(sub)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = get_config()
    if args.tol is not None:
        config = replace(config, feas_tol=args.tol)
        use_config(config)
    setup_logging(args.log_level or config.log_level)
    try:
        return args.handler(args)
    except CapacityError as exc:
        logger.error("Capacity exceeded: %s", exc)
        return EXIT_CAPACITY
    except SolverError as exc:
        logger.error("Solver failure: %s", exc)
        return EXIT_SOLVER
    except PoAError as exc:
        logger.error("Validation failed: %s", exc)
        return EXIT_VALIDATION
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
