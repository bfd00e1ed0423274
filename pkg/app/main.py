"""
Command-Line Front End for the Social Image Tournament Lab

Subcommands:
- solve: closed-form equilibria for one parameter set
- verify: closed form against the numeric oracle on random parameter draws
- sweep: equilibrium correspondence over a parameter grid
- simulate: experiment dataset
- winprob: single win-probability estimate
- report: rate and test tables from a dataset

Exit status: 0 success, 1 verification mismatch, 2 bad arguments or config.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.analysis import load_dataset, write_report
from app.closed_form import RESULT_HEADER, result_row, select_max_participation_stable, solve
from app.config import WINPROB_CLI_DRAWS, config, validate_config
from app.model import ModelParams, Treatment, validate_params
from app.oracle import VERIFY_HEADER, run_verification
from app.simulator import (
    Condition,
    ExperimentConfig,
    Gender,
    SimulationContext,
    estimate_win_prob,
    simulate_experiment,
    write_dataset,
)
from app.utils import format_probability, logger, read_json_document, write_csv

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2

SELECTION_RULE = (
    "max-participation stable: among stable equilibria the highest (1 - q) r + q rho, "
    "ties to the earlier branch in i, iii, iv, v, ii"
)
WINPROB_HEADER = ("score", "gender", "treatment", "draws", "win_prob")


# ============================================================================
# Documents
# ============================================================================

class SweepSpec(BaseModel):
    """Grid of one model parameter, evaluated for each listed treatment."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    param: str = "lambda"
    start: float = Field(alias="from")
    stop: float = Field(alias="to")
    steps: int = Field(ge=2)
    params: ModelParams
    treatments: List[Treatment]

    @model_validator(mode="after")
    def _check(self) -> "SweepSpec":
        if self.start > self.stop:
            raise ValueError(f"from ({self.start}) must not exceed to ({self.stop})")
        if self.field_name not in ModelParams.model_fields:
            raise ValueError(f"Unknown sweep parameter {self.param!r}")
        if not self.treatments:
            raise ValueError("At least one treatment is required")
        return self

    @property
    def field_name(self) -> str:
        return "lam" if self.param == "lambda" else self.param

    def values(self) -> List[float]:
        return [float(value) for value in np.linspace(self.start, self.stop, self.steps)]

    def at(self, value: float) -> ModelParams:
        return self.params.model_copy(update={self.field_name: value})


def _load_params(path: str) -> ModelParams:
    return ModelParams.model_validate(read_json_document(path))


def _load_experiment(path: str) -> ExperimentConfig:
    return ExperimentConfig.model_validate(read_json_document(path))


def _emit(path: Optional[str], header: Sequence[str], rows) -> None:
    text = write_csv(path, header, rows)
    if path is None:
        sys.stdout.write(text)


def _write_meta(output: Optional[str], document: dict) -> None:
    if output is None:
        return
    target = Path(f"{output}.meta.json")
    target.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Wrote metadata to {target}")


# ============================================================================
# Commands
# ============================================================================

def cmd_solve(args: argparse.Namespace) -> int:
    params = _load_params(args.params)
    if args.lam is not None:
        params = params.with_lambda(args.lam)
    treatment = Treatment(args.treatment)

    results = solve(params, treatment)
    logger.info(f"{treatment.value}: {len(results)} equilibrium(s) at lambda={params.lam}")
    _emit(args.output, RESULT_HEADER, (result_row(result, params.lam) for result in results))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    rows = run_verification(args.draws, args.seed, args.workers)
    _emit(args.output, VERIFY_HEADER, (row.to_row() for row in rows))
    mismatches = sum(not row.match for row in rows)
    if mismatches:
        logger.error(f"{mismatches} closed-form/oracle mismatches")
        return EXIT_MISMATCH
    return EXIT_OK


def _sweep_spec(args: argparse.Namespace) -> SweepSpec:
    if args.spec:
        return SweepSpec.model_validate(read_json_document(args.spec))

    missing = [flag for flag, value in (("--params", args.params), ("--from", args.start),
                                        ("--to", args.stop), ("--steps", args.steps)) if value is None]
    if missing:
        raise ValueError(f"sweep needs --spec or {', '.join(missing)}")
    treatments = list(Treatment) if args.treatment == ["all"] else [Treatment(t) for t in args.treatment]
    return SweepSpec(
        param=args.param,
        start=args.start,
        stop=args.stop,
        steps=args.steps,
        params=_load_params(args.params),
        treatments=treatments,
    )


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = _sweep_spec(args)
    all_rows, selected_rows, skipped = [], [], []

    for treatment in spec.treatments:
        for value in spec.values():
            params = spec.at(value)
            report = validate_params(params, treatment)
            if not report.passed:
                skipped.append({"treatment": treatment.value, "value": value, "violations": report.violations})
                logger.warning(f"Skipping {treatment.value} at {spec.param}={value}: {report.violations}")
                continue
            results = solve(params, treatment)
            all_rows.extend(result_row(result, params.lam) for result in results)
            chosen = select_max_participation_stable(results, params.q)
            selected_rows.append(result_row(chosen, params.lam))

    _emit(args.output, RESULT_HEADER, all_rows)
    if args.output is not None:
        write_csv(f"{args.output}.selected.csv", RESULT_HEADER, selected_rows)
    _write_meta(
        args.output,
        {
            "param": spec.param,
            "values": spec.values(),
            "treatments": [treatment.value for treatment in spec.treatments],
            "selection": SELECTION_RULE,
            "skipped": skipped,
        },
    )
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    experiment = _load_experiment(args.config)
    if args.condition is not None:
        experiment = experiment.model_copy(update={"condition": Condition(args.condition)})
    seed = experiment.seed if args.seed is None else args.seed

    records = simulate_experiment(experiment, seed, workers=args.workers)
    text = write_dataset(records, args.output)
    if args.output is None:
        sys.stdout.write(text)
    _write_meta(
        args.output,
        {
            "seed": seed,
            "sessions": experiment.sessions,
            "condition": experiment.condition.value,
            "decision_mode": experiment.decision_mode.value,
            "selection": SELECTION_RULE,
            "calibration_warnings": sum(record.calibration_warning for record in records),
        },
    )
    return EXIT_OK


def _parse_pool(text: str) -> List[float]:
    try:
        return [float(value) for value in text.split(",") if value.strip()]
    except ValueError:
        raise ValueError(f"Pool must be comma-separated numbers, got {text!r}")


def cmd_winprob(args: argparse.Namespace) -> int:
    if args.config:
        experiment = _load_experiment(args.config)
        context = SimulationContext(experiment, experiment.seed)
        men_pool, women_pool, bonus = context.men_pool, context.women_pool, experiment.preferential_bonus
    elif args.men_pool and args.women_pool:
        men_pool, women_pool, bonus = _parse_pool(args.men_pool), _parse_pool(args.women_pool), args.bonus
    else:
        raise ValueError("winprob needs --config or both --men-pool and --women-pool")

    treatment = Treatment(args.treatment)
    estimate = estimate_win_prob(
        args.score,
        Gender(args.gender),
        men_pool,
        women_pool,
        treatment,
        n_draws=args.draws,
        seed=args.seed,
        bonus=bonus,
    )
    row = [f"{args.score:g}", args.gender, treatment.value, str(args.draws), format_probability(estimate)]
    _emit(args.output, WINPROB_HEADER, [row])
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    frame = load_dataset(args.dataset)
    table, tests = write_report(frame, args.rates, args.tests, args.donations)
    logger.info(f"Report: {len(table.rows)} rate rows, {len(tests)} tests")
    return EXIT_OK


# ============================================================================
# Parser
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="social-image-tournaments",
        description="Equilibria, oracle checks and experiment simulation for tournament entry under image concerns",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    treatments = [treatment.value for treatment in Treatment]

    solve_parser = sub.add_parser("solve", help="closed-form equilibria for one parameter set")
    solve_parser.add_argument("--treatment", required=True, choices=treatments)
    solve_parser.add_argument("--params", required=True, help="ModelParams JSON document")
    solve_parser.add_argument("--lambda", dest="lam", type=float, help="override the image weight")
    solve_parser.add_argument("--output")
    solve_parser.set_defaults(handler=cmd_solve)

    verify_parser = sub.add_parser("verify", help="closed form vs oracle on random draws")
    verify_parser.add_argument("--draws", type=int, default=200)
    verify_parser.add_argument("--seed", type=int, default=0)
    verify_parser.add_argument("--workers", type=int, default=config.workers)
    verify_parser.add_argument("--output")
    verify_parser.set_defaults(handler=cmd_verify)

    sweep_parser = sub.add_parser("sweep", help="equilibrium correspondence over a grid")
    sweep_parser.add_argument("--spec", help="SweepSpec JSON document (replaces the flags below)")
    sweep_parser.add_argument("--param", default="lambda")
    sweep_parser.add_argument("--from", dest="start", type=float)
    sweep_parser.add_argument("--to", dest="stop", type=float)
    sweep_parser.add_argument("--steps", type=int)
    sweep_parser.add_argument("--treatment", nargs="+", default=["all"], choices=treatments + ["all"])
    sweep_parser.add_argument("--params")
    sweep_parser.add_argument("--output")
    sweep_parser.set_defaults(handler=cmd_sweep)

    simulate_parser = sub.add_parser("simulate", help="simulate the experiment")
    simulate_parser.add_argument("--config", required=True, help="ExperimentConfig JSON document")
    simulate_parser.add_argument("--seed", type=int)
    simulate_parser.add_argument("--condition", choices=[condition.value for condition in Condition])
    simulate_parser.add_argument("--workers", type=int, default=config.workers)
    simulate_parser.add_argument("--output")
    simulate_parser.set_defaults(handler=cmd_simulate)

    winprob_parser = sub.add_parser("winprob", help="estimate a win probability")
    winprob_parser.add_argument("--score", type=float, required=True)
    winprob_parser.add_argument("--gender", required=True, choices=[gender.value for gender in Gender])
    winprob_parser.add_argument("--treatment", default="baseline", choices=treatments)
    winprob_parser.add_argument("--config", help="take reference pools from an ExperimentConfig")
    winprob_parser.add_argument("--men-pool")
    winprob_parser.add_argument("--women-pool")
    winprob_parser.add_argument("--bonus", type=float, default=1.0)
    winprob_parser.add_argument("--draws", type=int, default=WINPROB_CLI_DRAWS)
    winprob_parser.add_argument("--seed", type=int, default=0)
    winprob_parser.add_argument("--output")
    winprob_parser.set_defaults(handler=cmd_winprob)

    report_parser = sub.add_parser("report", help="rate and test tables from a dataset")
    report_parser.add_argument("--dataset", required=True)
    report_parser.add_argument("--rates", required=True)
    report_parser.add_argument("--tests", required=True)
    report_parser.add_argument("--donations")
    report_parser.set_defaults(handler=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        validate_config()
        if getattr(args, "workers", 1) < 1:
            raise ValueError("--workers must be >= 1")
        return args.handler(args)
    except (ValueError, OSError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
