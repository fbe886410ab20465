"""The ``crestline`` command.

Subcommands:

- ``regime``: conjugate streams, critical constants and the (r, 𝔽) cusp table
- ``bifurcate``: dispersion root and the converged onset wave
- ``continue``: follow the branch, with checkpoint/resume, and classify it
- ``verify FIELD``: certify a stored field
- ``export LOG``: plot-ready tables from a branch log

Exit codes: 0 success, 1 verification failure, 2 regime rejection,
3 I/O, parse or configuration error (bad command-line usage included),
4 solver failure.

Output layout under ``--out`` (or ``out_dir`` from the config)::

    regime.json  cusp.csv
    onset/field.csv  onset/field.json  onset/seed.json
    branch.jsonl  outcome.json  checkpoint/
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import TYPE_CHECKING, NoReturn

import numpy as np

from crestline._config import GateConfig, RunConfig, load_config
from crestline._errors import BranchLogError, ConfigError, CrestlineError, VerificationError
from crestline._formatter_registry import get_formatter, list_formatters
from crestline._log import configure_logging
from crestline._serialize import write_csv, write_json
from crestline.continuation import (
    BranchRecord,
    classify_branch,
    continue_branch,
    initial_state,
    parse_branch_log,
    read_branch_log,
    read_checkpoint,
    start_branch,
    write_branch_log,
    write_checkpoint,
)
from crestline.diagnostics import certify
from crestline.dispersion import dispersion_eigenvalue
from crestline.heightfield import read_field, write_field
from crestline.streamflow import (
    build_vorticity_model,
    conjugate_streams,
    critical_parameters,
    cusp_table,
)

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from crestline.continuation import BranchPoint, ContinuationState
    from crestline.streamflow import FlowRegime
    from crestline.vorticity import VorticityModel

__all__ = ["main", "build_parser"]

logger = logging.getLogger(__name__)

CUSP_HEADER = ("r", "flow_force_subcritical", "flow_force_supercritical")
BRANCH_LOG = "branch.jsonl"
CHECKPOINT_DIR = "checkpoint"


def _emit(payload: Mapping[str, object], fmt: str) -> None:
    sys.stdout.write(get_formatter(fmt).format(payload))
    sys.stdout.flush()


def _run_config(args: argparse.Namespace) -> RunConfig:
    if args.config is None:
        raise ConfigError("config", "this command needs --config PATH")
    config = load_config(Path(args.config))
    if args.out is not None:
        config = config.with_out_dir(Path(args.out))
    return config


def _cusp_rs(model: VorticityModel, r: float, points: int) -> list[float]:
    """Interior sample of (Rc, d0); the upper end is max(2r, 2Rc) when d0 = ∞."""
    crit = critical_parameters(model)
    upper = crit.d0 if np.isfinite(crit.d0) else max(2.0 * r, 2.0 * crit.Rc)
    return np.linspace(crit.Rc, upper, points + 2)[1:-1].tolist()


def _cmd_regime(args: argparse.Namespace) -> int:
    config = _run_config(args)
    model = build_vorticity_model(config.vorticity)
    regime = conjugate_streams(model, config.r)
    table = cusp_table(model, _cusp_rs(model, config.r, config.cusp_points),
                       max_workers=args.jobs)
    write_json(config.out_dir / "regime.json", regime.to_dict())
    write_csv(config.out_dir / "cusp.csv", CUSP_HEADER, table)
    _emit(regime.to_dict(), args.format)
    return 0


def _onset(config: RunConfig) -> tuple[FlowRegime, BranchPoint]:
    model = build_vorticity_model(config.vorticity)
    regime = conjugate_streams(model, config.r)
    seed = dispersion_eigenvalue(regime.subcritical)
    onset = start_branch(regime, seed, config.a0, grid_config=config.grid,
                         policy=config.policy, gate=config.gate)
    onset_dir = config.out_dir / "onset"
    write_field(onset.field, onset_dir / "field.csv")
    write_json(onset_dir / "seed.json", seed.to_dict())
    write_checkpoint(config.out_dir / CHECKPOINT_DIR, onset, None,
                     initial_state(onset, config.policy))
    return regime, onset


def _cmd_bifurcate(args: argparse.Namespace) -> int:
    config = _run_config(args)
    _, onset = _onset(config)
    _emit({
        "lambda": onset.field.lam,
        "Lambda": onset.Lambda,
        "amplitude": onset.field.amplitude,
        "residual_norm": onset.field.residual_norm,
        "diagnostics_pass": onset.diagnostics.passed,
    }, args.format)
    return 0


def _cmd_continue(args: argparse.Namespace) -> int:
    config = _run_config(args)
    log_path = config.out_dir / BRANCH_LOG
    checkpoint = args.resume or config.seed_checkpoint
    state: ContinuationState | None
    if checkpoint is not None:
        start, previous, state = read_checkpoint(Path(checkpoint), config.gate)
        lines = _existing_log(log_path)[: state.count]
        if len(lines) < state.count:
            raise BranchLogError(
                f"{log_path} holds {len(lines)} points but the checkpoint is at {state.count}"
            )
    else:
        _, start = _onset(config)
        previous, state = None, None
        lines = [start.to_log()]
    write_branch_log(log_path, lines)
    checkpoint_dir = config.out_dir / CHECKPOINT_DIR

    def on_accept(point: BranchPoint, before: BranchPoint | None, st: ContinuationState) -> None:
        lines.append(point.to_log())
        write_branch_log(log_path, lines)
        write_checkpoint(checkpoint_dir, point, before, st)

    run = continue_branch(start, config.policy, previous=previous, state=state,
                          gate=config.gate, grid_config=config.grid, on_accept=on_accept)
    records = [BranchRecord.from_dict(line) for line in lines]
    outcome = classify_branch(
        records,
        omega_class=start.field.problem.model.omega_class,
        r=config.r,
        slope_max=config.policy.slope_max,
        halt_reason=run.halt,
    )
    if run.warnings:
        outcome = replace(outcome, warnings=run.warnings + outcome.warnings)
    write_json(config.out_dir / "outcome.json", outcome.to_dict())
    summary = {
        "label": str(outcome.label),
        "halt_reason": str(run.halt),
        "points": len(records),
        "warnings": list(outcome.warnings),
    }
    _emit(summary, args.format)
    return 0


def _existing_log(path: Path) -> list[dict[str, object]]:
    if not path.exists():
        return []
    text = path.read_text(encoding="utf-8")
    parse_branch_log(text, source=str(path))
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def _cmd_verify(args: argparse.Namespace) -> int:
    gate = load_config(Path(args.config)).gate if args.config else GateConfig()
    field = read_field(Path(args.field))
    diagnostics = certify(field, None, gate)
    report = diagnostics.to_dict()
    if args.out is not None:
        write_json(Path(args.out) / "diagnostics.json", report)
    _emit(report, args.format)
    return 0 if diagnostics.passed else VerificationError.exit_code


def _cmd_export(args: argparse.Namespace) -> int:
    log_path = Path(args.log)
    records = read_branch_log(log_path)
    out = Path(args.out) if args.out is not None else log_path.parent
    columns = {
        "t_lambda.csv": (("t", "Lambda"), [(rec.t, rec.Lambda) for rec in records]),
        "t_gap.csv": (("t", "stagnation_gap"), [(rec.t, rec.stagnation_gap) for rec in records]),
        "r_flow_force.csv": (("r", "flow_force"), [(rec.r, rec.flow_force) for rec in records]),
    }
    for name, (header, rows) in columns.items():
        write_csv(out / name, header, rows)
    logger.info("exported %d points to %s", len(records), out)
    return 0


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the configuration code."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="crestline",
        description="Steady periodic water waves with vorticity at fixed Bernoulli constant.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, *, fmt: bool = True) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", type=Path, default=None, help="Run configuration file")
        sub.add_argument("--out", type=Path, default=None, help="Output directory")
        sub.add_argument("--jobs", type=int, default=None, help="Worker threads for r-sweeps")
        if fmt:
            sub.add_argument("--format", default="terminal", choices=list_formatters(),
                             help="Report format on stdout")
        return sub

    add("regime", "Conjugate streams and critical constants").set_defaults(func=_cmd_regime)
    add("bifurcate", "Onset wavenumber and first wave").set_defaults(func=_cmd_bifurcate)
    cont = add("continue", "Follow and classify the branch")
    cont.add_argument("--resume", type=Path, default=None, help="Checkpoint directory")
    cont.set_defaults(func=_cmd_continue)
    verify = add("verify", "Certify a stored field")
    verify.add_argument("field", type=Path, help="Field CSV (sidecar JSON alongside)")
    verify.set_defaults(func=_cmd_verify)
    export = add("export", "Plot-ready tables from a branch log", fmt=False)
    export.add_argument("log", type=Path, help="Branch log (JSON lines)")
    export.set_defaults(func=_cmd_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return int(args.func(args))
    except CrestlineError as exc:
        print(f"crestline: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except LookupError as exc:
        print(f"crestline: error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
