"""Command-line interface: run, validate and sweep simulation configs.

Exit codes are part of the contract: 0 success, 1 configuration/validation
failure, 2 numerical failure (non-finite state, timestamp on stderr).
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from .analysis import SteadyStateNotReachedError, TraceTooShortError, SummaryReport, summarize
from .config import (
    ConfigError,
    RunConfig,
    SweepSpec,
    build_scenario,
    load_config,
    render_config,
    set_axis_value,
)
from .dynamics import IntegrationError, integrate
from .machine import ParameterError, validate_parameters
from .output import REPORT_SPEED_TOL, write_plot_script, write_summary, write_trace_csv

__all__ = ["main"]

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2

_DEFAULT_SWEEP_FIELDS = (
    "final_speed_mech",
    "slip",
    "mean_torque",
    "torque_ripple_pp",
    "settle_time",
)
_SUMMARY_FIELDS = tuple(SummaryReport.__dataclass_fields__)


class _CliError(Exception):
    """Bad command line; reported on stderr with exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors, which would collide with
    # the numerical-failure code; fold usage errors into exit 1 instead.
    def error(self, message):
        raise _CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="tpim", description="Two-phase induction motor simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="integrate a scenario and write trace + summary")
    run.add_argument("config", help="config file path or bundled config name")
    run.add_argument("--output-dir", help="override output.directory")
    run.add_argument("--record-every", type=int, help="override integrator.record_every")
    run.add_argument(
        "--emit-plot-script",
        action="store_true",
        help="also write a matplotlib script rendering the trace CSV",
    )
    run.add_argument(
        "--speed-tol",
        type=float,
        default=REPORT_SPEED_TOL,
        help="steady-state speed tolerance used by the summary report",
    )

    val = sub.add_parser("validate", help="parse + validate only, echo the resolved config")
    val.add_argument("config", help="config file path or bundled config name")

    sweep = sub.add_parser("sweep", help="run the config once per axis value")
    sweep.add_argument("config", help="base config file path or bundled config name")
    sweep.add_argument("--axis", required=True, help="dotted numeric parameter path")
    sweep.add_argument("--values", required=True, help="comma-separated numbers")
    sweep.add_argument(
        "--fields",
        default=",".join(_DEFAULT_SWEEP_FIELDS),
        help="comma-separated summary fields to tabulate",
    )
    sweep.add_argument("--output-dir", help="override output.directory")
    sweep.add_argument(
        "--speed-tol",
        type=float,
        default=REPORT_SPEED_TOL,
        help="steady-state speed tolerance used for the tabulated summaries",
    )
    return parser


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    if getattr(args, "output_dir", None):
        config = replace(config, output=replace(config.output, directory=args.output_dir))
    if getattr(args, "record_every", None):
        config = replace(
            config, integrator=replace(config.integrator, record_every=args.record_every)
        )
    if getattr(args, "emit_plot_script", False):
        config = replace(config, output=replace(config.output, emit_plot_script=True))
    return config


def _out_dir(config: RunConfig) -> Path:
    directory = Path(config.output.directory)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def _cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    p = validate_parameters(config.machine)
    trace = integrate(p, build_scenario(config))

    directory = _out_dir(config)
    prefix = config.output.prefix
    csv_path = directory / f"{prefix}_trace.csv"
    summary_path = directory / f"{prefix}_summary.txt"
    write_trace_csv(trace, csv_path)
    write_summary(trace, p, summary_path, speed_tol=args.speed_tol)
    print(csv_path)
    print(summary_path)
    if config.output.emit_plot_script:
        script_path = directory / f"{prefix}_plot.py"
        write_plot_script(script_path, csv_path.name, prefix)
        print(script_path)
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = load_config(args.config)
    sys.stdout.write(render_config(config))
    return EXIT_OK


def _parse_sweep_spec(args) -> SweepSpec:
    base = load_config(args.config)
    base = _apply_overrides(base, args)
    try:
        values = tuple(float(v) for v in args.values.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"--values must be comma-separated numbers: {args.values!r}") from None
    if not values:
        raise ConfigError("--values must name at least one value")
    fields = tuple(f.strip() for f in args.fields.split(",") if f.strip())
    if not fields:
        raise ConfigError("--fields must name at least one summary field")
    for name in fields:
        if name not in _SUMMARY_FIELDS:
            raise ConfigError(
                f"unknown summary field {name!r}; choose from {_SUMMARY_FIELDS}"
            )
    # Surface bad axis names before any run.
    set_axis_value(base, args.axis, values[0])
    return SweepSpec(base=base, axis=args.axis, values=values, fields=fields)


def _sweep_row(spec: SweepSpec, value: float, speed_tol: float) -> tuple[list[str], str]:
    try:
        config = set_axis_value(spec.base, spec.axis, value)
        p = validate_parameters(config.machine)
        trace = integrate(p, build_scenario(config))
        report = summarize(trace, p, speed_tol=speed_tol)
    except (ConfigError, ParameterError, ValueError, IntegrationError,
            TraceTooShortError, SteadyStateNotReachedError) as exc:
        return [""] * len(spec.fields), f"failed: {exc}"
    return [repr(getattr(report, name)) for name in spec.fields], "ok"


def _cmd_sweep(args) -> int:
    spec = _parse_sweep_spec(args)
    directory = _out_dir(spec.base)
    out_path = directory / f"{spec.base.output.prefix}_sweep.csv"
    with open(out_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow([spec.axis, *spec.fields, "status"])
        for value in spec.values:
            cells, status = _sweep_row(spec, value, args.speed_tol)
            writer.writerow([repr(value), *cells, status])
    print(out_path)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_sweep(args)
    except (ConfigError, ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IntegrationError as exc:
        print(f"numerical failure at t = {exc.time:.9g} s: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
