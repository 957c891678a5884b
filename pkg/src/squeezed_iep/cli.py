"""Command-line entry point: ``squeezed-iep run|validate|compare-dephasing-modes``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import dephasing, runner, validation
from .config import RunConfig, build_config, load_config_file, parse_assignment
from .errors import ConfigError, NumericalFailure

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("assignments", nargs="*", metavar="KEY=VALUE", help="configuration overrides")
    p.add_argument("--channel", choices=("dissipation", "dephasing"))
    p.add_argument("--config", metavar="PATH", help="flat 'key = value' file; '#' starts a comment")
    p.add_argument("--set", dest="sets", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--jobs", type=int, metavar="N", help="worker processes (default: all cores)")
    p.add_argument("--output", metavar="PATH", help="output directory, or '-' for stdout (default)")
    p.add_argument("--format", choices=("csv", "json"), help="what to print when writing to stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="squeezed-iep",
        description="Irreversible entropy production and its geometric bounds for a qubit in a squeezed thermal bath.",
    )
    parser.add_argument("--validate", action="store_true", help="run the validation suite (same as 'validate')")
    sub = parser.add_subparsers(dest="command")
    _add_run_args(sub.add_parser("run", help="evolve, bound and report one point or a sweep"))
    _add_run_args(
        sub.add_parser("compare-dephasing-modes", help="closed-form vs quadrature decoherence factor")
    )
    val = sub.add_parser("validate", help="run acceptance and oracle checks, print a pass/fail table")
    val.add_argument("--output", metavar="DIR", help="also write the reference CSV/JSON artifacts here")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file < ``--set``/positional assignments < dedicated flags."""
    raw: dict[str, str] = {}
    if args.config:
        raw.update(load_config_file(args.config))
    for item in [*args.sets, *args.assignments]:
        k, v = parse_assignment(item)
        raw[k] = v
    for key in ("channel", "jobs", "output", "format"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = str(val)
    return build_config(raw)


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _check_t_max(config: RunConfig) -> None:
    if config.t_max is None:
        return
    rho0 = runner.initial_state(config)
    for point in runner.sweep_grid(config):
        params = runner.make_params(config.channel, point)
        needed = runner.auto_t_max(config.channel, params, rho0)
        if config.t_max < needed:
            _warn(
                f"t_max={config.t_max:g} is shorter than {runner.RELAXATION_TIMES:g} relaxation times "
                f"({needed:.4g}) at {runner.describe_point(point)}; equilibrium times may be missing"
            )
            return


def cmd_run(config: RunConfig) -> int:
    _check_t_max(config)
    results = runner.compute_all(config)
    written = runner.emit(config, results)
    if written:
        print(f"wrote {len(written)} files to {config.output}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(config: RunConfig) -> int:
    if config.channel != "dephasing":
        raise ConfigError("channel", "compare-dephasing-modes needs channel=dephasing")
    if config.sweep:
        raise ConfigError("sweep", "not supported by compare-dephasing-modes")
    params = runner.make_params("dephasing", config.params)
    t_max = config.t_max if config.t_max is not None else runner.RELAXATION_TIMES / dephasing.decay_rate(params)
    try:
        text = runner.compare_modes_csv(params, runner.time_grid(t_max, config.n_samples))
    except NumericalFailure as exc:
        desc = runner.describe_point(runner.resolved_params("dephasing", params))
        raise NumericalFailure(f"{desc}: {exc}") from None
    if config.output == "-":
        sys.stdout.write(text)
    else:
        path = Path(config.output)
        if path.is_dir():
            path = path / "dephasing_modes.csv"
        runner.write_text(path, text)
    return EXIT_OK


def _use_color() -> bool:
    return "NO_COLOR" not in os.environ and sys.stdout.isatty()


def cmd_validate(output: str | None) -> int:
    color = _use_color()
    marks = {"pass": "\033[32mpass\033[0m", "FAIL": "\033[31mFAIL\033[0m", "info": "\033[36minfo\033[0m"}

    def show(res: validation.CheckResult) -> None:
        status = marks[res.status] if color else res.status
        print(f"[{status}] {res.name}: {res.detail}", flush=True)

    results = validation.run_all(show)
    if output:
        written = validation.write_reference_artifacts(output)
        print(f"wrote {len(written)} reference artifacts to {output}")
    failed = [r for r in results if r.passed is False]
    graded = [r for r in results if r.passed is not None]
    print(f"{len(graded) - len(failed)}/{len(graded)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command or ("validate" if args.validate else None)
    if command is None:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG
    try:
        if command == "validate":
            return cmd_validate(getattr(args, "output", None))
        config = resolve_config(args)
        if command == "run":
            return cmd_run(config)
        return cmd_compare(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
