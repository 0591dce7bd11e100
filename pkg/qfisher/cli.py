"""
Command-line interface for qfisher.

Usage:
    qfisher fisher --state gaussian:1 --grid -8:8:1025
    qfisher kl-scan --state cosine_window:4 --format csv
    qfisher uncertainty --state double_gaussian:4:0.5 --hbar 2
    qfisher gaussian-min --amplitudes=-0.2,-0.1,0,0.1,0.2
    qfisher cr-sim --estimator median --n 101 --trials 10000 --seed 42
    qfisher --self-check

Exit codes: 0 success, 1 numerical validation failure, 2 usage or
configuration error.
"""

import functools
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

import click
from dotenv import load_dotenv
from pydantic import ValidationError

from . import __version__
from .config import (
    ENV_DEFAULT_GRID,
    GridConfig,
    OutputConfig,
    RunConfig,
    StateConfig,
    describe_validation_error,
)
from .core.base import DEFAULT_HBAR, InputValidationError, QFisherError
from .core.cramer_rao import LocationFamily, parse_estimator, run_experiment
from .core.divergence import fit_curvature, kl_quadratic_scan
from .core.fisher import fisher_amplitude, fisher_location, momentum_identity_check
from .core.moments import gaussian_minimality_probe, minimum_at_zero, score_linearity, uncertainty_report
from .core.quantum_state import WavefunctionGrid, corpus, density_of
from .output import CSVWriter, Report, get_writer
from .selfcheck import run_self_check

logger = logging.getLogger(__name__)

EXIT_NUMERICAL = 1
EXIT_USAGE = 2

DEFAULT_AMPLITUDES = "-0.2,-0.1,0,0.1,0.2"


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger("qfisher").setLevel(level.upper())


def _parse_list(text: str, label: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise click.BadParameter(f"{label} must be comma-separated numbers, got {text!r}")


def common_options(f: Callable) -> Callable:
    """Options shared by every computation subcommand."""
    options = [
        click.option(
            "--grid",
            "grid_text",
            envvar=ENV_DEFAULT_GRID,
            default=None,
            metavar="MIN:MAX:N",
            help=f"Grid; falls back to ${ENV_DEFAULT_GRID}, then to the state's natural grid.",
        ),
        click.option("--hbar", type=float, default=DEFAULT_HBAR, show_default=True, help="Reduced Planck constant."),
        click.option(
            "--state",
            "state_text",
            default="gaussian:1",
            show_default=True,
            metavar="NAME:P1[:P2]",
            help="Corpus state: gaussian, double_gaussian, cosine_window or sech.",
        ),
        click.option(
            "--format",
            "output_format",
            type=click.Choice(["csv", "json"], case_sensitive=False),
            default="json",
            show_default=True,
        ),
        click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None, help="Output file."),
        click.option("--seed", type=int, default=0, show_default=True, help="Root seed."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def build_config(
    ctx: click.Context,
    grid_text: Optional[str],
    hbar: float,
    state_text: str,
    output_format: str,
    out_path: Optional[str],
    seed: int,
) -> RunConfig:
    """
    Validate command-line options into a RunConfig.

    Raises:
        click.UsageError: Naming the offending field, for any invalid option.
    """
    log_level = (ctx.obj or {}).get("log_level", "INFO")
    try:
        grid = GridConfig.parse(grid_text) if grid_text else None
    except ValueError as e:
        raise click.BadParameter(_reason(e), ctx=ctx, param_hint="'--grid'")
    try:
        state = StateConfig.parse(state_text)
    except ValueError as e:
        raise click.BadParameter(_reason(e), ctx=ctx, param_hint="'--state'")
    try:
        config = RunConfig(
            grid=grid,
            hbar=hbar,
            state=state,
            output=OutputConfig(format=output_format.lower(), path=out_path),
            seed=seed,
            log_level=log_level,
        )
        config.resolved_grid()
    except ValueError as e:
        raise click.UsageError(f"invalid configuration: {_reason(e)}", ctx=ctx)
    return config


def _reason(error: ValueError) -> str:
    if isinstance(error, ValidationError):
        return describe_validation_error(error)
    return str(error)


def _build_state(config: RunConfig) -> WavefunctionGrid:
    state = config.state
    return corpus(state.name, config.resolved_grid(), state.params)


def guarded(f: Callable[..., int]) -> Callable[..., None]:
    """Map qfisher errors onto the exit-code contract."""

    @functools.wraps(f)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        ctx = click.get_current_context()
        try:
            code = f(*args, **kwargs)
        except InputValidationError as e:
            raise click.UsageError(str(e), ctx=ctx)
        except QFisherError as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(EXIT_NUMERICAL)
        ctx.exit(code)

    return wrapper


def emit(config: RunConfig, report: Report) -> None:
    """Write a report to ``--out`` or standard output."""
    writer = get_writer(config.output.format)
    text = writer.write(report, config.output.path, config.output.lock_timeout)
    if config.output.path is None:
        click.echo(text, nl=False)
    else:
        logger.info(f"Wrote {config.output.format} report to {config.output.path}")


def _key_value_rows(values: Dict[str, Any]) -> List[Dict[str, Any]]:
    return [{"quantity": key, "value": value} for key, value in values.items()]


@click.group(invoke_without_command=True)
@click.version_option(version=__version__, prog_name="qfisher")
@click.option("--self-check", "self_check", is_flag=True, help="Run the invariant suite and exit.")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="INFO",
    show_default=True,
)
@click.pass_context
def cli(ctx: click.Context, self_check: bool, log_level: str) -> None:
    """Fisher information, Kerridge inaccuracy and uncertainty products for 1-D states."""
    load_dotenv()
    _configure_logging(log_level)
    ctx.ensure_object(dict)
    ctx.obj["log_level"] = log_level.upper()
    if self_check:
        results = run_self_check()
        report = Report(
            command="self-check",
            result={"checks": [r.model_dump() for r in results]},
            columns=["name", "passed", "detail"],
            rows=[r.model_dump() for r in results],
        )
        click.echo(get_writer("json").render(report), nl=False)
        ctx.exit(0 if all(r.passed for r in results) else EXIT_NUMERICAL)
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@cli.command("fisher")
@common_options
@guarded
def cmd_fisher(**options: Any) -> int:
    """Fisher information by the log-derivative and amplitude routes."""
    config = build_config(click.get_current_context(), **options)
    psi = _build_state(config)
    location = fisher_location(density_of(psi))
    amplitude = fisher_amplitude(psi)
    identity = momentum_identity_check(psi, config.hbar)
    report = Report(
        command="fisher",
        parameters=config.parameters(),
        result={
            "location": location.model_dump(mode="json"),
            "amplitude": amplitude.model_dump(mode="json"),
            "momentum_identity": identity.model_dump(mode="json"),
        },
        columns=["quantity", "value"],
        rows=_key_value_rows(
            {
                "fisher_log_derivative": location.value,
                "fisher_amplitude_derivative": amplitude.value,
                "excluded_mass": location.excluded_mass,
                "identity_lhs": identity.lhs,
                "identity_rhs": identity.rhs,
                "identity_relative_gap": identity.relative_gap,
            }
        ),
    )
    emit(config, report)
    return 0


@cli.command("kl-scan")
@common_options
@click.option("--deltas", default=None, help="Comma-separated lattice shifts; default +-1,2,4,8,16 spacings.")
@guarded
def cmd_kl_scan(deltas: Optional[str], **options: Any) -> int:
    """Kerridge inaccuracy against its quadratic Fisher approximation."""
    config = build_config(click.get_current_context(), **options)
    shifts = _parse_list(deltas, "--deltas") if deltas else None
    scan = kl_quadratic_scan(density_of(_build_state(config)), shifts)
    nonzero = sum(1 for d in scan.shifts if d != 0.0)
    curvature = fit_curvature(scan) if nonzero >= 4 else None
    result = scan.model_dump(mode="json")
    result["curvature"] = curvature
    report = Report(
        command="kl-scan",
        parameters=config.parameters(),
        result=result,
        columns=["delta", "kl", "quadratic", "residual"],
        rows=scan.rows(),
    )
    emit(config, report)
    return 0


@cli.command("uncertainty")
@common_options
@guarded
def cmd_uncertainty(**options: Any) -> int:
    """Position/momentum spreads and the Heisenberg product."""
    config = build_config(click.get_current_context(), **options)
    psi = _build_state(config)
    report_data = uncertainty_report(psi, config.hbar)
    linearity = score_linearity(psi)
    summary = report_data.model_dump(mode="json")
    summary.update(
        heisenberg_satisfied=report_data.heisenberg_satisfied,
        saturates_bound=report_data.saturates_bound,
        cramer_rao_ratio=report_data.cramer_rao_ratio,
    )
    result = dict(summary, score_linearity=linearity.model_dump(mode="json"))
    summary.update(score_alpha=linearity.alpha, score_residual_fraction=linearity.residual_fraction)
    report = Report(
        command="uncertainty",
        parameters=config.parameters(),
        result=result,
        columns=["quantity", "value"],
        rows=_key_value_rows(summary),
    )
    emit(config, report)
    return 0 if report_data.heisenberg_satisfied else EXIT_NUMERICAL


@cli.command("gaussian-min")
@common_options
@click.option("--amplitudes", default=DEFAULT_AMPLITUDES, show_default=True, help="Comma-separated perturbation amplitudes.")
@guarded
def cmd_gaussian_min(amplitudes: str, **options: Any) -> int:
    """Uncertainty products of perturbed Gaussians; the minimum must sit at 0."""
    ctx = click.get_current_context()
    config = build_config(ctx, **options)
    if config.state.name != "gaussian":
        raise click.UsageError("gaussian-min requires --state gaussian:DX", ctx=ctx)
    delta_x = config.state.resolved_params[0]
    points = gaussian_minimality_probe(
        delta_x, _parse_list(amplitudes, "--amplitudes"), config.hbar, config.resolved_grid()
    )
    at_minimum = minimum_at_zero(points)
    report = Report(
        command="gaussian-min",
        parameters=config.parameters(),
        result={
            "delta_x": delta_x,
            "points": [pt.model_dump() for pt in points],
            "minimum_at_zero": at_minimum,
        },
        columns=["amplitude", "product", "error"],
        rows=[pt.model_dump() for pt in points],
    )
    emit(config, report)
    return 0 if at_minimum else EXIT_NUMERICAL


@cli.command("cr-sim")
@common_options
@click.option("--estimator", default="mean", show_default=True, help="mean, median or shrunk:C.")
@click.option("--n", "n", type=int, default=100, show_default=True, help="Observations per trial.")
@click.option("--trials", type=int, default=10_000, show_default=True, help="Monte Carlo trials (>= 1000).")
@click.option("--theta", type=float, default=0.0, show_default=True, help="True location (lattice multiple).")
@click.option("--assume-unbiased", is_flag=True, help="Fix d<T>/dtheta = 1 instead of measuring it.")
@click.option("--trials-csv", type=click.Path(dir_okay=False), default=None, help="Dump per-trial estimates.")
@guarded
def cmd_cr_sim(
    estimator: str,
    n: int,
    trials: int,
    theta: float,
    assume_unbiased: bool,
    trials_csv: Optional[str],
    **options: Any,
) -> int:
    """Monte Carlo check of the Cramer-Rao bound for a location family."""
    config = build_config(click.get_current_context(), **options)
    spec = parse_estimator(estimator)
    family = LocationFamily(density_of(_build_state(config)), theta)
    result = run_experiment(
        spec,
        family,
        n=n,
        trials=trials,
        seed=config.seed,
        assume_unbiased=assume_unbiased,
        keep_estimates=trials_csv is not None,
    )
    if trials_csv is not None:
        dump = Report(
            command="cr-sim-trials",
            columns=["trial", "estimate"],
            rows=[{"trial": i, "estimate": e} for i, e in enumerate(result.estimates or [])],
        )
        CSVWriter().write(dump, trials_csv, config.output.lock_timeout)
    summary = result.model_dump(mode="json")
    summary["efficiency"] = result.efficiency
    report = Report(
        command="cr-sim",
        parameters=dict(config.parameters(), estimator=spec.label, n=n, trials=trials, theta=theta),
        result=summary,
        columns=["quantity", "value"],
        rows=_key_value_rows(summary),
    )
    emit(config, report)
    return 0 if result.bound_satisfied else EXIT_NUMERICAL


def main() -> None:
    """Console-script entry point."""
    cli(obj={})


if __name__ == "__main__":
    main()
