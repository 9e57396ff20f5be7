# forchbound/cli/main.py
from typing import Callable, Dict, Optional

import click

from ..bounds.gas import COLUMNS as GAS_COLUMNS
from ..bounds.gas import GasTable
from ..config import get_settings
from ..core.log import configure_logging
from ..core.rich import (
    console,
    display_error,
    display_failure_message,
    display_key_values,
    display_outputs,
    display_rows,
    display_success_message,
)
from ..models.base import ForchboundError
from .runners.pipeline import (
    RunOutcome,
    run_bounds_command,
    run_calibrate,
    run_check_inequalities,
    run_gas_example,
    run_solve,
    run_verify,
)

config_argument = click.argument(
    "config", type=click.Path(exists=True, dir_okay=False)
)
out_option = click.option(
    "-o",
    "--out",
    "out_dir",
    type=click.Path(file_okay=False),
    default=None,
    help="Output directory (default: [output] directory of the config)",
)
sabotage_option = click.option(
    "--sabotage",
    is_flag=True,
    help="Divide the certified quantities by 1e10; the run must then fail",
)


def _guarded(ctx: click.Context, body: Callable[[], RunOutcome]) -> RunOutcome:
    """Run a command body; a ForchboundError becomes its exit code."""
    try:
        return body()
    except ForchboundError as e:
        display_error(e)
        if ctx.obj.get("verbose"):
            console.print_exception()
        ctx.exit(e.exit_code)


def _finish(ctx: click.Context, title: str, outcome: RunOutcome) -> None:
    display_key_values(title, outcome.summary)
    for note in outcome.notes:
        console.print(f"⚠️  {note}", style="yellow")
    display_outputs(outcome.outputs)
    if outcome.exit_code == 0:
        display_success_message(f"{title} complete")
    else:
        display_failure_message(f"{title} failed (exit {outcome.exit_code})")
    ctx.exit(outcome.exit_code)


@click.group()
@click.help_option("-h", "--help")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging and tracebacks")
@click.option("-q", "--quiet", is_flag=True, help="Warnings and errors only")
@click.pass_context
def cli(ctx: click.Context, verbose: bool, quiet: bool) -> None:
    """forchbound: Forchheimer gas flow with certified a-priori bounds."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    level = "DEBUG" if verbose else "WARNING" if quiet else get_settings().log_level
    configure_logging(level)


@cli.command()
@config_argument
@out_option
@click.pass_context
def solve(ctx: click.Context, config: str, out_dir: Optional[str]) -> None:
    """Run the finite-volume solver and its conservation diagnostics."""
    outcome = _guarded(ctx, lambda: run_solve(config, out_dir))
    _finish(ctx, "solve", outcome)


@cli.command()
@config_argument
@out_option
@click.option("--oracle", is_flag=True, help="Add the RK4 column to bounds.csv")
@click.option(
    "--cross-check",
    is_flag=True,
    help="Run the generic sequence bound on the Moser chain",
)
@click.pass_context
def bounds(
    ctx: click.Context,
    config: str,
    out_dir: Optional[str],
    oracle: bool,
    cross_check: bool,
) -> None:
    """Exponents, constants, the L^alpha curve and the L^infinity bound."""
    outcome = _guarded(
        ctx, lambda: run_bounds_command(config, out_dir, oracle, cross_check)
    )
    _finish(ctx, "bounds", outcome)


@cli.command()
@config_argument
@out_option
@sabotage_option
@click.pass_context
def verify(
    ctx: click.Context, config: str, out_dir: Optional[str], sabotage: bool
) -> None:
    """Solve up to the bound horizon and check every snapshot against the bounds."""
    outcome = _guarded(ctx, lambda: run_verify(config, out_dir, sabotage))
    _finish(ctx, "verify", outcome)


@cli.command("check-inequalities")
@config_argument
@out_option
@sabotage_option
@click.pass_context
def check_inequalities(
    ctx: click.Context, config: str, out_dir: Optional[str], sabotage: bool
) -> None:
    """Run the functional-inequality suite over the test-function family."""
    outcome = _guarded(ctx, lambda: run_check_inequalities(config, out_dir, sabotage))
    _finish(ctx, "check-inequalities", outcome)


@cli.command()
@config_argument
@out_option
@click.pass_context
def calibrate(ctx: click.Context, config: str, out_dir: Optional[str]) -> None:
    """Calibrate the embedding constants c1..c7 on the harness family."""
    outcome = _guarded(ctx, lambda: run_calibrate(config, out_dir))
    _finish(ctx, "calibrate", outcome)


@cli.command("gas-example")
@click.option("-n", "--dim", "n", type=int, default=3, show_default=True)
@click.option("--r1", type=float, default=None, help="Default: 2/3 (n=2), 0.8 (n=3)")
@click.option("--alpha0", type=float, default=40.0, show_default=True)
@click.option("--r", "r", type=float, default=1.0, show_default=True)
@click.option("--kappa-tilde", type=float, default=1.03, show_default=True)
@click.option("--alpha", type=float, default=None, help="Default: kappa_tilde alpha0")
@out_option
@click.pass_context
def gas_example(
    ctx: click.Context,
    n: int,
    r1: Optional[float],
    alpha0: float,
    r: float,
    kappa_tilde: float,
    alpha: Optional[float],
    out_dir: Optional[str],
) -> None:
    """Ideal-gas closed forms next to the generic exponent pipeline."""
    target = out_dir or str(get_settings().output_dir)
    holder: Dict[str, GasTable] = {}

    def body() -> RunOutcome:
        outcome, table = run_gas_example(n, target, r1, alpha0, r, kappa_tilde, alpha)
        holder["table"] = table
        return outcome

    outcome = _guarded(ctx, body)
    table = holder["table"]
    display_rows(
        f"ideal gas, n={table.n}, r1={table.r1:g}, alpha={table.alpha:g}",
        GAS_COLUMNS,
        [row.as_row() for row in table.rows],
        flag_column="flagged",
    )
    display_outputs(outcome.outputs)
    if outcome.exit_code == 0:
        display_success_message("closed forms agree with the generic pipeline")
    else:
        display_failure_message(f"{len(table.flagged)} rows disagree")
    ctx.exit(outcome.exit_code)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
