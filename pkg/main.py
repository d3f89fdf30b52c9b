#!/usr/bin/env python3
"""
machin-forge
============

Two-term Machin-like formulas for π, built without surds.

Usage:
    machin u1 --k 27
    machin formula --k 6 --out k6.json
    machin verify --builtin kanada1
    machin pi --digits 100 --k 6
    machin lehmer --k 27 --estimate
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path
from typing import Any, Optional

import click
from click.core import ParameterSource

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent))

from machin_forge import __version__
from machin_forge.bench import parse_k_range, resolve_series, run_bench
from machin_forge.core import PRECISION_PRESETS, MachinConfig, build_config
from machin_forge.errors import (
    ConsistencyError,
    DivergenceError,
    DomainError,
    FloorAmbiguityError,
    FormulaFormatError,
    MachinError,
    PrecisionExhaustedError,
)
from machin_forge.log import configure_logging
from machin_forge.machin import (
    BUILTIN_FORMULAS,
    build_two_term_formula,
    compute_pi,
    digits_per_term,
    digits_per_term_two_term,
    get_builtin,
    lehmer_estimate_two_term,
    lehmer_measure,
    verify_formula,
)
from machin_forge.models import (
    ExitCode,
    LehmerReport,
    OutputFormat,
    TwoTermFormula,
    U1Method,
    U1Row,
)
from machin_forge.numerics import SeriesKind, as_rational
from machin_forge.quadratic import quad_pi_digits
from machin_forge.radicals import compare_u1, u1_radical
from machin_forge.solver import (
    FixedPointVariant,
    fixed_point_trace,
    fixed_point_u1,
    safe_floor,
    u1_chain,
)
from machin_forge.storage import formula_document, load_formula, save_formula
from machin_forge.tui import (
    display_config,
    err_console,
    print_bench_table,
    print_error,
    print_fixed_point_trace,
    print_lehmer_report,
    print_quad_table,
    print_u1_table,
    print_warning,
)


# =============================================================================
# Error handling
# =============================================================================

PRECISION_ERRORS = (
    PrecisionExhaustedError,
    FloorAmbiguityError,
    DivergenceError,
    ConsistencyError,
)


def exit_code_for(error: BaseException) -> ExitCode:
    """Map an exception onto the CLI exit-code contract."""
    if isinstance(error, PRECISION_ERRORS):
        return ExitCode.PRECISION
    if isinstance(error, (DomainError, FormulaFormatError, ValueError)):
        return ExitCode.USAGE
    return ExitCode.INVALID


def guarded(fn):
    """Render library errors as panels and exit with the mapped code."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except KeyboardInterrupt:
            print_warning("Interrupted by user")
            sys.exit(ExitCode.INTERRUPTED)
        except (MachinError, ValueError) as e:
            print_error(str(e), title=type(e).__name__)
            sys.exit(exit_code_for(e))

    return wrapper


# =============================================================================
# Helpers
# =============================================================================

def _config(ctx: click.Context) -> MachinConfig:
    return ctx.obj["config"]


def _json_mode(config: MachinConfig) -> bool:
    return config.output_format is OutputFormat.JSON


def emit_json(payload: Any) -> None:
    click.echo(json.dumps(payload, separators=(",", ":")))


def _formula_source(
    formula_path: Optional[Path], builtin: Optional[str], k: Optional[int], config: MachinConfig
):
    """Exactly one of --formula, --builtin, --k picks the formula."""
    if sum(v is not None for v in (formula_path, builtin, k)) != 1:
        raise click.UsageError("Give exactly one of --formula, --builtin or --k")
    if formula_path:
        return load_formula(formula_path)
    if builtin:
        return get_builtin(builtin)
    return build_two_term_formula(
        k, ctx=config.precision_context(), cap=config.u2_materialize_cap
    )


def _k_range(ctx, param, value):
    try:
        return parse_k_range(value)
    except ValueError as e:
        raise click.BadParameter(str(e))


# =============================================================================
# CLI Group
# =============================================================================

@click.group()
@click.version_option(version=__version__, prog_name="machin-forge")
@click.option(
    "--preset",
    type=click.Choice(list(PRECISION_PRESETS.keys())),
    default=None,
    help="Use a precision preset",
)
@click.option(
    "--config", "config_file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="YAML config file",
)
@click.option("--precision", "-p", type=int, default=None, help="Decimal digits")
@click.option("--guard", type=int, default=None, help="Guard digits")
@click.option(
    "--format", "output_format",
    type=click.Choice([f.value for f in OutputFormat]),
    default=None,
    help="Output format",
)
@click.option("--verbose", "-v", is_flag=True, default=False, help="Verbose output")
@click.option("--debug", "-d", is_flag=True, default=False, help="Debug mode")
@click.pass_context
def cli(ctx, preset, config_file, precision, guard, output_format, verbose, debug):
    """
    Two-term Machin-like formulas for π without surds.

    \b
    Examples:
        machin u1 --k 10 --method both
        machin formula --k 3
        machin pi --quad --k 7 --iters 5 --digits 19
        machin bench --series all --k-range 6..10 --digits 1000
    """
    ctx.ensure_object(dict)

    cli_args = {
        "precision_digits": precision,
        "guard_digits": guard,
        "output_format": output_format,
    }
    if verbose:
        cli_args["verbose"] = True
    if debug:
        cli_args["debug"] = True

    try:
        config = build_config(preset=preset, cli_args=cli_args, config_file=config_file)
    except Exception as e:
        print_error(f"Configuration error: {e}")
        sys.exit(ExitCode.USAGE)

    configure_logging(verbose=config.verbose, debug=config.debug)
    ctx.obj["config"] = config


# =============================================================================
# u1
# =============================================================================

@cli.command()
@click.option("--k", "k", type=int, required=True, help="Index k of the formula")
@click.option(
    "--method",
    type=click.Choice([m.value for m in U1Method]),
    default=U1Method.ITER.value,
    help="Doubling recurrence, nested radicals, or both",
)
@click.option("--table", is_flag=True, default=False, help="Full k = 2..K comparison")
@click.pass_context
@guarded
def u1(ctx, k: int, method: str, table: bool):
    """Compute the first constant u1 for index K."""
    config = _config(ctx)
    pctx = config.precision_context()
    method = U1Method(method)

    if table:
        rows = compare_u1(k, pctx)
        if _json_mode(config):
            emit_json([row.model_dump(mode="json") for row in rows])
        else:
            print_u1_table(rows)
        if not all(row.match for row in rows):
            sys.exit(ExitCode.INVALID)
        return

    if method is not U1Method.RADICAL and k < 2:
        raise click.BadParameter("the recurrence starts at k = 2", param_hint="--k")
    iterative = (
        u1_chain(k, pctx, config.max_floor_escalations)[-1]
        if method is not U1Method.RADICAL
        else None
    )
    radical = (
        u1_radical(k, pctx, config.max_floor_escalations) if method is not U1Method.ITER else None
    )
    row = U1Row(k=k, iterative=iterative, radical=radical)

    if _json_mode(config):
        emit_json(row.model_dump(mode="json"))
    elif method is U1Method.BOTH:
        click.echo(f"{iterative} {radical} {'MATCH' if row.match else 'MISMATCH'}")
    else:
        click.echo(str(iterative if method is U1Method.ITER else radical))

    if row.match is False:
        sys.exit(ExitCode.INVALID)


# =============================================================================
# formula
# =============================================================================

@cli.command()
@click.option("--k", "k", type=int, required=True, help="Index k of the formula")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--force", is_flag=True, default=False, help="Ignore the u2 size cap")
@click.option(
    "--method",
    type=click.Choice([U1Method.ITER.value, U1Method.RADICAL.value]),
    default=U1Method.ITER.value,
    help="How u1 is produced",
)
@click.pass_context
@guarded
def formula(ctx, k: int, out: Optional[Path], force: bool, method: str):
    """Build the two-term formula for index K as JSON."""
    config = _config(ctx)
    pctx = config.precision_context()
    u1_value = None
    if U1Method(method) is U1Method.RADICAL:
        u1_value = u1_radical(k, pctx, config.max_floor_escalations)
    result = build_two_term_formula(
        k, u1=u1_value, ctx=pctx, force=force, cap=config.u2_materialize_cap
    )

    out = out or config.out_path
    if out:
        path = save_formula(result, out, sidecar_threshold=config.sidecar_threshold_digits)
        err_console.print(f"[green]✓[/green] Wrote {path}")
    else:
        emit_json(formula_document(result))


# =============================================================================
# verify
# =============================================================================

@cli.command()
@click.option("--formula", "formula_path", type=click.Path(path_type=Path), default=None)
@click.option("--builtin", type=click.Choice(list(BUILTIN_FORMULAS)), default=None)
@click.option("--target", default="1", help="Target tan(angle) as p/q; 1 checks π/4")
@click.pass_context
@guarded
def verify(ctx, formula_path: Optional[Path], builtin: Optional[str], target: str):
    """Exactly verify a Machin-like formula."""
    config = _config(ctx)
    if bool(formula_path) == bool(builtin):
        raise click.UsageError("Give exactly one of --formula or --builtin")
    f = load_formula(formula_path) if formula_path else get_builtin(builtin)
    valid = verify_formula(f, as_rational(target))

    if _json_mode(config):
        emit_json({"valid": valid})
    else:
        click.echo("VALID" if valid else "INVALID")
    if not valid:
        sys.exit(ExitCode.INVALID)


# =============================================================================
# pi
# =============================================================================

@cli.command()
@click.option("--digits", type=int, default=None, help="Decimal places (default: precision)")
@click.option("--k", "k", type=int, default=None, help="Two-term formula index")
@click.option("--formula", "formula_path", type=click.Path(path_type=Path), default=None)
@click.option("--builtin", type=click.Choice(list(BUILTIN_FORMULAS)), default=None)
@click.option(
    "--series",
    type=click.Choice([s.value for s in SeriesKind]),
    default=SeriesKind.EULER.value,
    help="Arctangent series",
)
@click.option("--quad", is_flag=True, default=False, help="Use the quadratic iteration")
@click.option("--iters", type=int, default=None, help="Quadratic iterations")
@click.pass_context
@guarded
def pi(ctx, digits, k, formula_path, builtin, series, quad, iters):
    """Print π to DIGITS decimal places."""
    config = _config(ctx)
    digits = config.precision_digits if digits is None else digits
    if digits < 1:
        raise click.BadParameter("must be >= 1", param_hint="--digits")

    if quad:
        series_given = ctx.get_parameter_source("series") is not ParameterSource.DEFAULT
        if formula_path or builtin or series_given:
            raise click.UsageError("--quad takes --k and --iters only")
        text, rows = quad_pi_digits(7 if k is None else k, digits, iters)
        if _json_mode(config):
            emit_json({"pi": text, "iterations": [row.model_dump() for row in rows]})
        else:
            click.echo(text)
            print_quad_table(rows)
        return

    if iters is not None:
        raise click.UsageError("--iters needs --quad")

    f = _formula_source(formula_path, builtin, k, config)
    text = compute_pi(
        f,
        digits,
        SeriesKind(series),
        guard=config.guard_digits,
        max_escalations=config.max_floor_escalations,
    )
    if _json_mode(config):
        emit_json({"pi": text, "digits": digits, "series": series})
    else:
        click.echo(text)


# =============================================================================
# lehmer
# =============================================================================

@cli.command()
@click.option("--formula", "formula_path", type=click.Path(path_type=Path), default=None)
@click.option("--builtin", type=click.Choice(list(BUILTIN_FORMULAS)), default=None)
@click.option("--k", "k", type=int, default=None, help="Two-term formula index")
@click.option("--estimate", is_flag=True, default=False, help="Skip materializing u2")
@click.pass_context
@guarded
def lehmer(ctx, formula_path, builtin, k, estimate):
    """Lehmer's measure of a formula."""
    config = _config(ctx)
    pctx = config.precision_context()

    if estimate:
        if k is None or formula_path or builtin:
            raise click.UsageError("--estimate works with --k only")
        u1_value = u1_chain(k, pctx, config.max_floor_escalations)[-1]
        mu = lehmer_estimate_two_term(k, u1_value, pctx)
        report = LehmerReport(
            mu=f"{float(mu):.6f}",
            terms=2,
            digits_per_term=digits_per_term_two_term(k, u1_value),
            estimated=True,
        )
    else:
        f = _formula_source(formula_path, builtin, k, config)
        mu = lehmer_measure(f, pctx)
        terms = 2 if isinstance(f, TwoTermFormula) else len(f.terms)
        report = LehmerReport(
            mu=f"{float(mu):.6f}", terms=terms, digits_per_term=digits_per_term(f)
        )

    if _json_mode(config):
        emit_json(report.model_dump())
    elif config.verbose:
        print_lehmer_report(report)
    else:
        click.echo(report.mu)


# =============================================================================
# trace
# =============================================================================

@cli.command()
@click.option("--k", "k", type=int, required=True, help="Index k (>= 2)")
@click.option("--guess", type=float, default=None, help="Starting value")
@click.option("--iterations", "-n", type=int, default=5, help="Number of iterates")
@click.option(
    "--variant",
    type=click.Choice([v.value for v in FixedPointVariant]),
    default=FixedPointVariant.TANGENT.value,
)
@click.option(
    "--until-settled", "settle", is_flag=True, default=False,
    help="Iterate to the fixed point and floor it",
)
@click.pass_context
@guarded
def trace(ctx, k, guess, iterations, variant, settle):
    """List the fixed-point iterates converging to u1."""
    config = _config(ctx)
    pctx = config.precision_context()
    values = fixed_point_trace(k, guess, iterations, pctx, FixedPointVariant(variant))

    settled = None
    if settle:
        point = fixed_point_u1(
            k,
            guess,
            pctx,
            max_iterations=config.max_fixed_point_iterations,
            variant=FixedPointVariant(variant),
        )
        settled = (point, safe_floor(point))

    if _json_mode(config):
        iterates = [v.nstr(30) for v in values]
        if settled is None:
            emit_json(iterates)
        else:
            emit_json(
                {"iterates": iterates, "fixed_point": settled[0].nstr(30), "u1": settled[1]}
            )
        return

    print_fixed_point_trace(k, values)
    if settled is not None:
        click.echo(f"{settled[0].nstr(30)} -> u1 = {settled[1]}")


# =============================================================================
# bench
# =============================================================================

@cli.command()
@click.option("--series", default="all", help="all, or a comma-separated list")
@click.option("--k-range", "k_range", required=True, callback=_k_range, help="a..b")
@click.option("--digits", type=int, default=100)
@click.option("--csv", "as_csv", is_flag=True, default=False, help="CSV on stdout")
@click.pass_context
@guarded
def bench(ctx, series, k_range, digits, as_csv):
    """Time π digits for each series and k."""
    config = _config(ctx)
    report = run_bench(resolve_series(series), k_range, digits)

    if as_csv:
        click.echo(report.to_csv(), nl=False)
    elif _json_mode(config):
        emit_json(
            {
                "digits": digits,
                "cells": [c.model_dump(mode="json") for c in report.cells],
                "agree": report.all_agree,
            }
        )
    else:
        print_bench_table(report)


# =============================================================================
# config
# =============================================================================

@cli.command("config")
@click.pass_context
def config_cmd(ctx):
    """Show the effective configuration."""
    config = _config(ctx)
    if _json_mode(config):
        emit_json(config.model_dump(mode="json"))
    else:
        display_config(config)


# =============================================================================
# Entry Point
# =============================================================================

def main():
    """Main entry point."""
    cli(obj={})


if __name__ == "__main__":
    main()
