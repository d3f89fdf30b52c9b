"""
Rich display components for machin-forge.

Tables and panels go through rich. Digit strings and JSON are echoed by the CLI
directly so they are never wrapped.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from machin_forge.models import LehmerReport, QuadRow, U1Row
from machin_forge.numerics import HPReal

if TYPE_CHECKING:
    from machin_forge.bench import BenchReport
    from machin_forge.core import MachinConfig


# Global console instances
console = Console()
err_console = Console(stderr=True)


# =============================================================================
# Tables
# =============================================================================

def _table(title: str) -> Table:
    return Table(
        title=f"[bold]{title}[/bold]",
        title_style="bold cyan",
        show_header=True,
        header_style="bold",
        border_style="cyan",
    )


def print_u1_table(rows: Sequence[U1Row]):
    """k, surd-free u₁, nested-radical u₁ and the verdict."""
    table = _table("u₁: doubling recurrence vs nested radicals")
    table.add_column("k", justify="right", style="dim")
    table.add_column("recurrence", justify="right")
    table.add_column("radicals", justify="right")
    table.add_column("", width=8)

    for row in rows:
        verdict = {True: "[green]MATCH[/green]", False: "[red]MISMATCH[/red]"}.get(row.match, "")
        table.add_row(
            str(row.k),
            "" if row.iterative is None else str(row.iterative),
            "" if row.radical is None else str(row.radical),
            verdict,
        )
    console.print(table)


def print_fixed_point_trace(k: int, iterates: Sequence[HPReal]):
    """Iterates of the fixed-point map, three decimals plus a longer rendering."""
    table = _table(f"Fixed-point iterates, k = {k}")
    table.add_column("#", justify="right", style="dim")
    table.add_column("u", justify="right")
    table.add_column("u (20 digits)", justify="right", style="dim")
    for i, value in enumerate(iterates, 1):
        table.add_row(str(i), f"{float(value):.3f}", value.nstr(20))
    console.print(table)


def print_quad_table(rows: Sequence[QuadRow]):
    """Iteration, precision, correct digits and the 25-digit π estimate."""
    table = _table("Quadratic iteration")
    table.add_column("Iteration", justify="right", style="dim")
    table.add_column("Precision", justify="right", style="dim")
    table.add_column("Correct digits", justify="right")
    table.add_column("π estimate")
    for row in rows:
        table.add_row(str(row.n), str(row.precision), str(row.digits), row.iterate)
    console.print(table)


def print_bench_table(report: "BenchReport"):
    """Milliseconds per (series, k); failed cells show their error."""
    series = sorted({c.series for c in report.cells}, key=lambda s: s.value)
    table = _table(f"π to {report.digits} digits (ms)")
    table.add_column("k", justify="right", style="dim")
    for s in series:
        table.add_column(s.value, justify="right")
    table.add_column("agree", width=6)

    agreement = report.agreement()
    for k in report.ks:
        cells = {c.series: c for c in report.cells if c.k == k}
        values = []
        for s in series:
            cell = cells.get(s)
            if cell is None:
                values.append("")
            elif cell.ok:
                values.append(f"{cell.millis:.1f}")
            else:
                values.append(f"[red]{cell.error[:30]}[/red]")
        values.append("[green]yes[/green]" if agreement[k] else "[red]no[/red]")
        table.add_row(str(k), *values)
    console.print(table)


def print_lehmer_report(report: LehmerReport):
    """Lehmer's measure with the slowest term's digits per Euler term."""
    table = Table(show_header=False, box=None)
    table.add_column("Key", style="dim")
    table.add_column("Value")
    table.add_row("μ", report.mu + (" (estimated)" if report.estimated else ""))
    table.add_row("terms", str(report.terms))
    if report.digits_per_term is not None:
        table.add_row("digits/term", f"{report.digits_per_term:.3f}")
    console.print(Panel(table, title="[bold]Lehmer's measure[/bold]", border_style="dim"))


def display_config(config: "MachinConfig"):
    """Show the effective configuration."""
    table = _table("Configuration")
    table.add_column("Setting", style="dim")
    table.add_column("Value")
    for name, value in config.model_dump().items():
        shown = getattr(value, "value", value)
        table.add_row(name, "" if shown is None else str(shown))
    console.print(table)


# =============================================================================
# Error Display
# =============================================================================

def print_error(error: str, title: str = "Error"):
    """Print an error message."""
    err_console.print(Panel(
        f"[red]{error}[/red]",
        title=f"[bold red]{title}[/bold red]",
        border_style="red",
    ))


def print_warning(message: str):
    """Print a warning message."""
    err_console.print(f"[yellow]⚠️  {message}[/yellow]")
