"""
Terminal UI components for machin-forge.
"""

from machin_forge.tui.display import (
    console,
    err_console,
    print_error,
    print_warning,
    print_u1_table,
    print_fixed_point_trace,
    print_quad_table,
    print_bench_table,
    print_lehmer_report,
    display_config,
)

__all__ = [
    "console",
    "err_console",
    "print_error",
    "print_warning",
    "print_u1_table",
    "print_fixed_point_trace",
    "print_quad_table",
    "print_bench_table",
    "print_lehmer_report",
    "display_config",
]
