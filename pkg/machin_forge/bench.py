"""
Series benchmark: wall-clock cost of π digits per (series, k) cell.

Cells run one after another. mpmath precision is guarded by a process-wide lock,
so parallel cells would only queue on it.
"""

from __future__ import annotations

import csv
import hashlib
import io
import re
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from machin_forge.errors import MachinError
from machin_forge.log import get_logger
from machin_forge.machin import build_two_term_formula, compute_pi
from machin_forge.models import BenchCell, TwoTermFormula
from machin_forge.numerics import SeriesKind

logger = get_logger("bench")

CSV_HEADER = ("series", "k", "digits", "millis")

_RANGE_RE = re.compile(r"^\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?$")


def parse_k_range(text: str) -> range:
    """``"a..b"`` (inclusive) or a single ``"a"``."""
    match = _RANGE_RE.match(text or "")
    if not match:
        raise ValueError(f"Malformed k range '{text}'. Expected a..b")
    low = int(match.group(1))
    high = int(match.group(2) or low)
    if low < 2:
        raise ValueError(f"k range must start at 2 or above, got {low}")
    if high < low:
        raise ValueError(f"Empty k range '{text}'")
    return range(low, high + 1)


def resolve_series(names: Union[str, Iterable[str]]) -> list[SeriesKind]:
    """``"all"`` or a comma-separated / iterable list of series names."""
    if isinstance(names, str):
        names = [n for n in names.split(",") if n.strip()]
    names = [n.strip().lower() for n in names]
    if "all" in names:
        return list(SeriesKind)
    try:
        return [SeriesKind(n) for n in names]
    except ValueError as e:
        raise ValueError(f"{e}. Available: all, {', '.join(s.value for s in SeriesKind)}") from e


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class BenchReport:
    digits: int
    cells: list[BenchCell] = field(default_factory=list)

    @property
    def ks(self) -> list[int]:
        return sorted({c.k for c in self.cells})

    def agreement(self) -> dict[int, bool]:
        """Per k: every series succeeded and produced the same digits."""
        result = {}
        for k in self.ks:
            row = [c for c in self.cells if c.k == k]
            result[k] = all(c.ok for c in row) and len({c.digest for c in row}) == 1
        return result

    @property
    def all_agree(self) -> bool:
        return all(self.agreement().values())

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for c in self.cells:
            millis = "" if c.millis is None else f"{c.millis:.3f}"
            writer.writerow([c.series.value, c.k, c.digits, millis])
        return buffer.getvalue()


def run_cell(formula: TwoTermFormula, series: SeriesKind, digits: int) -> BenchCell:
    """Time one ``compute_pi`` call; failures are recorded, never raised."""
    start = time.perf_counter()
    try:
        text = compute_pi(formula, digits, series)
    except MachinError as e:
        logger.warning("bench cell %s k=%d failed: %s", series.value, formula.k, e)
        return BenchCell(series=series, k=formula.k, digits=digits, error=str(e))
    millis = (time.perf_counter() - start) * 1000
    logger.debug("bench cell %s k=%d: %.1f ms", series.value, formula.k, millis)
    return BenchCell(
        series=series, k=formula.k, digits=digits, millis=millis, digest=_digest(text)
    )


def run_bench(
    series_list: Iterable[SeriesKind],
    k_range: Iterable[int],
    digits: int,
    formulas: Optional[dict[int, TwoTermFormula]] = None,
) -> BenchReport:
    """Evaluate every (series, k) cell; formula construction is not timed."""
    series_list = [SeriesKind(s) for s in series_list]
    report = BenchReport(digits=digits)
    formulas = dict(formulas or {})
    for k in k_range:
        try:
            formula = formulas.get(k) or build_two_term_formula(k)
        except MachinError as e:
            report.cells.extend(
                BenchCell(series=s, k=k, digits=digits, error=str(e)) for s in series_list
            )
            continue
        for series in series_list:
            report.cells.append(run_cell(formula, series, digits))
    return report
