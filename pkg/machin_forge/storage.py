"""
Formula persistence.

Formulas are stored as JSON with every integer written as a decimal string. A
numerator, denominator or integer longer than the sidecar threshold goes to a
text file next to the JSON and is referenced as

    {"path": "formula.u2.num.txt", "sha256": "<hex>", "digits": 522185807}

Writes are atomic: content goes to a temp file that is then renamed over the
target.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import ValidationError

from machin_forge.errors import DomainError, FormulaFormatError
from machin_forge.log import get_logger
from machin_forge.models import MachinFormula, TwoTermFormula

logger = get_logger("storage")

DEFAULT_SIDECAR_THRESHOLD = 10**6
SIDECAR_KEYS = {"path", "sha256", "digits"}

Formula = Union[MachinFormula, TwoTermFormula]


def _compute_hash(content: str) -> str:
    return hashlib.sha256(content.encode()).hexdigest()


def _digit_count(text: str) -> int:
    return len(text.lstrip("-"))


def atomic_write(path: Path, content: str) -> None:
    """Write to ``<path>.tmp`` and rename it over ``path``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_path = path.with_name(path.name + ".tmp")
    temp_path.write_text(content)
    temp_path.replace(path)


# =============================================================================
# Save
# =============================================================================

def _externalize(node: Any, where: tuple[str, ...], target: Path, threshold: int) -> Any:
    if isinstance(node, dict):
        return {
            key: _externalize(value, where + (key,), target, threshold)
            for key, value in node.items()
        }
    if isinstance(node, list):
        return [
            _externalize(value, where + (str(i),), target, threshold)
            for i, value in enumerate(node)
        ]
    if isinstance(node, str) and _digit_count(node) > threshold:
        sidecar = target.with_name(f"{target.stem}.{'.'.join(where)}.txt")
        atomic_write(sidecar, node)
        logger.info("wrote %d-digit value to sidecar %s", _digit_count(node), sidecar.name)
        return {"path": sidecar.name, "sha256": _compute_hash(node), "digits": _digit_count(node)}
    return node


def formula_document(
    formula: Formula,
    sidecar_threshold: Optional[int] = None,
    target: Optional[Path] = None,
) -> dict:
    """The JSON document for ``formula``; sidecars are only written when ``target`` is given."""
    doc = formula.model_dump(mode="json")
    if target is None or sidecar_threshold is None:
        return doc
    return _externalize(doc, (), target, sidecar_threshold)


def save_formula(
    formula: Formula,
    path: Union[str, Path],
    sidecar_threshold: int = DEFAULT_SIDECAR_THRESHOLD,
) -> Path:
    """Write ``formula`` as JSON at ``path``, spilling huge integers into sidecars."""
    target = Path(path)
    doc = formula_document(formula, sidecar_threshold, target)
    atomic_write(target, json.dumps(doc, indent=2) + "\n")
    logger.debug("saved formula to %s", target)
    return target


# =============================================================================
# Load
# =============================================================================

def _internalize(node: Any, base_dir: Path) -> Any:
    if isinstance(node, dict):
        if set(node) == SIDECAR_KEYS:
            return _read_sidecar(node, base_dir)
        return {key: _internalize(value, base_dir) for key, value in node.items()}
    if isinstance(node, list):
        return [_internalize(value, base_dir) for value in node]
    return node


def _read_sidecar(ref: dict, base_dir: Path) -> str:
    sidecar = base_dir / str(ref["path"])
    try:
        text = sidecar.read_text().strip()
    except OSError as e:
        raise FormulaFormatError(f"Cannot read sidecar {sidecar}: {e}") from e
    if _compute_hash(text) != ref["sha256"]:
        raise FormulaFormatError(f"Digest mismatch for sidecar {sidecar}")
    if _digit_count(text) != ref["digits"]:
        raise FormulaFormatError(
            f"Sidecar {sidecar} holds {_digit_count(text)} digits, document says {ref['digits']}"
        )
    return text


def parse_formula(doc: Any, base_dir: Path = Path(".")) -> Formula:
    """Build a formula from a decoded document; the kind is detected from its keys."""
    if not isinstance(doc, dict):
        raise FormulaFormatError("Formula document must be a JSON object")
    doc = _internalize(doc, base_dir)
    try:
        if "terms" in doc:
            return MachinFormula.model_validate(doc)
        if {"k", "u1", "u2"} <= set(doc):
            return TwoTermFormula.model_validate(doc)
    except (ValidationError, DomainError) as e:
        raise FormulaFormatError(f"Malformed formula: {e}") from e
    raise FormulaFormatError("Formula document needs either 'terms' or 'k', 'u1', 'u2'")


def load_formula(path: Union[str, Path]) -> Formula:
    """Read a formula written by ``save_formula`` (or by hand)."""
    source = Path(path)
    try:
        doc = json.loads(source.read_text())
    except OSError as e:
        raise FormulaFormatError(f"Cannot read {source}: {e}") from e
    except json.JSONDecodeError as e:
        raise FormulaFormatError(f"{source} is not valid JSON: {e}") from e
    return parse_formula(doc, source.parent)
