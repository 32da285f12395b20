"""Numeric table-cell parsing.

Accepted forms: plain decimals, scientific notation ("1.2e-3", "1.2 × 10^-3",
"1.2×10⁻³"), "a ± b", and ranges "a-b" / "a–b" / "a to b" (midpoint with
half-width uncertainty). Thousands separators are dropped; a decimal comma is
not accepted.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

_BASE = r"(?:\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+(?:\.\d*)?|\.\d+)"
_MAGNITUDE = rf"{_BASE}(?:[eE][+-]?\d+|\s*[×xX]\s*10\^?[+-]?\d+)?"
_SCALAR = rf"[+-]?{_MAGNITUDE}"

_PLAIN = re.compile(rf"(?P<a>{_SCALAR})")
_PLUS_MINUS = re.compile(rf"(?P<a>{_SCALAR})\s*(?:±|\+/-|\+-)\s*(?P<b>{_MAGNITUDE})")
_RANGE = re.compile(rf"(?P<a>{_SCALAR})\s*(?:[-–—]|\s+to\s+)\s*(?P<b>{_SCALAR})")
_TIMES_TEN = re.compile(r"\s*[×xX]\s*10\^?(?P<exp>[+-]?\d+)$")

_CELL_CHARS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹⁻⁺−", "0123456789-+-")


@dataclass(frozen=True, slots=True)
class ParsedValue:
    """One numeric cell reduced to a scalar."""

    value: float
    uncertainty: float | None
    raw: str


def parse_numeric_cell(cell: str) -> ParsedValue | None:
    """Parse a table cell; None when the cell holds no number ("—", "n.d.", "")."""
    text = cell.translate(_CELL_CHARS).strip()
    if not text:
        return None
    parsed = _parse(text, cell)
    if parsed is None and len(text) > 1 and text[-1].isalpha() and not text[-2].isspace():
        # single trailing footnote marker, e.g. "15.3a"
        parsed = _parse(text[:-1], cell)
    return parsed


def format_value(value: float) -> str:
    """Canonical text for a value; `parse_numeric_cell` reads it back exactly."""
    return repr(float(value))


def _parse(text: str, raw: str) -> ParsedValue | None:
    match = _PLAIN.fullmatch(text)
    if match is not None:
        return _build(_to_float(match["a"]), None, raw)

    match = _PLUS_MINUS.fullmatch(text)
    if match is not None:
        return _build(_to_float(match["a"]), _to_float(match["b"]), raw)

    match = _RANGE.fullmatch(text)
    if match is not None:
        low, high = _to_float(match["a"]), _to_float(match["b"])
        return _build((low + high) / 2.0, abs(high - low) / 2.0, raw)
    return None


def _build(value: float, uncertainty: float | None, raw: str) -> ParsedValue | None:
    if not math.isfinite(value) or (uncertainty is not None and not math.isfinite(uncertainty)):
        return None
    return ParsedValue(value=value, uncertainty=uncertainty, raw=raw)


def _to_float(token: str) -> float:
    token = token.strip()
    times = _TIMES_TEN.search(token)
    if times is not None:
        token = f"{token[: times.start()]}e{times['exp']}"
    return float(token.replace(",", ""))
