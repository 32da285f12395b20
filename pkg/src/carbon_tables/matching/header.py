"""Column header analysis: unit suffix extraction and species detection."""

from __future__ import annotations

import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import lru_cache

from carbon_tables.utils.text import ascii_subscripts, is_word_form

UNIT_LEXICON = frozenset(
    {
        "%",
        "%/h",
        "%/min",
        "atm",
        "bar",
        "barrer",
        "cm3/g",
        "cm³/g",
        "cp",
        "g",
        "g/cm3",
        "gj/t",
        "gpu",
        "h",
        "k",
        "kg/m3",
        "kj/mol",
        "kpa",
        "l/mol",
        "mg/g",
        "min",
        "ml/g",
        "mmol/g",
        "mmol/g/bar",
        "mol%",
        "mol/kg",
        "mol/m2/s",
        "mol/mol",
        "mpa",
        "mpa·s",
        "m2/g",
        "m²/g",
        "nm",
        "ppm",
        "s",
        "v/v",
        "vol%",
        "wt%",
        "°c",
        "µm",
        "μm",
    }
)

_TRAILING_GROUP = re.compile(r"\(([^()]*)\)\s*$")
_UNIT_LIKE = re.compile(r"[\w/·\-%°^.]+")
_BOUNDARY_BEFORE = r"(?<![0-9A-Za-z])"
_BOUNDARY_AFTER = r"(?![0-9A-Za-z])"


@dataclass(frozen=True, slots=True)
class HeaderAnalysis:
    """A column header split into text, unit and detected species."""

    raw_text: str
    stripped_text: str
    unit: str | None
    species_found: tuple[str, ...]


def extract_header_unit(header_text: str) -> tuple[str, str | None]:
    """Remove a trailing parenthesized unit, e.g. "CO2 (GPU)" -> ("CO2", "GPU").

    Only the last group is considered, and only when its content is in the
    unit lexicon or looks like a unit; otherwise the text is returned as is.
    """
    match = _TRAILING_GROUP.search(header_text)
    if match is None:
        return header_text, None
    content = match.group(1).strip()
    if not _is_unit(content):
        return header_text, None
    return header_text[: match.start()].rstrip(), content


def detect_species(header_text: str, dictionary: Mapping[str, Sequence[str]]) -> tuple[str, ...]:
    """Species whose surface forms occur in the header, in first-occurrence order.

    Formula forms ("CO2") match case-sensitively, word forms ("carbon dioxide")
    case-insensitively; a match needs non-alphanumeric characters on both sides.
    """
    if not dictionary:
        raise ValueError("species_dictionary_empty")
    text = ascii_subscripts(header_text)
    first_seen: dict[str, int] = {}
    for symbol, pattern in _compile_species_patterns(_freeze(dictionary)):
        match = pattern.search(text)
        if match is not None:
            first_seen[symbol] = match.start()
    return tuple(sorted(first_seen, key=lambda symbol: (first_seen[symbol], symbol)))


def remove_species(text: str, dictionary: Mapping[str, Sequence[str]]) -> str:
    """The text with every species surface form blanked out."""
    text = ascii_subscripts(text)
    for _, pattern in _compile_species_patterns(_freeze(dictionary)):
        text = pattern.sub(" ", text)
    return text


def analyze_header(header_text: str, dictionary: Mapping[str, Sequence[str]]) -> HeaderAnalysis:
    """Run unit extraction, then species detection on the stripped text."""
    stripped, unit = extract_header_unit(header_text)
    return HeaderAnalysis(
        raw_text=header_text,
        stripped_text=stripped,
        unit=unit,
        species_found=detect_species(stripped, dictionary),
    )


def _is_unit(content: str) -> bool:
    if not content:
        return False
    if content.casefold() in UNIT_LEXICON:
        return True
    if _UNIT_LIKE.fullmatch(content) is None or len(content) < 2:
        return False
    return "%" in content or any(ch.isalpha() for ch in content)


def _freeze(dictionary: Mapping[str, Sequence[str]]) -> tuple[tuple[str, tuple[str, ...]], ...]:
    return tuple(sorted((symbol, tuple(forms)) for symbol, forms in dictionary.items()))


@lru_cache(maxsize=32)
def _compile_species_patterns(
    frozen: tuple[tuple[str, tuple[str, ...]], ...],
) -> tuple[tuple[str, re.Pattern[str]], ...]:
    compiled: list[tuple[str, re.Pattern[str]]] = []
    for symbol, forms in frozen:
        formula_parts: list[str] = []
        word_parts: list[str] = []
        surface_forms = {ascii_subscripts(f).strip() for f in (symbol, *forms)}
        for form in sorted(surface_forms, key=len, reverse=True):
            if not form:
                continue
            escaped = r"\s+".join(re.escape(part) for part in form.split())
            (word_parts if is_word_form(form) else formula_parts).append(escaped)
        alternatives = list(formula_parts)
        if word_parts:
            alternatives.append(f"(?i:{'|'.join(word_parts)})")
        pattern = re.compile(f"{_BOUNDARY_BEFORE}(?:{'|'.join(alternatives)}){_BOUNDARY_AFTER}")
        compiled.append((symbol, pattern))
    return tuple(compiled)
