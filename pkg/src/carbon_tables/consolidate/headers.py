"""Column header to figure-of-merit resolution.

Headers are routed on the number of species they mention: none goes through
exact name lookup, one through the species candidates with narrowing and a
first-by-catalog-position tie-break, two or more through the species-set
index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from carbon_tables.catalog.base import FomCatalog
from carbon_tables.catalog.models import FomDefinition
from carbon_tables.matching.header import HeaderAnalysis, analyze_header, remove_species
from carbon_tables.utils.text import normalize_name


@dataclass(frozen=True, slots=True)
class ColumnMatch:
    """Outcome of matching one header."""

    analysis: HeaderAnalysis
    fom: FomDefinition | None
    path: str
    candidates: tuple[str, ...] = ()

    @property
    def unit(self) -> str | None:
        return self.analysis.unit


class HeaderMatcher(Protocol):
    """Resolves a column header against a catalog."""

    def match(self, header_text: str, catalog: FomCatalog) -> ColumnMatch:
        """Return the match for `header_text`; `fom` is None when nothing fits."""


class DecisionTreeHeaderMatcher:
    """Default matcher following the species-count decision tree."""

    def match(self, header_text: str, catalog: FomCatalog) -> ColumnMatch:
        analysis = analyze_header(header_text, catalog.species_dictionary)
        species = analysis.species_found

        if not species:
            fom = catalog.fom_by_exact_name(analysis.stripped_text)
            return ColumnMatch(analysis, fom, "exact_name", (fom.fom_id,) if fom else ())

        if len(species) == 1:
            candidates = catalog.foms_containing_species(species[0])
            if not candidates:
                return ColumnMatch(analysis, None, "single_species")
            narrowed = _narrow(candidates, analysis, catalog)
            chosen = min(narrowed, key=lambda d: d.catalog_position)
            return ColumnMatch(
                analysis,
                chosen,
                "single_species",
                tuple(d.fom_id for d in narrowed),
            )

        fom = catalog.fom_by_species_set(species)
        return ColumnMatch(analysis, fom, "species_set", (fom.fom_id,) if fom else ())


def _narrow(
    candidates: list[FomDefinition],
    analysis: HeaderAnalysis,
    catalog: FomCatalog,
) -> list[FomDefinition]:
    """Keep name-matching candidates, then unit-matching ones.

    A step that would leave no candidate is skipped.
    """
    dictionary = catalog.species_dictionary
    header_key = normalize_name(analysis.stripped_text)
    residual_key = normalize_name(remove_species(analysis.stripped_text, dictionary))

    def names_match(definition: FomDefinition) -> bool:
        names = (definition.display_name, *definition.synonyms)
        if header_key in {normalize_name(name) for name in names}:
            return True
        if not residual_key:
            return False
        residuals = {normalize_name(remove_species(name, dictionary)) for name in names}
        return residual_key in residuals

    narrowed = [d for d in candidates if names_match(d)] or candidates

    if analysis.unit is not None:
        unit_key = analysis.unit.casefold()
        by_unit = [d for d in narrowed if d.canonical_unit.casefold() == unit_key]
        narrowed = by_unit or narrowed
    return narrowed
