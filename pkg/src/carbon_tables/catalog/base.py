"""In-memory Materials Knowledge Base snapshot.

A `MaterialsBase` bundles the materials, the figure-of-merit catalog and the
reference table, plus the normalized indexes every lookup of the decision
tree runs against. Snapshots are immutable; reloading builds a new one.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Collection, Iterator, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations
from types import MappingProxyType
from typing import Protocol

from carbon_tables.catalog.errors import InvariantViolation, UnknownSpecies
from carbon_tables.catalog.models import COMMON, FomDefinition, MaterialRecord, ScalarMeasurement
from carbon_tables.utils.text import normalize_name, surface_key


class MaterialLookup(Protocol):
    """Resolution of a table cell to a material.

    Exact match after normalization is the default; fuzzy resolvers plug in here.
    """

    def lookup_material(self, name: str) -> MaterialRecord | None:
        """Return the material named by `name`, if any."""


class FomCatalog:
    """Ordered figure-of-merit definitions with their name and species indexes."""

    def __init__(
        self,
        definitions: Sequence[FomDefinition],
        species_dictionary: Mapping[str, Sequence[str]],
    ) -> None:
        ordered = sorted(definitions, key=lambda d: d.catalog_position)
        positions = [d.catalog_position for d in ordered]
        if positions != list(range(len(ordered))):
            raise InvariantViolation(
                f"catalog_positions_not_contiguous: expected 0..{len(ordered) - 1}, got {positions}"
            )
        id_counts = Counter(d.fom_id for d in ordered)
        duplicated_ids = [fom_id for fom_id, n in id_counts.items() if n > 1]
        if duplicated_ids:
            raise InvariantViolation(f"duplicate_fom_id: {', '.join(sorted(duplicated_ids))}")

        self._definitions: tuple[FomDefinition, ...] = tuple(ordered)
        self._by_id = MappingProxyType({d.fom_id: d for d in ordered})
        self._species_dictionary = MappingProxyType(
            {symbol: tuple(forms) for symbol, forms in species_dictionary.items()}
        )

        self._check_state_variables()
        self._check_species_dictionary()
        self._by_name = MappingProxyType(self._build_name_index())
        self._by_species_set = MappingProxyType(self._build_species_set_index())

    def __len__(self) -> int:
        return len(self._definitions)

    def __iter__(self) -> Iterator[FomDefinition]:
        return iter(self._definitions)

    def __contains__(self, fom_id: object) -> bool:
        return fom_id in self._by_id

    @property
    def definitions(self) -> tuple[FomDefinition, ...]:
        return self._definitions

    @property
    def species_dictionary(self) -> Mapping[str, tuple[str, ...]]:
        return self._species_dictionary

    @property
    def value_fields(self) -> tuple[FomDefinition, ...]:
        """Non-state-variable fields in catalog order (the feature-vector layout)."""
        return tuple(d for d in self._definitions if not d.is_state_variable)

    @property
    def state_fields(self) -> tuple[FomDefinition, ...]:
        return tuple(d for d in self._definitions if d.is_state_variable)

    def get(self, fom_id: str) -> FomDefinition | None:
        return self._by_id.get(fom_id)

    def group_counts(self) -> dict[str, int]:
        """Field count per catalog group (Common, Sorption, Hydrate, Membrane, ChemicalLooping)."""
        counts: dict[str, int] = {}
        for definition in self._definitions:
            counts[definition.group] = counts.get(definition.group, 0) + 1
        return counts

    def fom_by_exact_name(self, header_text: str) -> FomDefinition | None:
        """Return the FoM whose display name or synonym equals the normalized text."""
        key = normalize_name(header_text)
        if not key:
            return None
        return self._by_name.get(key)

    def foms_containing_species(self, species: str) -> list[FomDefinition]:
        """All definitions whose species set contains `species`, by catalog position."""
        if species not in self._species_dictionary:
            raise UnknownSpecies(species)
        return [d for d in self._definitions if species in d.species]

    def fom_by_species_set(self, species: Collection[str]) -> FomDefinition | None:
        """The unique FoM with exactly this multi-species set, if any."""
        key = frozenset(species)
        if len(key) < 2:
            raise ValueError(f"species_set_needs_two_or_more: {sorted(key)}")
        return self._by_species_set.get(key)

    def _check_state_variables(self) -> None:
        for definition in self._definitions:
            if definition.is_state_variable and definition.category != COMMON:
                raise InvariantViolation(
                    f"state_variable_not_common: {definition.fom_id} is {definition.category}"
                )

    def _check_species_dictionary(self) -> None:
        owner: dict[str, str] = {}
        for symbol, forms in self._species_dictionary.items():
            for form in (symbol, *forms):
                key = surface_key(form)
                if not key:
                    raise InvariantViolation(f"empty_surface_form: species {symbol}")
                previous = owner.setdefault(key, symbol)
                if previous != symbol:
                    raise InvariantViolation(
                        f"surface_form_collision: {form!r} maps to {previous} and {symbol}"
                    )
        for definition in self._definitions:
            unknown = [s for s in definition.species if s not in self._species_dictionary]
            if unknown:
                raise InvariantViolation(
                    f"fom_species_not_in_dictionary: {definition.fom_id} uses {', '.join(unknown)}"
                )

    def _build_name_index(self) -> dict[str, FomDefinition]:
        index: dict[str, FomDefinition] = {}
        for definition in self._definitions:
            for name in (definition.display_name, *definition.synonyms):
                key = normalize_name(name)
                previous = index.setdefault(key, definition)
                if previous.fom_id != definition.fom_id:
                    raise InvariantViolation(
                        f"fom_name_collision: {name!r} names {previous.fom_id} "
                        f"and {definition.fom_id}"
                    )
        return index

    def _build_species_set_index(self) -> dict[frozenset[str], FomDefinition]:
        multi = [d for d in self._definitions if len(d.species) >= 2]
        for first, second in combinations(multi, 2):
            if first.species_set == second.species_set:
                raise InvariantViolation(
                    "duplicate_multi_species_fom: "
                    f"{first.fom_id} and {second.fom_id} share {sorted(first.species_set)}"
                )
        return {d.species_set: d for d in multi}


@dataclass(frozen=True, slots=True)
class ReferenceTable:
    """Ground-truth materials with curated figure-of-merit values."""

    entries: tuple[MaterialRecord, ...]

    @property
    def entry_count(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> frozenset[str]:
        return frozenset(entry.canonical_name for entry in self.entries)


class MaterialsBase:
    """Immutable snapshot of materials, catalog and reference table."""

    def __init__(
        self,
        materials: Sequence[MaterialRecord],
        catalog: FomCatalog,
        *,
        declared_reference_count: int | None = None,
        source: str = "<memory>",
    ) -> None:
        self._catalog = catalog
        self._source = source
        self._materials: tuple[MaterialRecord, ...] = tuple(materials)
        self._by_name = MappingProxyType(self._build_name_index())
        self._check_fom_values()

        self._reference = ReferenceTable(
            entries=tuple(m for m in self._materials if m.is_reference)
        )
        if (
            declared_reference_count is not None
            and declared_reference_count != self._reference.entry_count
        ):
            raise InvariantViolation(
                "reference_entry_count_mismatch: "
                f"declared {declared_reference_count}, found {self._reference.entry_count}"
            )

    @property
    def source(self) -> str:
        return self._source

    @property
    def materials(self) -> tuple[MaterialRecord, ...]:
        return self._materials

    @property
    def catalog(self) -> FomCatalog:
        return self._catalog

    @property
    def reference(self) -> ReferenceTable:
        return self._reference

    def lookup_material(self, name: str) -> MaterialRecord | None:
        """Resolve a canonical name or synonym after normalization."""
        key = normalize_name(name)
        if not key:
            return None
        return self._by_name.get(key)

    def is_reference(self, canonical_name: str) -> bool:
        return canonical_name in self._reference.names

    def reference_value(self, canonical_name: str, fom_id: str) -> ScalarMeasurement | None:
        """Curated value of a reference entry, if it has one for the field."""
        if not self.is_reference(canonical_name):
            return None
        record = self.lookup_material(canonical_name)
        return record.fom_values.get(fom_id) if record is not None else None

    def summary(self) -> dict[str, object]:
        return {
            "source": self._source,
            "materials": len(self._materials),
            "reference_entries": self._reference.entry_count,
            "fom_fields": len(self._catalog),
            "value_fields": len(self._catalog.value_fields),
            "group_counts": self._catalog.group_counts(),
            "species": sorted(self._catalog.species_dictionary),
        }

    def _build_name_index(self) -> dict[str, MaterialRecord]:
        index: dict[str, MaterialRecord] = {}
        canonical_keys: set[str] = set()
        for record in self._materials:
            key = normalize_name(record.canonical_name)
            if key in canonical_keys:
                raise InvariantViolation(f"duplicate_material_name: {record.canonical_name!r}")
            canonical_keys.add(key)

        for record in self._materials:
            for name in (record.canonical_name, *record.synonyms):
                key = normalize_name(name)
                if not key:
                    raise InvariantViolation(f"blank_synonym: material {record.canonical_name!r}")
                previous = index.setdefault(key, record)
                if previous.canonical_name != record.canonical_name:
                    raise InvariantViolation(
                        f"duplicate_synonym: {name!r} names {previous.canonical_name!r} "
                        f"and {record.canonical_name!r}"
                    )
        return index

    def _check_fom_values(self) -> None:
        state_ids = {d.fom_id for d in self._catalog.state_fields}
        for record in self._materials:
            for fom_id, measurement in record.fom_values.items():
                if fom_id not in self._catalog:
                    raise InvariantViolation(
                        f"unknown_fom_value: material {record.canonical_name!r} uses {fom_id}"
                    )
                unknown_state = sorted(set(measurement.state) - state_ids)
                if unknown_state:
                    raise InvariantViolation(
                        f"unknown_state_variable: material {record.canonical_name!r} "
                        f"field {fom_id} uses {', '.join(unknown_state)}"
                    )
