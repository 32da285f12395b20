from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any

import pytest

from carbon_tables.catalog.base import MaterialsBase
from carbon_tables.catalog.errors import (
    InvariantViolation,
    MalformedFile,
    SchemaViolation,
    UnknownSpecies,
)
from carbon_tables.catalog.loader import load_material_base, parse_material_base
from carbon_tables.config import DEFAULT_MB_PATH


def _build_raw() -> dict[str, Any]:
    return copy.deepcopy(json.loads(DEFAULT_MB_PATH.read_text(encoding="utf-8")))


def _fom(raw: dict[str, Any], fom_id: str) -> dict[str, Any]:
    return next(d for d in raw["fom_catalog"] if d["fom_id"] == fom_id)


def _material(raw: dict[str, Any], name: str) -> dict[str, Any]:
    return next(m for m in raw["materials"] if m["canonical_name"] == name)


def test_default_catalog_group_counts(mb: MaterialsBase) -> None:
    assert mb.catalog.group_counts() == {
        "Common": 4,
        "Sorption": 19,
        "Hydrate": 3,
        "Membrane": 14,
        "ChemicalLooping": 9,
    }
    assert len(mb.catalog) == 49
    assert [d.catalog_position for d in mb.catalog] == list(range(49))
    assert {d.fom_id for d in mb.catalog.state_fields} == {"temperature_k", "pressure_bar", "ph"}
    assert len(mb.catalog.value_fields) == 46


def test_default_reference_table(mb: MaterialsBase) -> None:
    assert mb.reference.entry_count == 6
    assert mb.is_reference("Matrimid 5218")
    assert not mb.is_reference("MMHFM")

    reference = mb.reference_value("Matrimid 5218", "co2_ch4_selectivity")
    assert reference is not None
    assert reference.value == 35.0
    assert mb.reference_value("Matrimid 5218", "co2_permeance_gpu") is None
    assert mb.reference_value("MMHFM", "co2_permeance_gpu") is None


def test_lookup_material_normalizes_names(mb: MaterialsBase) -> None:
    record = mb.lookup_material("MMHFM")
    assert record is not None and record.canonical_name == "MMHFM"

    record = mb.lookup_material("  pure ultem hfm ")
    assert record is not None and record.canonical_name == "Pure Ultem HFM"

    record = mb.lookup_material("MEA")
    assert record is not None and record.canonical_name == "Monoethanolamine"

    assert mb.lookup_material("Unobtainium") is None
    assert mb.lookup_material("   ") is None


def test_every_material_name_resolves_to_its_owner(mb: MaterialsBase) -> None:
    for record in mb.materials:
        for name in (record.canonical_name, *record.synonyms):
            for variant in (name, name.upper(), f"  {name}\t"):
                found = mb.lookup_material(variant)
                assert found is not None, variant
                assert found.canonical_name == record.canonical_name, variant


def test_every_fom_name_resolves_to_its_definition(mb: MaterialsBase) -> None:
    for definition in mb.catalog:
        for name in (definition.display_name, *definition.synonyms):
            for variant in (name, name.lower(), f" {name}  "):
                found = mb.catalog.fom_by_exact_name(variant)
                assert found is not None, variant
                assert found.fom_id == definition.fom_id, variant


def test_every_species_set_resolves_to_its_definition(mb: MaterialsBase) -> None:
    multi = [d for d in mb.catalog if len(d.species) >= 2]
    assert multi

    for definition in multi:
        assert mb.catalog.fom_by_species_set(definition.species) == definition
        assert mb.catalog.fom_by_species_set(list(reversed(definition.species))) == definition
        for species in definition.species:
            assert definition in mb.catalog.foms_containing_species(species)


def test_foms_containing_species_orders_by_position(mb: MaterialsBase) -> None:
    found = mb.catalog.foms_containing_species("CO2")
    ids = [d.fom_id for d in found]

    assert ids.index("co2_permeance_gpu") < ids.index("co2_n2_selectivity")
    assert found == [d for d in mb.catalog.definitions if "CO2" in d.species]
    assert [d.catalog_position for d in found] == sorted(d.catalog_position for d in found)


def test_foms_containing_unknown_species_raises(mb: MaterialsBase) -> None:
    with pytest.raises(UnknownSpecies):
        mb.catalog.foms_containing_species("Xe")


def test_fom_by_species_set(mb: MaterialsBase) -> None:
    fom = mb.catalog.fom_by_species_set(["N2", "CO2"])
    assert fom is not None and fom.fom_id == "co2_n2_selectivity"
    assert mb.catalog.fom_by_species_set(["H2", "CH4"]) is None

    with pytest.raises(ValueError):
        mb.catalog.fom_by_species_set(["CO2"])


def test_fom_by_exact_name_uses_synonyms(mb: MaterialsBase) -> None:
    fom = mb.catalog.fom_by_exact_name("  Absorption   Flux ")
    assert fom is not None and fom.fom_id == "co2_absorption_capacity_mol_mol"
    assert mb.catalog.fom_by_exact_name("Thickness") is None
    assert mb.catalog.fom_by_exact_name("") is None


def test_duplicate_species_set_is_rejected() -> None:
    raw = _build_raw()
    _fom(raw, "co2_ch4_selectivity")["species"] = ["N2", "CO2"]

    with pytest.raises(InvariantViolation, match="duplicate_multi_species_fom"):
        parse_material_base(json.dumps(raw))


def test_synonym_shared_by_two_materials_is_rejected() -> None:
    raw = _build_raw()
    _material(raw, "Pure Ultem HFM")["synonyms"].append("mmhfm")

    with pytest.raises(InvariantViolation, match="duplicate_synonym"):
        parse_material_base(json.dumps(raw))


def test_reference_count_mismatch_is_rejected() -> None:
    raw = _build_raw()
    raw["reference_entry_count"] = 7

    with pytest.raises(InvariantViolation, match="reference_entry_count_mismatch"):
        parse_material_base(json.dumps(raw))


def test_non_contiguous_positions_are_rejected() -> None:
    raw = _build_raw()
    raw["fom_catalog"][-1]["catalog_position"] = 99

    with pytest.raises(InvariantViolation, match="catalog_positions_not_contiguous"):
        parse_material_base(json.dumps(raw))


def test_state_variable_outside_common_is_rejected() -> None:
    raw = _build_raw()
    _fom(raw, "temperature_k")["category"] = "Membrane"

    with pytest.raises(InvariantViolation, match="state_variable_not_common"):
        parse_material_base(json.dumps(raw))


def test_fom_value_for_unknown_field_is_rejected() -> None:
    raw = _build_raw()
    _material(raw, "MMHFM")["fom_values"] = {"flux_capacitance": {"value": 1.0}}

    with pytest.raises(InvariantViolation, match="unknown_fom_value"):
        parse_material_base(json.dumps(raw))


def test_species_outside_dictionary_is_rejected() -> None:
    raw = _build_raw()
    _fom(raw, "h2_permeance_gpu")["species"] = ["He"]

    with pytest.raises(InvariantViolation, match="fom_species_not_in_dictionary"):
        parse_material_base(json.dumps(raw))


def test_missing_field_reports_path() -> None:
    raw = _build_raw()
    del raw["materials"][1]["canonical_name"]

    with pytest.raises(SchemaViolation) as excinfo:
        parse_material_base(json.dumps(raw))
    assert excinfo.value.path == "materials[1].canonical_name"


def test_malformed_file_is_rejected(tmp_path: Path) -> None:
    with pytest.raises(MalformedFile):
        parse_material_base("{not json")

    with pytest.raises(MalformedFile):
        load_material_base(tmp_path / "missing.json")


def test_loader_reads_file(tmp_path: Path) -> None:
    path = tmp_path / "mb.json"
    path.write_text(json.dumps(_build_raw()), encoding="utf-8")

    base = load_material_base(path)

    assert base.source == str(path)
    assert base.summary()["fom_fields"] == 49
    assert base.summary()["species"] == ["CH4", "CO2", "H2", "H2O", "N2", "O2"]
