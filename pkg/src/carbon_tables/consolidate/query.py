"""Filtering of consolidated measurements."""

from __future__ import annotations

from collections.abc import Mapping
from typing import Any

import pandas as pd

from carbon_tables.consolidate.errors import UnknownFilterField
from carbon_tables.consolidate.models import KnowledgeGraph, MeasurementRecord
from carbon_tables.utils.text import normalize_name

FILTER_FIELDS = frozenset({"category", "material", "fom_id", "min_value", "max_value"})

RECORD_COLUMNS = [
    "material",
    "fom",
    "value",
    "uncertainty",
    "unit",
    "category",
    "novelty",
    "doc",
    "table",
    "row",
    "col",
    "state",
]


def query_records(
    graph: KnowledgeGraph,
    filters: Mapping[str, Any] | None = None,
) -> list[MeasurementRecord]:
    """Measurements passing every given filter, in provenance order.

    Keys: ``category`` (FoM category or any material category, case-insensitive),
    ``material`` (canonical name), ``fom_id``, ``min_value``, ``max_value``
    (inclusive bounds). None values are ignored.

    Raises:
        UnknownFilterField: A key outside the supported set.
        ValueError: A bound that is not a number.
    """
    filters = {key: value for key, value in (filters or {}).items() if value is not None}
    for key in filters:
        if key not in FILTER_FIELDS:
            raise UnknownFilterField(key)

    category = str(filters["category"]).casefold() if "category" in filters else None
    material = normalize_name(str(filters["material"])) if "material" in filters else None
    fom_id = str(filters["fom_id"]) if "fom_id" in filters else None
    min_value = _bound(filters, "min_value")
    max_value = _bound(filters, "max_value")

    fom_categories = {node.fom_id: node.category.casefold() for node in graph.foms}
    material_categories = {
        node.material_id: {c.casefold() for c in node.categories} for node in graph.materials
    }

    matched: list[MeasurementRecord] = []
    for record in graph.measurements:
        if material is not None and normalize_name(record.material_id) != material:
            continue
        if fom_id is not None and record.fom_id != fom_id:
            continue
        if min_value is not None and record.value < min_value:
            continue
        if max_value is not None and record.value > max_value:
            continue
        if category is not None and not (
            fom_categories.get(record.fom_id) == category
            or category in material_categories.get(record.material_id, set())
        ):
            continue
        matched.append(record)
    return sorted(matched, key=MeasurementRecord.sort_key)


def records_frame(graph: KnowledgeGraph) -> pd.DataFrame:
    """Measurements as a DataFrame for client-side analysis."""
    fom_categories = {node.fom_id: node.category for node in graph.foms}
    rows = [
        {
            "material": record.material_id,
            "fom": record.fom_id,
            "value": record.value,
            "uncertainty": record.uncertainty,
            "unit": record.unit,
            "category": fom_categories.get(record.fom_id, ""),
            "novelty": record.novelty.value,
            "doc": record.provenance.doc,
            "table": record.provenance.table,
            "row": record.provenance.row,
            "col": record.provenance.col,
            "state": dict(record.state_variables),
        }
        for record in graph.measurements
    ]
    return pd.DataFrame(rows, columns=RECORD_COLUMNS)


def _bound(filters: Mapping[str, Any], key: str) -> float | None:
    if key not in filters:
        return None
    try:
        return float(filters[key])
    except (TypeError, ValueError) as exc:
        raise ValueError(f"filter_not_numeric: {key}={filters[key]!r}") from exc
