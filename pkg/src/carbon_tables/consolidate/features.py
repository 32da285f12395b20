"""Feature-vector encoding of consolidated knowledge."""

from __future__ import annotations

import json
from collections import defaultdict

import numpy as np
import pandas as pd

from carbon_tables.catalog.base import FomCatalog, MaterialsBase
from carbon_tables.consolidate.models import (
    CATEGORY_ORDER,
    FeatureVector,
    KnowledgeGraph,
    SkipEntry,
    SkipReason,
)
from carbon_tables.utils.logging import get_logger

logger = get_logger("carbon_tables.consolidate")


def encode_features(graph: KnowledgeGraph, mb: MaterialsBase) -> list[FeatureVector]:
    """One vector per material node, slots in catalog order of the value fields.

    Several edges for one (material, fom) pair are averaged; each such
    collision is appended to `graph.skips` once.
    """
    catalog = mb.catalog
    slots = {definition.fom_id: i for i, definition in enumerate(catalog.value_fields)}
    width = len(slots)

    supplied: dict[tuple[str, str], list[float]] = defaultdict(list)
    for record in graph.measurements:
        if record.fom_id in slots:
            supplied[(record.material_id, record.fom_id)].append(record.value)

    vectors: list[FeatureVector] = []
    for node in graph.materials:
        values = np.full(width, np.nan, dtype=np.float64)
        mask = np.zeros(width, dtype=bool)
        for fom_id, slot in slots.items():
            observed = supplied.get((node.material_id, fom_id))
            if not observed:
                continue
            values[slot] = float(np.mean(observed))
            mask[slot] = True
            if len(observed) > 1:
                graph.add_skip(
                    SkipEntry(
                        None,
                        SkipReason.FEATURE_COLLISION,
                        f"{node.material_id}:{fom_id}:{len(observed)}",
                    )
                )
        onehot = np.array([c.value in node.categories for c in CATEGORY_ORDER], dtype=bool)
        vectors.append(FeatureVector(node.material_id, values, mask, onehot))

    logger.debug("features_encoded", vectors=len(vectors), width=width)
    return vectors


def features_frame(vectors: list[FeatureVector], catalog: FomCatalog) -> pd.DataFrame:
    """Vectors as a DataFrame: a `material` column then one column per value field."""
    columns = [definition.fom_id for definition in catalog.value_fields]
    frame = pd.DataFrame(
        [vector.values for vector in vectors],
        columns=columns,
        dtype="float64",
    )
    frame.insert(0, "material", [vector.material_id for vector in vectors])
    return frame


def features_to_csv(vectors: list[FeatureVector], catalog: FomCatalog) -> str:
    """CSV text; unset slots are empty cells."""
    return str(features_frame(vectors, catalog).to_csv(index=False, lineterminator="\n"))


def features_to_json(vectors: list[FeatureVector], catalog: FomCatalog) -> str:
    payload = {
        "fields": [definition.fom_id for definition in catalog.value_fields],
        "categories": [category.value for category in CATEGORY_ORDER],
        "vectors": [
            {
                "material": vector.material_id,
                "values": [
                    float(value) if present else None
                    for value, present in zip(vector.values, vector.mask)
                ],
                "mask": [bool(flag) for flag in vector.mask],
                "category_onehot": [bool(flag) for flag in vector.category_onehot],
            }
            for vector in vectors
        ],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
