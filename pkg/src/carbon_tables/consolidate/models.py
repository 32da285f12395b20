"""Knowledge-graph data types produced by consolidation."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict

from carbon_tables.catalog.models import TechnologyCategory

CATEGORY_ORDER: tuple[TechnologyCategory, ...] = tuple(TechnologyCategory)


class Novelty(str, Enum):
    """Whether a record adds knowledge or restates a curated reference value."""

    NEW = "new"
    CONFIRMS_REFERENCE = "confirms_reference"


class SkipReason(str, Enum):
    """Why a cell, column, row or table produced no record."""

    UNRESOLVED_MATERIAL = "UnresolvedMaterial"
    TABLE_SKIPPED_KNOWN_MATERIALS = "TableSkippedKnownMaterials"
    UNMATCHED_HEADER = "UnmatchedHeader"
    UNPARSEABLE_VALUE = "UnparseableValue"
    UNPARSEABLE_STATE_VARIABLE = "UnparseableStateVariable"
    FEATURE_COLLISION = "FeatureCollision"


class ConsolidationOptions(BaseModel):
    """Per-job consolidation switches."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    # False keeps the literal rule: tables made only of reference materials are skipped
    process_known_materials: bool = False


@dataclass(frozen=True, slots=True)
class Provenance:
    """Cell position a fact came from; row/col are None for table or column scope."""

    doc: str
    table: int
    row: int | None = None
    col: int | None = None

    def sort_key(self) -> tuple[str, int, int, int]:
        return (
            self.doc,
            self.table,
            -1 if self.row is None else self.row,
            -1 if self.col is None else self.col,
        )


@dataclass(frozen=True, slots=True)
class SkipEntry:
    provenance: Provenance | None
    reason: SkipReason
    detail: str = ""

    def sort_key(self) -> tuple[tuple[str, int, int, int], str, str]:
        position = self.provenance.sort_key() if self.provenance else ("", -1, -1, -1)
        return (position, self.reason.value, self.detail)


@dataclass(frozen=True, slots=True)
class MeasurementRecord:
    """One extracted figure-of-merit value with its provenance."""

    material_id: str
    fom_id: str
    value: float
    uncertainty: float | None
    unit: str
    state_variables: dict[str, float]
    provenance: Provenance
    novelty: Novelty = Novelty.NEW

    def sort_key(self) -> tuple[tuple[str, int, int, int], str]:
        return (self.provenance.sort_key(), self.fom_id)

    def identity(self) -> tuple[str, str, Provenance]:
        return (self.material_id, self.fom_id, self.provenance)


@dataclass(frozen=True, slots=True)
class MaterialNode:
    material_id: str
    categories: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class FomNode:
    fom_id: str
    display_name: str
    category: str
    canonical_unit: str = ""


@dataclass(frozen=True, slots=True)
class DocumentNode:
    doc_id: str
    source_filename: str = ""


@dataclass(slots=True)
class KnowledgeGraph:
    """Materials, FoMs and documents linked by measurement edges.

    Node lists are sorted by id, edges by provenance and skips by position, so
    two graphs built from the same inputs serialize to the same bytes.
    """

    materials: list[MaterialNode] = field(default_factory=list)
    foms: list[FomNode] = field(default_factory=list)
    documents: list[DocumentNode] = field(default_factory=list)
    measurements: list[MeasurementRecord] = field(default_factory=list)
    skips: list[SkipEntry] = field(default_factory=list)

    def normalize(self) -> KnowledgeGraph:
        """Sort in place into the canonical order; returns self."""
        self.materials.sort(key=lambda node: node.material_id)
        self.foms.sort(key=lambda node: node.fom_id)
        self.documents.sort(key=lambda node: node.doc_id)
        self.measurements.sort(key=MeasurementRecord.sort_key)
        self.skips.sort(key=SkipEntry.sort_key)
        return self

    def material_node(self, material_id: str) -> MaterialNode | None:
        return next((node for node in self.materials if node.material_id == material_id), None)

    def fom_node(self, fom_id: str) -> FomNode | None:
        return next((node for node in self.foms if node.fom_id == fom_id), None)

    def add_skip(self, entry: SkipEntry) -> None:
        """Append a skip entry unless an equal one is already logged."""
        if entry not in self.skips:
            self.skips.append(entry)
            self.skips.sort(key=SkipEntry.sort_key)

    def check(self) -> None:
        """Raise ValueError when an edge endpoint is missing or an edge overlaps a skip."""
        material_ids = {node.material_id for node in self.materials}
        fom_ids = {node.fom_id for node in self.foms}
        doc_ids = {node.doc_id for node in self.documents}
        for record in self.measurements:
            if record.material_id not in material_ids:
                raise ValueError(f"dangling_material: {record.material_id}")
            if record.fom_id not in fom_ids:
                raise ValueError(f"dangling_fom: {record.fom_id}")
            if record.provenance.doc not in doc_ids:
                raise ValueError(f"dangling_document: {record.provenance.doc}")

        edge_cells = {record.provenance for record in self.measurements}
        for skip in self.skips:
            if skip.provenance is not None and skip.provenance in edge_cells:
                raise ValueError(f"skip_overlaps_edge: {skip.provenance}")


@dataclass(slots=True)
class FeatureVector:
    """Fixed-length encoding of one material's measured fields.

    `values[i]` is meaningful only where `mask[i]` is true; unset slots hold NaN.
    """

    material_id: str
    values: np.ndarray
    mask: np.ndarray
    category_onehot: np.ndarray

    @property
    def populated(self) -> int:
        return int(self.mask.sum())
