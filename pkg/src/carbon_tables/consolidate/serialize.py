"""Knowledge-graph file format."""

from __future__ import annotations

import json
from typing import Any

from carbon_tables.consolidate.models import (
    DocumentNode,
    FomNode,
    KnowledgeGraph,
    MaterialNode,
    MeasurementRecord,
    Novelty,
    Provenance,
    SkipEntry,
    SkipReason,
)


def graph_to_dict(graph: KnowledgeGraph) -> dict[str, Any]:
    return {
        "materials": [
            {"id": node.material_id, "categories": list(node.categories)}
            for node in graph.materials
        ],
        "foms": [
            {
                "id": node.fom_id,
                "display_name": node.display_name,
                "category": node.category,
                "canonical_unit": node.canonical_unit,
            }
            for node in graph.foms
        ],
        "documents": [
            {"id": node.doc_id, "source_filename": node.source_filename} for node in graph.documents
        ],
        "measurements": [record_to_dict(record) for record in graph.measurements],
        "skips": [
            {
                "provenance": _provenance_to_dict(skip.provenance) if skip.provenance else None,
                "reason": skip.reason.value,
                "detail": skip.detail,
            }
            for skip in graph.skips
        ],
    }


def record_to_dict(record: MeasurementRecord) -> dict[str, Any]:
    return {
        "material": record.material_id,
        "fom": record.fom_id,
        "value": record.value,
        "uncertainty": record.uncertainty,
        "unit": record.unit,
        "state": dict(sorted(record.state_variables.items())),
        "provenance": _provenance_to_dict(record.provenance),
        "novelty": record.novelty.value,
    }


def graph_to_json(graph: KnowledgeGraph) -> str:
    """Canonical graph text: fixed key order, sorted content, trailing newline."""
    normalized = KnowledgeGraph(
        materials=list(graph.materials),
        foms=list(graph.foms),
        documents=list(graph.documents),
        measurements=list(graph.measurements),
        skips=list(graph.skips),
    ).normalize()
    return json.dumps(graph_to_dict(normalized), indent=2, ensure_ascii=False) + "\n"


def graph_from_json(text: str | bytes) -> KnowledgeGraph:
    """Parse a graph file.

    Raises:
        ValueError: Text is not a graph document.
    """
    try:
        raw = json.loads(text)
        return KnowledgeGraph(
            materials=[
                MaterialNode(m["id"], tuple(m.get("categories", []))) for m in raw["materials"]
            ],
            foms=[
                FomNode(f["id"], f["display_name"], f["category"], f.get("canonical_unit", ""))
                for f in raw["foms"]
            ],
            documents=[
                DocumentNode(d["id"], d.get("source_filename", "")) for d in raw["documents"]
            ],
            measurements=[record_from_dict(m) for m in raw["measurements"]],
            skips=[
                SkipEntry(
                    _provenance_from_dict(s["provenance"]) if s.get("provenance") else None,
                    SkipReason(s["reason"]),
                    s.get("detail", ""),
                )
                for s in raw.get("skips", [])
            ],
        ).normalize()
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValueError(f"invalid_graph_file: {exc}") from exc


def record_from_dict(raw: dict[str, Any]) -> MeasurementRecord:
    uncertainty = raw.get("uncertainty")
    return MeasurementRecord(
        material_id=raw["material"],
        fom_id=raw["fom"],
        value=float(raw["value"]),
        uncertainty=None if uncertainty is None else float(uncertainty),
        unit=raw.get("unit", ""),
        state_variables={key: float(value) for key, value in raw.get("state", {}).items()},
        provenance=_provenance_from_dict(raw["provenance"]),
        novelty=Novelty(raw.get("novelty", Novelty.NEW.value)),
    )


def _provenance_to_dict(provenance: Provenance) -> dict[str, Any]:
    return {
        "doc": provenance.doc,
        "table": provenance.table,
        "row": provenance.row,
        "col": provenance.col,
    }


def _provenance_from_dict(raw: dict[str, Any]) -> Provenance:
    return Provenance(raw["doc"], int(raw["table"]), raw.get("row"), raw.get("col"))
