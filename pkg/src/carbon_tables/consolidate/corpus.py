"""Corpus-level consolidation and graph merging."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor

from carbon_tables.catalog.base import MaterialLookup, MaterialsBase
from carbon_tables.catalog.models import FomDefinition, MaterialRecord
from carbon_tables.consolidate.headers import HeaderMatcher
from carbon_tables.consolidate.models import (
    ConsolidationOptions,
    DocumentNode,
    FomNode,
    KnowledgeGraph,
    MaterialNode,
    Provenance,
    SkipEntry,
)
from carbon_tables.consolidate.tables import TableOutcome, consolidate_table
from carbon_tables.ingest.models import AnnotatedDocument, AnnotatedTable
from carbon_tables.utils.logging import get_logger

logger = get_logger("carbon_tables.consolidate")


def consolidate_corpus(
    documents: Sequence[AnnotatedDocument],
    mb: MaterialsBase,
    options: ConsolidationOptions | None = None,
    *,
    max_workers: int = 1,
    matcher: HeaderMatcher | None = None,
    materials: MaterialLookup | None = None,
) -> KnowledgeGraph:
    """Consolidate every table of every document into one knowledge graph.

    Tables run on a thread pool when `max_workers` > 1; the result is sorted
    into canonical order, so serial and parallel runs give the same graph.
    A repeated doc_id is consolidated once (first occurrence).
    """
    options = options or ConsolidationOptions()
    unique: dict[str, AnnotatedDocument] = {}
    for document in documents:
        if document.doc_id in unique:
            logger.warning("duplicate_document_ignored", doc_id=document.doc_id)
            continue
        unique[document.doc_id] = document

    tasks: list[tuple[str, AnnotatedTable]] = [
        (document.doc_id, table) for document in unique.values() for table in document.tables
    ]

    def run(task: tuple[str, AnnotatedTable]) -> TableOutcome:
        doc_id, table = task
        return consolidate_table(
            table,
            mb,
            doc_id=doc_id,
            options=options,
            matcher=matcher,
            materials=materials,
        )

    if max_workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix="consolidate") as pool:
            outcomes = list(pool.map(run, tasks))
    else:
        outcomes = [run(task) for task in tasks]

    graph = _assemble(unique.values(), outcomes)
    logger.info(
        "corpus_consolidated",
        documents=len(graph.documents),
        tables=len(tasks),
        materials=len(graph.materials),
        measurements=len(graph.measurements),
        skips=len(graph.skips),
    )
    return graph


def merge_graphs(graphs: Iterable[KnowledgeGraph]) -> KnowledgeGraph:
    """Union of several graphs, given oldest first.

    Each document's facts and skips come from the last graph that consolidated
    it, so a re-uploaded document never mixes old and new values. Skips without
    a position are kept once.
    """
    ordered = list(graphs)
    owner: dict[str, int] = {}
    for index, graph in enumerate(ordered):
        for document in graph.documents:
            owner[document.doc_id] = index

    materials: dict[str, MaterialNode] = {}
    foms: dict[str, FomNode] = {}
    documents: dict[str, DocumentNode] = {}
    merged = KnowledgeGraph()
    seen_facts: set[tuple[str, str, Provenance]] = set()
    seen_skips: set[SkipEntry] = set()
    for index, graph in enumerate(ordered):
        for node in graph.materials:
            previous = materials.get(node.material_id)
            if previous is None:
                materials[node.material_id] = node
            else:
                categories = tuple(sorted({*previous.categories, *node.categories}))
                materials[node.material_id] = MaterialNode(node.material_id, categories)
        for fom in graph.foms:
            foms.setdefault(fom.fom_id, fom)
        for document in graph.documents:
            if owner[document.doc_id] == index:
                documents[document.doc_id] = document
        for record in graph.measurements:
            if owner.get(record.provenance.doc, index) != index:
                continue
            if record.identity() in seen_facts:
                continue
            seen_facts.add(record.identity())
            merged.measurements.append(record)
        for skip in graph.skips:
            if skip.provenance is not None and owner.get(skip.provenance.doc, index) != index:
                continue
            if skip not in seen_skips:
                seen_skips.add(skip)
                merged.skips.append(skip)

    merged.materials = list(materials.values())
    merged.foms = list(foms.values())
    merged.documents = list(documents.values())
    return merged.normalize()


def _assemble(
    documents: Iterable[AnnotatedDocument],
    outcomes: list[TableOutcome],
) -> KnowledgeGraph:
    materials: dict[str, MaterialRecord] = {}
    foms: dict[str, FomDefinition] = {}
    graph = KnowledgeGraph(
        documents=[DocumentNode(d.doc_id, d.source_filename) for d in documents],
    )
    for outcome in outcomes:
        materials.update(outcome.materials)
        foms.update(outcome.foms)
        graph.measurements.extend(outcome.records)
        graph.skips.extend(outcome.skips)

    graph.materials = [
        MaterialNode(name, tuple(sorted(c.value for c in record.categories)))
        for name, record in materials.items()
    ]
    graph.foms = [
        FomNode(
            fom_id,
            definition.display_name,
            getattr(definition.category, "value", str(definition.category)),
            definition.canonical_unit,
        )
        for fom_id, definition in foms.items()
    ]
    return graph.normalize()
