from __future__ import annotations

import hashlib
import random
from typing import Any

import pytest

from carbon_tables.catalog.base import FomCatalog, MaterialsBase
from carbon_tables.consolidate.corpus import consolidate_corpus, merge_graphs
from carbon_tables.consolidate.headers import ColumnMatch, DecisionTreeHeaderMatcher
from carbon_tables.consolidate.models import (
    ConsolidationOptions,
    KnowledgeGraph,
    Novelty,
    Provenance,
    SkipReason,
)
from carbon_tables.consolidate.serialize import graph_from_json, graph_to_json
from carbon_tables.consolidate.tables import consolidate_table
from carbon_tables.ingest.models import AnnotatedDocument, AnnotatedTable
from carbon_tables.matching.header import analyze_header


def _build_table(header: list[str], body: list[list[str]], index: int = 0) -> AnnotatedTable:
    return AnnotatedTable(table_index=index, header_row=header, body=body)


def _build_document(payload: dict[str, Any], doc_id: str | None = None) -> AnnotatedDocument:
    document = AnnotatedDocument.model_validate(payload)
    if doc_id is not None:
        document = document.model_copy(update={"doc_id": doc_id})
    return document


def _facts(graph: KnowledgeGraph) -> list[tuple[str, str, float]]:
    return [(r.material_id, r.fom_id, r.value) for r in graph.measurements]


def _facts_of(graph: KnowledgeGraph, doc: str) -> list[tuple[str, str, float]]:
    return [
        (r.material_id, r.fom_id, r.value) for r in graph.measurements if r.provenance.doc == doc
    ]


class _RejectEverything:
    def match(self, header_text: str, catalog: FomCatalog) -> ColumnMatch:
        analysis = analyze_header(header_text, catalog.species_dictionary)
        return ColumnMatch(analysis, None, "rejected")


def test_ultem_golden_extraction(mb: MaterialsBase, ultem_payload: dict[str, Any]) -> None:
    table = _build_document(ultem_payload).tables[0]

    outcome = consolidate_table(table, mb, doc_id="ultem-hfm-2019")

    assert outcome.skips == []
    assert not outcome.skipped
    assert [(r.material_id, r.fom_id, r.value) for r in outcome.records] == [
        ("Pure Ultem HFM", "co2_permeance_gpu", 15.3),
        ("Pure Ultem HFM", "co2_n2_selectivity", 0.5),
        ("MMHFM", "co2_permeance_gpu", 31.2),
        ("MMHFM", "co2_n2_selectivity", 35.7),
    ]
    units = {(r.material_id, r.fom_id): r.unit for r in outcome.records}
    assert units[("MMHFM", "co2_permeance_gpu")] == "GPU"
    assert units[("Pure Ultem HFM", "co2_permeance_gpu")] == "GPU"
    assert units[("MMHFM", "co2_n2_selectivity")] == ""
    assert outcome.records[2].provenance == Provenance("ultem-hfm-2019", 0, 1, 1)
    assert all(r.novelty == Novelty.NEW for r in outcome.records)
    assert all(r.state_variables == {} for r in outcome.records)
    assert set(outcome.materials) == {"Pure Ultem HFM", "MMHFM"}
    assert set(outcome.foms) == {"co2_permeance_gpu", "co2_n2_selectivity"}


def test_unmatched_column_is_logged(mb: MaterialsBase) -> None:
    table = _build_table(
        ["Material's Name", "CO2 (GPU)", "CO2/N2 Selectivity", "Thickness (µm)"],
        [["Pure Ultem HFM", "15.3", "0.5", "120"], ["MMHFM", "31.2", "35.7", "140"]],
    )

    outcome = consolidate_table(table, mb, doc_id="d")

    assert len(outcome.records) == 4
    assert len(outcome.skips) == 1
    skip = outcome.skips[0]
    assert skip.reason == SkipReason.UNMATCHED_HEADER
    assert skip.provenance == Provenance("d", 0, None, 3)
    assert skip.detail == "Thickness (µm)"


@pytest.mark.parametrize(
    ("header", "fom_id", "path"),
    [
        ("BET surface area (m2/g)", "bet_surface_area_m2_g", "exact_name"),
        ("Absorption flux", "co2_absorption_capacity_mol_mol", "exact_name"),
        ("H2 permeance (GPU)", "h2_permeance_gpu", "single_species"),
        ("CO2 (GPU)", "co2_permeance_gpu", "single_species"),
        ("CO2", "co2_uptake_mmol_g", "single_species"),
        ("CO2/N2 Selectivity", "co2_n2_selectivity", "species_set"),
        ("Thickness (µm)", None, "exact_name"),
    ],
)
def test_header_decision_tree(
    mb: MaterialsBase, header: str, fom_id: str | None, path: str
) -> None:
    match = DecisionTreeHeaderMatcher().match(header, mb.catalog)

    assert match.path == path
    assert (match.fom.fom_id if match.fom else None) == fom_id


def test_single_species_tie_break_takes_lowest_position(mb: MaterialsBase) -> None:
    match = DecisionTreeHeaderMatcher().match("CO2", mb.catalog)

    assert match.fom is not None
    positions = [d.catalog_position for d in mb.catalog if d.fom_id in match.candidates]
    assert len(positions) > 2
    assert match.fom.catalog_position == min(positions)


def test_reference_only_table_is_skipped(mb: MaterialsBase) -> None:
    table = _build_table(
        ["Material", "CO2/CH4 Selectivity", "Temperature (K)"],
        [["Matrimid", "35.0", "308.15"], ["MEA", "12", "313"]],
    )

    outcome = consolidate_table(table, mb, doc_id="d")

    assert outcome.skipped
    assert outcome.records == []
    assert outcome.materials == {}
    assert len(outcome.skips) == 1
    skip = outcome.skips[0]
    assert skip.reason == SkipReason.TABLE_SKIPPED_KNOWN_MATERIALS
    assert skip.provenance == Provenance("d", 0)
    assert skip.detail == "Matrimid 5218, Monoethanolamine"


def test_reference_table_processed_when_requested(mb: MaterialsBase) -> None:
    table = _build_table(
        ["Material", "CO2/CH4 Selectivity", "Temperature (K)"],
        [["Matrimid", "35.0", "308.15"], ["Matrimid 5218", "41", "308.15"]],
    )
    options = ConsolidationOptions(process_known_materials=True)

    outcome = consolidate_table(table, mb, doc_id="d", options=options)

    assert not outcome.skipped
    assert [(r.value, r.novelty) for r in outcome.records] == [
        (35.0, Novelty.CONFIRMS_REFERENCE),
        (41.0, Novelty.NEW),
    ]
    assert outcome.records[0].state_variables == {"temperature_k": 308.15}


def test_mixed_table_is_not_skipped(mb: MaterialsBase) -> None:
    table = _build_table(
        ["Material", "CO2/CH4 Selectivity"],
        [["Matrimid 5218", "35.0"], ["PIM-1", "18.4"]],
    )

    outcome = consolidate_table(table, mb, doc_id="d")

    assert not outcome.skipped
    assert [r.material_id for r in outcome.records] == ["Matrimid 5218", "PIM-1"]
    assert outcome.records[0].novelty == Novelty.CONFIRMS_REFERENCE


def test_row_and_cell_anomalies_become_skips(mb: MaterialsBase) -> None:
    table = _build_table(
        ["Material", "Temperature (K)", "CO2 (GPU)"],
        [
            ["Unobtainium", "300", "1.0"],
            ["MMHFM", "—", "31.2 ± 0.4"],
            ["PIM-1", "308", "n.d."],
        ],
    )

    outcome = consolidate_table(table, mb, doc_id="d")

    reasons = [(s.reason, s.provenance) for s in outcome.skips]
    assert reasons == [
        (SkipReason.UNRESOLVED_MATERIAL, Provenance("d", 0, 0, 0)),
        (SkipReason.UNPARSEABLE_STATE_VARIABLE, Provenance("d", 0, 1, 1)),
        (SkipReason.UNPARSEABLE_VALUE, Provenance("d", 0, 2, 2)),
    ]
    assert len(outcome.records) == 1
    record = outcome.records[0]
    assert (record.material_id, record.value, record.uncertainty) == ("MMHFM", 31.2, 0.4)
    assert record.state_variables == {}
    assert set(outcome.materials) == {"MMHFM", "PIM-1"}


def test_custom_matcher_is_used(mb: MaterialsBase, ultem_payload: dict[str, Any]) -> None:
    table = _build_document(ultem_payload).tables[0]

    outcome = consolidate_table(table, mb, doc_id="d", matcher=_RejectEverything())

    assert outcome.records == []
    assert [s.reason for s in outcome.skips] == [SkipReason.UNMATCHED_HEADER] * 2


def test_corpus_of_ultem_table(mb: MaterialsBase, ultem_payload: dict[str, Any]) -> None:
    graph = consolidate_corpus([_build_document(ultem_payload)], mb)

    graph.check()
    assert [n.material_id for n in graph.materials] == ["MMHFM", "Pure Ultem HFM"]
    assert [n.fom_id for n in graph.foms] == ["co2_n2_selectivity", "co2_permeance_gpu"]
    assert [n.doc_id for n in graph.documents] == ["ultem-hfm-2019"]
    assert _facts(graph) == [
        ("Pure Ultem HFM", "co2_permeance_gpu", 15.3),
        ("Pure Ultem HFM", "co2_n2_selectivity", 0.5),
        ("MMHFM", "co2_permeance_gpu", 31.2),
        ("MMHFM", "co2_n2_selectivity", 35.7),
    ]
    assert graph.materials[0].categories == ("Membrane",)
    node = graph.fom_node("co2_permeance_gpu")
    assert node is not None and node.category == "Membrane"


def test_corpus_keeps_repeated_facts_from_distinct_documents(
    mb: MaterialsBase, ultem_payload: dict[str, Any]
) -> None:
    documents = [
        _build_document(ultem_payload, "copy-a"),
        _build_document(ultem_payload, "copy-b"),
        _build_document(ultem_payload, "copy-a"),
    ]

    graph = consolidate_corpus(documents, mb)

    assert len(graph.measurements) == 8
    assert len(graph.materials) == 2
    assert len(graph.foms) == 2
    assert [n.doc_id for n in graph.documents] == ["copy-a", "copy-b"]


def test_empty_document_yields_only_a_document_node(mb: MaterialsBase) -> None:
    graph = consolidate_corpus([_build_document({"doc_id": "blank", "tables": []})], mb)

    assert [n.doc_id for n in graph.documents] == ["blank"]
    assert graph.materials == [] and graph.measurements == [] and graph.skips == []


def test_parallel_and_shuffled_runs_are_identical(
    mb: MaterialsBase, ultem_payload: dict[str, Any]
) -> None:
    documents = [_build_document(ultem_payload, f"doc-{i:02d}") for i in range(50)]
    shuffled = list(documents)
    random.Random(3).shuffle(shuffled)

    serial = graph_to_json(consolidate_corpus(documents, mb))
    parallel = graph_to_json(consolidate_corpus(shuffled, mb, max_workers=8))

    assert serial == parallel
    assert len(graph_from_json(serial).measurements) == 200


_JUNK_CELLS = ["n/a", "-", "", "12.5a", "~3", "see text", "1.2-3.4", "4.0 ± 0.2", "1e-3", "<0.1"]
_JUNK_HEADERS = ["Notes", "Ref.", "Thickness (µm)", "Batch", "Sample (-)"]


def _random_document(rng: random.Random, mb: MaterialsBase, doc_id: str) -> AnnotatedDocument:
    names = [n for m in mb.materials for n in (m.canonical_name, *m.synonyms)]
    names += ["Sample A", "MOF-x", "Unnamed"]
    headers = [d.display_name for d in mb.catalog] + _JUNK_HEADERS
    tables = []
    for index in range(rng.randint(1, 2)):
        columns = []
        for header in rng.sample(headers, rng.randint(1, 4)):
            definition = mb.catalog.fom_by_exact_name(header)
            if definition is not None and definition.canonical_unit and rng.random() < 0.5:
                header = f"{header} ({definition.canonical_unit})"
            columns.append(header)
        body = []
        for _ in range(rng.randint(1, 5)):
            row = [rng.choice(names)]
            for _ in columns:
                if rng.random() < 0.7:
                    row.append(f"{rng.uniform(0, 500):.{rng.randint(0, 3)}f}")
                else:
                    row.append(rng.choice(_JUNK_CELLS))
            body.append(row)
        tables.append(
            AnnotatedTable(table_index=index, header_row=["Material", *columns], body=body)
        )
    return AnnotatedDocument(doc_id=doc_id, tables=tables)


def test_random_corpus_graph_reads_back(mb: MaterialsBase) -> None:
    rng = random.Random(7)
    documents = [_random_document(rng, mb, f"rand-{i:03d}") for i in range(100)]

    for document in documents:
        text = graph_to_json(consolidate_corpus([document], mb))
        assert graph_to_json(graph_from_json(text)) == text, document.doc_id

    corpus = graph_to_json(consolidate_corpus(documents, mb))
    assert graph_to_json(graph_from_json(corpus)) == corpus
    assert graph_from_json(corpus).measurements


def test_repeated_runs_hash_identically(mb: MaterialsBase) -> None:
    rng = random.Random(11)
    documents = [_random_document(rng, mb, f"rand-{i:03d}") for i in range(40)]

    digests = set()
    for run in range(10):
        shuffled = list(documents)
        rng.shuffle(shuffled)
        text = graph_to_json(consolidate_corpus(shuffled, mb, max_workers=1 + run % 4))
        digests.add(hashlib.sha256(text.encode("utf-8")).hexdigest())

    assert len(digests) == 1


def test_merge_graphs_deduplicates_facts(
    mb: MaterialsBase, ultem_payload: dict[str, Any]
) -> None:
    graph = consolidate_corpus([_build_document(ultem_payload)], mb)
    other = consolidate_corpus([_build_document(ultem_payload, "second")], mb)

    merged = merge_graphs([graph, graph, other])

    assert len(merged.measurements) == 8
    assert [n.doc_id for n in merged.documents] == ["second", "ultem-hfm-2019"]
    assert graph_to_json(merge_graphs([graph])) == graph_to_json(graph)


def test_merge_graphs_prefers_latest_consolidation_of_a_document(
    mb: MaterialsBase, ultem_payload: dict[str, Any]
) -> None:
    old = consolidate_corpus(
        [_build_document(ultem_payload), _build_document(ultem_payload, "second")], mb
    )
    ultem_payload["tables"][0]["body"][1][2] = "99.9"
    ultem_payload["tables"][0]["body"].pop(0)
    new = consolidate_corpus([_build_document(ultem_payload)], mb)

    merged = merge_graphs([old, new])

    assert sorted(_facts_of(merged, "ultem-hfm-2019")) == [
        ("MMHFM", "co2_n2_selectivity", 99.9),
        ("MMHFM", "co2_permeance_gpu", 31.2),
    ]
    assert len(_facts_of(merged, "second")) == 4
    assert [n.doc_id for n in merged.documents] == ["second", "ultem-hfm-2019"]

    reverted = merge_graphs([new, old])
    assert ("MMHFM", "co2_n2_selectivity", 35.7) in _facts_of(reverted, "ultem-hfm-2019")
    assert len(reverted.measurements) == 8


def test_graph_file_reads_back(mb: MaterialsBase, ultem_payload: dict[str, Any]) -> None:
    ultem_payload["tables"][0]["header_row"].append("Thickness (µm)")
    for row in ultem_payload["tables"][0]["body"]:
        row.append("100")
    graph = consolidate_corpus([_build_document(ultem_payload)], mb)

    text = graph_to_json(graph)

    assert graph_to_json(graph_from_json(text)) == text
    with pytest.raises(ValueError, match="invalid_graph_file"):
        graph_from_json('{"materials": []}')
