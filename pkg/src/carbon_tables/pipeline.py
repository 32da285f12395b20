"""Ingest, consolidate and encode pipeline shared by the offline CLI and the job workers."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from time import perf_counter

from carbon_tables.catalog.base import MaterialsBase
from carbon_tables.consolidate.corpus import consolidate_corpus
from carbon_tables.consolidate.features import encode_features, features_to_csv, features_to_json
from carbon_tables.consolidate.models import ConsolidationOptions, FeatureVector, KnowledgeGraph
from carbon_tables.consolidate.serialize import graph_to_json
from carbon_tables.ingest.documents import parse_upload
from carbon_tables.ingest.errors import IngestError
from carbon_tables.ingest.models import AnnotatedDocument, IngestReport
from carbon_tables.utils.files import atomic_write_text
from carbon_tables.utils.logging import get_logger

GRAPH_FILE = "graph.json"
FEATURES_CSV_FILE = "features.csv"
FEATURES_JSON_FILE = "features.json"


@dataclass(slots=True)
class ConsolidationArtifacts:
    """A consolidated graph, its feature vectors and their file renderings."""

    graph: KnowledgeGraph
    vectors: list[FeatureVector]
    graph_json: str
    features_csv: str
    features_json: str

    def files(self) -> dict[str, str]:
        return {
            GRAPH_FILE: self.graph_json,
            FEATURES_CSV_FILE: self.features_csv,
            FEATURES_JSON_FILE: self.features_json,
        }


@dataclass(slots=True)
class PipelineResult:
    """Outcome of one offline run."""

    output_dir: Path
    documents: int
    measurements: int
    materials: int
    report: IngestReport = field(default_factory=IngestReport)
    latency_ms: int = 0


def build_artifacts(
    documents: Sequence[AnnotatedDocument],
    mb: MaterialsBase,
    options: ConsolidationOptions | None = None,
    *,
    max_workers: int = 1,
) -> ConsolidationArtifacts:
    """Consolidate documents and render graph and feature files.

    Features are encoded before the graph is rendered so that feature
    collisions appear in the graph's skip log.
    """
    graph = consolidate_corpus(documents, mb, options, max_workers=max_workers)
    vectors = encode_features(graph, mb)
    return ConsolidationArtifacts(
        graph=graph,
        vectors=vectors,
        graph_json=graph_to_json(graph),
        features_csv=features_to_csv(vectors, mb.catalog),
        features_json=features_to_json(vectors, mb.catalog),
    )


def write_artifacts(artifacts: ConsolidationArtifacts, output_dir: Path) -> None:
    output_dir.mkdir(parents=True, exist_ok=True)
    for name, text in artifacts.files().items():
        atomic_write_text(output_dir / name, text)


def load_corpus(path: Path) -> tuple[list[AnnotatedDocument], IngestReport]:
    """Read a corpus from a .json file, a .zip archive or a directory of .json files.

    Directory members are read in name order; a bad member is reported, as
    inside an archive.
    """
    if not path.is_dir():
        return parse_upload(path.read_bytes(), path.name)

    documents: list[AnnotatedDocument] = []
    report = IngestReport()
    seen: set[str] = set()
    for member in sorted(p for p in path.iterdir() if p.suffix.lower() == ".json"):
        try:
            docs, _ = parse_upload(member.read_bytes(), member.name)
        except (IngestError, OSError) as exc:
            report.rejected.append((member.name, f"{type(exc).__name__}: {exc}"))
            continue
        document = docs[0]
        if document.doc_id in seen:
            report.rejected.append((member.name, f"DuplicateDocument: {document.doc_id}"))
            continue
        seen.add(document.doc_id)
        documents.append(document)
        report.accepted.append(document.doc_id)
    return documents, report


def run_offline(
    corpus_path: Path,
    mb: MaterialsBase,
    output_dir: Path,
    options: ConsolidationOptions | None = None,
    *,
    max_workers: int = 1,
) -> PipelineResult:
    """Run ingest, consolidation and encoding locally and write the result files."""
    logger = get_logger("carbon_tables.pipeline")
    started = perf_counter()

    documents, report = load_corpus(corpus_path)
    artifacts = build_artifacts(documents, mb, options, max_workers=max_workers)
    write_artifacts(artifacts, output_dir)

    result = PipelineResult(
        output_dir=output_dir,
        documents=len(documents),
        measurements=len(artifacts.graph.measurements),
        materials=len(artifacts.graph.materials),
        report=report,
        latency_ms=int((perf_counter() - started) * 1000),
    )
    logger.info(
        "offline_run_complete",
        corpus=str(corpus_path),
        output_dir=str(output_dir),
        documents=result.documents,
        rejected=len(report.rejected),
        measurements=result.measurements,
        latency_ms=result.latency_ms,
    )
    return result
