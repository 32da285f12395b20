"""Parsing of annotated-table uploads: single JSON documents and zip archives."""

from __future__ import annotations

import io
import json
import zipfile
from pathlib import PurePosixPath
from typing import Any

from pydantic import ValidationError

from carbon_tables.ingest.errors import (
    DocumentSchemaViolation,
    EmptyArchive,
    IngestError,
    MalformedJson,
    MemberTooLarge,
    NotAnArchive,
    UnsupportedFormat,
)
from carbon_tables.ingest.models import AnnotatedDocument, AnnotatedTable, IngestReport
from carbon_tables.utils.logging import get_logger

logger = get_logger("carbon_tables.ingest")

PDF_REJECTION = "pdf conversion not bundled"


def parse_document(data: bytes, filename: str) -> AnnotatedDocument:
    """Parse one UTF-8 JSON annotated document.

    A missing or empty ``doc_id`` is derived from the filename stem. Ragged
    rows are rejected, never padded.

    Raises:
        MalformedJson: Bytes are not UTF-8 JSON.
        DocumentSchemaViolation: JSON does not follow the document schema.
    """
    try:
        raw = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedJson(f"malformed_json: {filename}: {exc}") from exc

    if not isinstance(raw, dict):
        raise DocumentSchemaViolation(None, None, "document_must_be_object")

    raw = dict(raw)
    if not raw.get("doc_id"):
        raw["doc_id"] = PurePosixPath(filename).stem
    raw.setdefault("source_filename", PurePosixPath(filename).name)

    try:
        document = AnnotatedDocument.model_validate(raw)
    except ValidationError as exc:
        raise _schema_violation(exc) from exc

    for position, table in enumerate(document.tables):
        _check_table(position, table)

    if document.is_empty:
        logger.warning("document_has_no_tables", doc_id=document.doc_id, filename=filename)
    return document


def serialize_document(document: AnnotatedDocument) -> bytes:
    """Canonical JSON bytes for a document; `parse_document` reads them back."""
    payload = document.model_dump(mode="json")
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def parse_archive(
    data: bytes, *, max_uncompressed_bytes: int | None = None
) -> tuple[list[AnnotatedDocument], IngestReport]:
    """Parse every member of a zip archive independently.

    Members are handled in lexicographic name order. A bad member is reported
    as rejected and does not abort the batch; a later member repeating an
    earlier doc_id is rejected too. With ``max_uncompressed_bytes`` set, the
    decompressed members share that budget and a member that would exceed
    what is left is rejected without being inflated further.

    Raises:
        NotAnArchive: Bytes are not a zip archive.
        EmptyArchive: The archive has no ingestible members.
    """
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except (zipfile.BadZipFile, ValueError) as exc:
        raise NotAnArchive(f"not_an_archive: {exc}") from exc

    with archive:
        members = sorted(
            (info for info in archive.infolist() if not _is_ignored(info)),
            key=lambda info: info.filename,
        )
        if not members:
            raise EmptyArchive("empty_archive")

        documents: list[AnnotatedDocument] = []
        report = IngestReport()
        seen: set[str] = set()
        budget = max_uncompressed_bytes
        for info in members:
            try:
                _check_member_format(info.filename)
                data = _read_member(archive, info, budget)
                if budget is not None:
                    budget -= len(data)
                document = parse_document(data, info.filename)
            except (IngestError, zipfile.BadZipFile, OSError) as exc:
                report.rejected.append((info.filename, _reason(exc)))
                logger.info("archive_member_rejected", member=info.filename, reason=_reason(exc))
                continue

            if document.doc_id in seen:
                report.rejected.append((info.filename, f"DuplicateDocument: {document.doc_id}"))
                continue
            seen.add(document.doc_id)
            documents.append(document)
            report.accepted.append(document.doc_id)
            if document.is_empty:
                report.warnings.append((document.doc_id, "empty_document"))

    logger.info(
        "archive_parsed",
        accepted=len(report.accepted),
        rejected=len(report.rejected),
    )
    return documents, report


def parse_upload(
    data: bytes, filename: str, *, max_uncompressed_bytes: int | None = None
) -> tuple[list[AnnotatedDocument], IngestReport]:
    """Dispatch an upload on its suffix: ``.zip`` archive or single ``.json``.

    Single-document errors propagate; archive members are reported.
    """
    suffix = PurePosixPath(filename).suffix.lower()
    if suffix == ".zip":
        return parse_archive(data, max_uncompressed_bytes=max_uncompressed_bytes)
    if suffix == ".json":
        document = parse_document(data, filename)
        report = IngestReport(accepted=[document.doc_id])
        if document.is_empty:
            report.warnings.append((document.doc_id, "empty_document"))
        return [document], report
    if suffix == ".pdf":
        raise UnsupportedFormat("pdf", PDF_REJECTION)
    raise UnsupportedFormat(suffix or "<none>", "expected .json or .zip")


def _check_member_format(name: str) -> None:
    suffix = PurePosixPath(name).suffix.lower()
    if suffix == ".json":
        return
    if suffix == ".pdf":
        raise UnsupportedFormat("pdf", PDF_REJECTION)
    raise UnsupportedFormat(suffix or "<none>", "only .json members are ingested")


def _read_member(archive: zipfile.ZipFile, info: zipfile.ZipInfo, budget: int | None) -> bytes:
    if budget is None:
        return archive.read(info)
    # declared sizes can lie; never inflate more than budget + 1 bytes
    if info.file_size > budget:
        raise MemberTooLarge(info.filename, info.file_size, budget)
    with archive.open(info) as member:
        data = member.read(budget + 1)
    if len(data) > budget:
        raise MemberTooLarge(info.filename, len(data), budget)
    return data


def _check_table(position: int, table: AnnotatedTable) -> None:
    if table.table_index != position:
        raise DocumentSchemaViolation(
            table.table_index,
            None,
            f"table_index_not_contiguous: expected {position}",
        )
    if table.n_cols < 1:
        raise DocumentSchemaViolation(table.table_index, None, "header_row_empty")
    for row_index, row in enumerate(table.body):
        if len(row) != table.n_cols:
            raise DocumentSchemaViolation(
                table.table_index,
                row_index,
                f"row_has_{len(row)}_cells_expected_{table.n_cols}",
            )


def _schema_violation(exc: ValidationError) -> DocumentSchemaViolation:
    error = exc.errors()[0]
    loc: tuple[Any, ...] = tuple(error["loc"])
    table_index: int | None = None
    row: int | None = None
    if len(loc) >= 2 and loc[0] == "tables" and isinstance(loc[1], int):
        table_index = loc[1]
        if len(loc) >= 4 and loc[2] == "body" and isinstance(loc[3], int):
            row = loc[3]
    path = ".".join(str(part) for part in loc) or "document"
    return DocumentSchemaViolation(table_index, row, f"{path}: {error['msg']}")


def _is_ignored(info: zipfile.ZipInfo) -> bool:
    if info.is_dir():
        return True
    parts = PurePosixPath(info.filename).parts
    return any(part == "__MACOSX" or part.startswith(".") for part in parts)


def _reason(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"
