"""Annotated-table ingestion errors."""

from __future__ import annotations

from carbon_tables.errors import CarbonTablesError


class IngestError(CarbonTablesError):
    """Base ingestion error."""


class MalformedJson(IngestError):
    """Raised when a document is not UTF-8 JSON."""


class DocumentSchemaViolation(IngestError):
    """Raised when a document does not follow the table schema."""

    def __init__(self, table_index: int | None, row: int | None, detail: str) -> None:
        where = "document"
        if table_index is not None:
            where = f"table {table_index}"
            if row is not None:
                where += f" row {row}"
        super().__init__(f"schema_violation at {where}: {detail}")
        self.table_index = table_index
        self.row = row
        self.detail = detail


class NotAnArchive(IngestError):
    """Raised when an upload claimed to be a zip archive is not one."""


class EmptyArchive(IngestError):
    """Raised when an archive has no members to ingest."""


class UnsupportedFormat(IngestError):
    """Raised for members that are neither annotated JSON nor zip."""

    def __init__(self, fmt: str, detail: str) -> None:
        super().__init__(f"unsupported_format {fmt}: {detail}")
        self.fmt = fmt
        self.detail = detail


class MemberTooLarge(IngestError):
    """Raised when an archive member decompresses past the remaining size budget."""

    def __init__(self, member: str, size: int, limit: int) -> None:
        super().__init__(f"member_too_large: {member} needs {size} bytes, {limit} left")
        self.member = member
        self.size = size
        self.limit = limit
