"""导入模块 - 解析标注 JSON 文档与 zip 压缩包。"""

from carbon_tables.ingest.documents import (
    PDF_REJECTION,
    parse_archive,
    parse_document,
    parse_upload,
    serialize_document,
)
from carbon_tables.ingest.errors import (
    DocumentSchemaViolation,
    EmptyArchive,
    IngestError,
    MalformedJson,
    NotAnArchive,
    UnsupportedFormat,
)
from carbon_tables.ingest.models import AnnotatedDocument, AnnotatedTable, IngestReport

__all__ = [
    "PDF_REJECTION",
    "AnnotatedDocument",
    "AnnotatedTable",
    "DocumentSchemaViolation",
    "EmptyArchive",
    "IngestError",
    "IngestReport",
    "MalformedJson",
    "NotAnArchive",
    "UnsupportedFormat",
    "parse_archive",
    "parse_document",
    "parse_upload",
    "serialize_document",
]
