"""Annotated document schema."""

from __future__ import annotations

from dataclasses import dataclass, field

from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr


class AnnotatedTable(BaseModel):
    """One table grid as produced by the upstream converter.

    The first row is the header; multi-row headers must be joined upstream.
    Cell text is kept verbatim.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    table_index: StrictInt = Field(ge=0)
    caption: StrictStr = ""
    header_row: list[StrictStr]
    body: list[list[StrictStr]] = Field(default_factory=list)

    @property
    def n_cols(self) -> int:
        return len(self.header_row)

    @property
    def n_rows(self) -> int:
        return len(self.body)


class AnnotatedDocument(BaseModel):
    """A parsed document: its tables plus provenance."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    doc_id: StrictStr = Field(min_length=1)
    source_filename: StrictStr = ""
    tables: list[AnnotatedTable] = Field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        """Zero-table documents are accepted but flagged."""
        return not self.tables


@dataclass(slots=True)
class IngestReport:
    """Per-member outcome of one upload."""

    accepted: list[str] = field(default_factory=list)
    rejected: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[tuple[str, str]] = field(default_factory=list)

    def as_dict(self) -> dict[str, object]:
        return {
            "accepted": list(self.accepted),
            "rejected": [{"filename": name, "reason": reason} for name, reason in self.rejected],
            "warnings": [{"doc_id": doc_id, "warning": text} for doc_id, text in self.warnings],
        }
