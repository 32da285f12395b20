"""Request and response bodies of the REST API."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from carbon_tables.consolidate.models import ConsolidationOptions

ALL_DOCUMENTS = "all"


class JobRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    document_ids: list[str] | Literal["all"]
    options: ConsolidationOptions | None = None

    @field_validator("document_ids")
    @classmethod
    def check_document_ids(cls, v: list[str] | str) -> list[str] | str:
        if isinstance(v, list):
            if not v:
                raise ValueError("document_ids_empty")
            if len(set(v)) != len(v):
                raise ValueError("document_ids_not_unique")
        return v


class JobAccepted(BaseModel):
    job_id: str
    state: str


class UploadResponse(BaseModel):
    accepted: list[str] = Field(default_factory=list)
    rejected: list[dict[str, str]] = Field(default_factory=list)
    warnings: list[dict[str, str]] = Field(default_factory=list)
    stored: list[str] = Field(default_factory=list)


class KnowledgePage(BaseModel):
    total: int
    limit: int
    offset: int
    items: list[dict[str, Any]]
