"""Service-layer errors."""

from __future__ import annotations

from carbon_tables.errors import CarbonTablesError


class ServiceError(CarbonTablesError):
    """Base service error."""


class DocumentNotFound(ServiceError):
    """Raised when a doc_id is not in the document store."""

    def __init__(self, doc_id: str) -> None:
        super().__init__(f"document_not_found: {doc_id}")
        self.doc_id = doc_id


class DuplicateDocument(ServiceError):
    """Raised when storing a doc_id that already exists without overwrite."""

    def __init__(self, doc_id: str) -> None:
        super().__init__(f"duplicate_document: {doc_id}")
        self.doc_id = doc_id


class JobNotFound(ServiceError):
    def __init__(self, job_id: str) -> None:
        super().__init__(f"job_not_found: {job_id}")
        self.job_id = job_id


class JobNotFinished(ServiceError):
    """Raised when results of a job that has not succeeded are requested."""

    def __init__(self, job_id: str, state: str) -> None:
        super().__init__(f"job_not_finished: {job_id} is {state}")
        self.job_id = job_id
        self.state = state


class IllegalTransition(ServiceError):
    """Raised on a job state change outside pending -> running -> terminal."""
