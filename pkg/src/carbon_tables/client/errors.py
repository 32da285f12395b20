"""Client-side errors."""

from __future__ import annotations

from carbon_tables.errors import CarbonTablesError


class ClientError(CarbonTablesError):
    """Base client error."""


class ClientConnectionError(ClientError):
    """Raised when the server cannot be reached."""


class ClientHTTPError(ClientError):
    """Raised on an HTTP error status from the server."""

    def __init__(self, status: int, detail: str) -> None:
        super().__init__(f"http_{status}: {detail}")
        self.status = status
        self.detail = detail


class JobFailedError(ClientError):
    """Raised when a waited-on job ends in the failed state."""

    def __init__(self, job_id: str, error: str) -> None:
        super().__init__(f"job_failed: {job_id}: {error}")
        self.job_id = job_id
        self.error = error
