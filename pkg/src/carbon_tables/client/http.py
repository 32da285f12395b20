"""HTTP client for the consolidation service."""

from __future__ import annotations

import time
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, Literal

import httpx
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from carbon_tables.client.errors import ClientConnectionError, ClientHTTPError, JobFailedError
from carbon_tables.utils.logging import get_logger

_TERMINAL = {"succeeded", "failed"}


class CarbonTablesClient:
    """Thin client over the REST API.

    GET requests are retried on transport errors; uploads and submissions
    are sent once.
    """

    def __init__(
        self,
        base_url: str,
        *,
        timeout: float = 30.0,
        http: httpx.Client | None = None,
    ) -> None:
        self._owns_http = http is None
        self._http = http or httpx.Client(base_url=base_url, timeout=timeout)
        self._logger = get_logger("carbon_tables.client")

    def __enter__(self) -> CarbonTablesClient:
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def close(self) -> None:
        if self._owns_http:
            self._http.close()

    def health(self) -> dict[str, Any]:
        return dict(self._get("/health").json())

    def upload(self, path: Path, *, overwrite: bool = False) -> dict[str, Any]:
        """Upload a .json document or .zip archive; 201 and 207 both count as success."""
        with path.open("rb") as handle:
            response = self._send(
                "POST",
                "/documents",
                params={"overwrite": "true"} if overwrite else None,
                files={"file": (path.name, handle, _content_type(path))},
            )
        return dict(response.json())

    def submit(
        self,
        document_ids: Sequence[str] | Literal["all"],
        *,
        process_known_materials: bool | None = None,
    ) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "document_ids": document_ids if isinstance(document_ids, str) else list(document_ids)
        }
        if process_known_materials is not None:
            payload["options"] = {"process_known_materials": process_known_materials}
        return dict(self._send("POST", "/jobs", json=payload).json())

    def status(self, job_id: str) -> dict[str, Any]:
        return dict(self._get(f"/jobs/{job_id}").json())

    def wait(
        self,
        job_id: str,
        *,
        poll_interval: float = 1.0,
        timeout: float | None = None,
    ) -> dict[str, Any]:
        """Poll until the job is terminal.

        Raises:
            JobFailedError: The job failed.
            TimeoutError: `timeout` seconds elapsed first.
        """
        deadline = None if timeout is None else time.monotonic() + timeout
        while True:
            job = self.status(job_id)
            if job["state"] in _TERMINAL:
                break
            if deadline is not None and time.monotonic() >= deadline:
                raise TimeoutError(f"job_wait_timeout: {job_id}")
            time.sleep(poll_interval)

        self._logger.info("job_finished", job_id=job_id, state=job["state"])
        if job["state"] == "failed":
            raise JobFailedError(job_id, str(job.get("error") or ""))
        return job

    def download_result(self, job_id: str) -> bytes:
        return self._get(f"/jobs/{job_id}/result").content

    def download_features(self, job_id: str, fmt: Literal["csv", "json"] = "csv") -> bytes:
        return self._get(f"/jobs/{job_id}/features", params={"format": fmt}).content

    def query(
        self,
        filters: Mapping[str, Any] | None = None,
        *,
        limit: int = 100,
        offset: int = 0,
    ) -> dict[str, Any]:
        params = {key: str(value) for key, value in (filters or {}).items()}
        params.update(limit=str(limit), offset=str(offset))
        return dict(self._get("/knowledge", params=params).json())

    def query_all(
        self,
        filters: Mapping[str, Any] | None = None,
        *,
        page_size: int = 1000,
    ) -> list[dict[str, Any]]:
        """Every matching record, following pagination."""
        items: list[dict[str, Any]] = []
        offset = 0
        while True:
            page = self.query(filters, limit=page_size, offset=offset)
            items.extend(page["items"])
            offset += len(page["items"])
            if not page["items"] or offset >= page["total"]:
                return items

    def catalog(self) -> dict[str, Any]:
        return dict(self._get("/catalog").json())

    @retry(
        retry=retry_if_exception_type(ClientConnectionError),
        wait=wait_exponential(multiplier=0.5, min=0.5, max=4),
        stop=stop_after_attempt(3),
        reraise=True,
    )
    def _get(self, path: str, params: Mapping[str, str] | None = None) -> httpx.Response:
        return self._send("GET", path, params=params)

    def _send(self, method: str, path: str, **kwargs: Any) -> httpx.Response:
        started = time.perf_counter()
        try:
            response = self._http.request(method, path, **kwargs)
        except httpx.TransportError as exc:
            self._logger.warning("server_unreachable", method=method, path=path, error=str(exc))
            raise ClientConnectionError(f"connection_failed: {exc}") from exc

        self._logger.debug(
            "http_response",
            method=method,
            path=path,
            status=response.status_code,
            latency_ms=round((time.perf_counter() - started) * 1000, 2),
        )
        if response.status_code >= 400:
            raise ClientHTTPError(response.status_code, _error_detail(response))
        return response


def _content_type(path: Path) -> str:
    return "application/zip" if path.suffix.lower() == ".zip" else "application/json"


def _error_detail(response: httpx.Response) -> str:
    """Read the `detail` field of an error body, falling back to the raw text."""
    try:
        payload = response.json()
    except ValueError:
        return response.text or response.reason_phrase
    if isinstance(payload, dict) and "detail" in payload:
        detail = payload["detail"]
        return detail if isinstance(detail, str) else str(detail)
    return response.text
