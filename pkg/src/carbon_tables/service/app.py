"""FastAPI application: upload, consolidate, poll, download and query."""

from __future__ import annotations

import threading
import uuid
from collections.abc import AsyncIterator, Awaitable, Callable
from contextlib import asynccontextmanager
from dataclasses import dataclass
from time import perf_counter
from typing import Any

import structlog
from fastapi import APIRouter, FastAPI, File, Query, Request, Response, UploadFile, status
from fastapi.responses import JSONResponse

from carbon_tables import __version__
from carbon_tables.catalog.base import MaterialsBase
from carbon_tables.catalog.errors import CatalogError
from carbon_tables.catalog.loader import load_material_base
from carbon_tables.config import Settings, get_settings
from carbon_tables.consolidate.errors import UnknownFilterField
from carbon_tables.consolidate.models import ConsolidationOptions
from carbon_tables.consolidate.query import query_records
from carbon_tables.consolidate.serialize import record_to_dict
from carbon_tables.errors import CarbonTablesError
from carbon_tables.ingest.documents import parse_upload
from carbon_tables.ingest.errors import IngestError
from carbon_tables.pipeline import FEATURES_CSV_FILE, FEATURES_JSON_FILE, GRAPH_FILE
from carbon_tables.service.errors import (
    DocumentNotFound,
    DuplicateDocument,
    JobNotFinished,
    JobNotFound,
)
from carbon_tables.service.jobs import JobRegistry, JobRunner, JobState
from carbon_tables.service.schemas import (
    ALL_DOCUMENTS,
    JobAccepted,
    JobRequest,
    KnowledgePage,
    UploadResponse,
)
from carbon_tables.service.store import DocumentStore
from carbon_tables.utils.logging import get_logger, log_request

logger = get_logger("carbon_tables.service")

PAGINATION_PARAMS = frozenset({"limit", "offset"})
# query-string spelling -> filter field
QUERY_ALIASES = {"fom": "fom_id"}

_ERROR_STATUS: tuple[tuple[type[Exception], int], ...] = (
    (DocumentNotFound, status.HTTP_404_NOT_FOUND),
    (JobNotFound, status.HTTP_404_NOT_FOUND),
    (DuplicateDocument, status.HTTP_409_CONFLICT),
    (JobNotFinished, status.HTTP_409_CONFLICT),
    (UnknownFilterField, status.HTTP_400_BAD_REQUEST),
    (IngestError, status.HTTP_400_BAD_REQUEST),
    (CatalogError, status.HTTP_500_INTERNAL_SERVER_ERROR),
)


class SnapshotHolder:
    """Current knowledge-base snapshot; reloading swaps in a new one."""

    def __init__(self, mb: MaterialsBase) -> None:
        self._mb = mb
        self._lock = threading.Lock()

    def get(self) -> MaterialsBase:
        with self._lock:
            return self._mb

    def replace(self, mb: MaterialsBase) -> None:
        with self._lock:
            self._mb = mb


@dataclass(slots=True)
class ServiceContext:
    settings: Settings
    store: DocumentStore
    registry: JobRegistry
    snapshot: SnapshotHolder


router = APIRouter()


def _context(request: Request) -> ServiceContext:
    context: ServiceContext = request.app.state.context
    return context


@router.get("/health")
def health(request: Request) -> dict[str, Any]:
    ctx = _context(request)
    counts = {state.value: 0 for state in JobState}
    for job in ctx.registry.all_jobs():
        counts[job.state.value] += 1
    return {
        "status": "ok",
        "version": __version__,
        "jobs": counts,
        "in_flight": ctx.registry.in_flight,
    }


@router.post("/documents", response_model=UploadResponse)
def upload_documents(
    request: Request,
    response: Response,
    file: UploadFile | None = File(None),
    overwrite: bool = False,
) -> UploadResponse | JSONResponse:
    """Upload one annotated .json document or a .zip of them."""
    ctx = _context(request)
    limit = ctx.settings.max_upload_bytes
    if file is None:
        return _bad_upload("missing_file")

    declared = request.headers.get("content-length")
    if declared is not None and declared.isdigit() and int(declared) > limit + 64 * 1024:
        return _too_large(limit)
    data = file.file.read(limit + 1)
    if len(data) > limit:
        return _too_large(limit)

    filename = file.filename or "upload.json"
    documents, report = parse_upload(data, filename, max_uncompressed_bytes=limit)
    is_archive = filename.lower().endswith(".zip")

    body = UploadResponse(
        rejected=[{"filename": name, "reason": reason} for name, reason in report.rejected],
        warnings=[{"doc_id": doc_id, "warning": text} for doc_id, text in report.warnings],
    )
    for document in documents:
        try:
            ctx.store.put(document, overwrite=overwrite)
        except DuplicateDocument as exc:
            if not is_archive:
                raise
            body.rejected.append(
                {"filename": document.source_filename, "reason": f"DuplicateDocument: {exc.doc_id}"}
            )
            continue
        body.accepted.append(document.doc_id)
        body.stored.append(document.doc_id)

    response.status_code = (
        status.HTTP_207_MULTI_STATUS if body.rejected else status.HTTP_201_CREATED
    )
    logger.info(
        "upload_processed",
        filename=filename,
        accepted=len(body.accepted),
        rejected=len(body.rejected),
    )
    return body


@router.get("/documents")
def list_documents(request: Request) -> dict[str, list[str]]:
    return {"document_ids": _context(request).store.list_ids()}


@router.post("/jobs", status_code=status.HTTP_202_ACCEPTED, response_model=JobAccepted)
def submit_job(request: Request, body: JobRequest) -> JobAccepted | JSONResponse:
    """Queue a consolidation job; the work happens on the job pool."""
    ctx = _context(request)
    if body.document_ids == ALL_DOCUMENTS:
        document_ids = ctx.store.list_ids()
        if not document_ids:
            return JSONResponse(
                status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
                content={"detail": "no_documents_stored"},
            )
    else:
        document_ids = list(body.document_ids)
        for doc_id in document_ids:
            if not ctx.store.exists(doc_id):
                raise DocumentNotFound(doc_id)

    options = body.options or ConsolidationOptions(
        process_known_materials=ctx.settings.process_known_materials
    )
    job = ctx.registry.submit(document_ids, options)
    return JobAccepted(job_id=job.job_id, state=job.state.value)


@router.get("/jobs")
def list_jobs(request: Request) -> list[dict[str, Any]]:
    return [job.model_dump(mode="json") for job in _context(request).registry.all_jobs()]


@router.get("/jobs/{job_id}")
def job_status(request: Request, job_id: str) -> dict[str, Any]:
    return _context(request).registry.get(job_id).model_dump(mode="json")


@router.get("/jobs/{job_id}/result")
def job_result(request: Request, job_id: str) -> Response:
    data = _context(request).registry.result_bytes(job_id, GRAPH_FILE)
    return Response(content=data, media_type="application/json")


@router.get("/jobs/{job_id}/features")
def job_features(
    request: Request,
    job_id: str,
    fmt: str = Query("csv", alias="format", pattern="^(csv|json)$"),
) -> Response:
    registry = _context(request).registry
    if fmt == "json":
        data = registry.result_bytes(job_id, FEATURES_JSON_FILE)
        return Response(data, media_type="application/json")
    return Response(registry.result_bytes(job_id, FEATURES_CSV_FILE), media_type="text/csv")


@router.get("/knowledge", response_model=KnowledgePage)
def knowledge(
    request: Request,
    limit: int = Query(100, ge=1, le=1000),
    offset: int = Query(0, ge=0),
) -> KnowledgePage | JSONResponse:
    """Measurements over the union of all succeeded jobs."""
    filters: dict[str, str] = {}
    for key, value in request.query_params.items():
        if key in PAGINATION_PARAMS:
            continue
        filters[QUERY_ALIASES.get(key, key)] = value

    graph = _context(request).registry.knowledge_graph()
    try:
        records = query_records(graph, filters)
    except ValueError as exc:
        return JSONResponse(status_code=status.HTTP_400_BAD_REQUEST, content={"detail": str(exc)})
    page = records[offset : offset + limit]
    return KnowledgePage(
        total=len(records),
        limit=limit,
        offset=offset,
        items=[record_to_dict(record) for record in page],
    )


@router.get("/catalog")
def catalog_summary(request: Request) -> dict[str, object]:
    return _context(request).snapshot.get().summary()


@router.post("/catalog/reload")
def catalog_reload(request: Request) -> dict[str, object]:
    """Load the knowledge base again; jobs submitted afterwards use the new snapshot."""
    ctx = _context(request)
    mb = load_material_base(ctx.settings.mb_path)
    ctx.snapshot.replace(mb)
    logger.info("catalog_reloaded", source=mb.source)
    return mb.summary()


def create_app(
    settings: Settings | None = None,
    *,
    mb: MaterialsBase | None = None,
    runner: JobRunner | None = None,
) -> FastAPI:
    """Build the application and its store, registry and snapshot.

    Args:
        settings: Service settings; the global instance when omitted.
        mb: Initial knowledge base; loaded from ``settings.mb_path`` when omitted.
        runner: Job work function; the full consolidation pipeline by default.
    """
    settings = settings or get_settings()
    settings.ensure_directories()
    snapshot = SnapshotHolder(mb or load_material_base(settings.mb_path))
    store = DocumentStore(settings.documents_dir)
    registry = JobRegistry(
        store,
        settings.jobs_dir,
        settings.results_dir,
        max_concurrent_jobs=settings.max_concurrent_jobs,
        runner=runner,
        snapshot=snapshot.get,
    )

    @asynccontextmanager
    async def lifespan(_: FastAPI) -> AsyncIterator[None]:
        logger.info(
            "service_started", listen_addr=settings.listen_addr, data_dir=str(settings.data_dir)
        )
        yield
        registry.shutdown(wait=False)
        logger.info("service_stopped")

    app = FastAPI(title="Carbon Tables", version=__version__, lifespan=lifespan)
    app.state.context = ServiceContext(settings, store, registry, snapshot)
    app.include_router(router)
    app.add_exception_handler(CarbonTablesError, _domain_error_handler)
    app.middleware("http")(_request_logging)
    return app


async def _domain_error_handler(request: Request, exc: Exception) -> JSONResponse:
    code = status.HTTP_500_INTERNAL_SERVER_ERROR
    for error_type, mapped in _ERROR_STATUS:
        if isinstance(exc, error_type):
            code = mapped
            break
    return JSONResponse(status_code=code, content={"detail": str(exc), "error": type(exc).__name__})


async def _request_logging(
    request: Request,
    call_next: Callable[[Request], Awaitable[Response]],
) -> Response:
    started = perf_counter()
    with structlog.contextvars.bound_contextvars(request_id=uuid.uuid4().hex[:12]):
        response = await call_next(request)
        job_id = request.scope.get("path_params", {}).get("job_id")
        log_request(
            logger,
            method=request.method,
            path=request.url.path,
            status=response.status_code,
            latency_ms=(perf_counter() - started) * 1000,
            **({"job_id": job_id} if job_id else {}),
        )
    return response


def _too_large(limit: int) -> JSONResponse:
    return JSONResponse(
        status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE,
        content={"detail": f"upload_too_large: limit {limit} bytes"},
    )


def _bad_upload(detail: str) -> JSONResponse:
    return JSONResponse(status_code=status.HTTP_400_BAD_REQUEST, content={"detail": detail})
