"""Consolidation jobs: lifecycle, journal and bounded worker pool."""

from __future__ import annotations

import json
import os
import threading
import uuid
from collections.abc import Callable, Sequence
from concurrent.futures import Future, ThreadPoolExecutor
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any

import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from carbon_tables.catalog.base import MaterialsBase
from carbon_tables.consolidate.corpus import merge_graphs
from carbon_tables.consolidate.models import ConsolidationOptions, KnowledgeGraph
from carbon_tables.consolidate.serialize import graph_from_json
from carbon_tables.errors import CarbonTablesError
from carbon_tables.ingest.models import AnnotatedDocument
from carbon_tables.pipeline import (
    FEATURES_CSV_FILE,
    FEATURES_JSON_FILE,
    GRAPH_FILE,
    ConsolidationArtifacts,
    build_artifacts,
    write_artifacts,
)
from carbon_tables.service.errors import IllegalTransition, JobNotFinished, JobNotFound
from carbon_tables.service.store import DocumentStore
from carbon_tables.utils.logging import get_logger, log_job_transition

logger = get_logger("carbon_tables.service.jobs")

INTERRUPTED_BY_RESTART = "interrupted_by_restart"
RESULT_FILES = (GRAPH_FILE, FEATURES_CSV_FILE, FEATURES_JSON_FILE)

JobRunner = Callable[
    [Sequence[AnnotatedDocument], MaterialsBase, ConsolidationOptions],
    ConsolidationArtifacts,
]


class JobState(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    SUCCEEDED = "succeeded"
    FAILED = "failed"


TERMINAL_STATES: frozenset[JobState] = frozenset({JobState.SUCCEEDED, JobState.FAILED})

_ALLOWED_TRANSITIONS: dict[JobState, frozenset[JobState]] = {
    JobState.PENDING: frozenset({JobState.RUNNING}),
    JobState.RUNNING: TERMINAL_STATES,
    JobState.SUCCEEDED: frozenset(),
    JobState.FAILED: frozenset(),
}


class ConsolidationJob(BaseModel):
    """One consolidation request and its lifecycle."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    job_id: str
    state: JobState = JobState.PENDING
    submitted_at: datetime
    started_at: datetime | None = None
    finished_at: datetime | None = None
    document_ids: list[str]
    options: ConsolidationOptions = Field(default_factory=ConsolidationOptions)
    result_ref: str | None = None
    error: str | None = None

    @model_validator(mode="after")
    def check_outcome_fields(self) -> ConsolidationJob:
        if (self.result_ref is not None) != (self.state == JobState.SUCCEEDED):
            raise ValueError("result_ref_iff_succeeded")
        if (self.error is not None) != (self.state == JobState.FAILED):
            raise ValueError("error_iff_failed")
        return self

    @property
    def is_terminal(self) -> bool:
        return self.state in TERMINAL_STATES

    def transition(self, state: JobState, **changes: Any) -> ConsolidationJob:
        """Return a copy in `state`; raises IllegalTransition outside the lifecycle."""
        if state not in _ALLOWED_TRANSITIONS[self.state]:
            raise IllegalTransition(
                f"illegal_transition: {self.job_id} {self.state.value} -> {state.value}"
            )
        payload = {**self.model_dump(), **changes, "state": state}
        return ConsolidationJob.model_validate(payload)


class JobJournal:
    """Append-only JSONL file of job snapshots."""

    def __init__(self, path: Path) -> None:
        self._path = path
        self._path.parent.mkdir(parents=True, exist_ok=True)
        self._terminate_torn_line()

    @property
    def path(self) -> Path:
        return self._path

    def append(self, job: ConsolidationJob) -> None:
        record = {
            "timestamp": _now().isoformat(),
            "event_type": "job_snapshot",
            "payload": job.model_dump(mode="json"),
        }
        with self._path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(record, ensure_ascii=True) + "\n")

    def replay(self) -> dict[str, ConsolidationJob]:
        """Latest snapshot per job, in first-submission order; torn lines are skipped."""
        if not self._path.exists():
            return {}
        jobs: dict[str, ConsolidationJob] = {}
        for line in self._path.read_text(encoding="utf-8", errors="replace").splitlines():
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                job = ConsolidationJob.model_validate(record["payload"])
            except (ValueError, KeyError, TypeError):
                logger.warning("journal_line_skipped", path=str(self._path))
                continue
            jobs[job.job_id] = job
        return jobs

    def _terminate_torn_line(self) -> None:
        if not self._path.exists() or self._path.stat().st_size == 0:
            return
        with self._path.open("rb+") as f:
            f.seek(-1, os.SEEK_END)
            if f.read(1) != b"\n":
                f.write(b"\n")


class JobRegistry:
    """Job table backed by the journal, executing jobs on a bounded thread pool.

    All state changes go through one lock and are journaled before they
    become visible, so pollers only ever observe legal transitions.
    """

    def __init__(
        self,
        store: DocumentStore,
        jobs_dir: Path,
        results_dir: Path,
        *,
        max_concurrent_jobs: int = 2,
        runner: JobRunner | None = None,
        snapshot: Callable[[], MaterialsBase],
    ) -> None:
        self._store = store
        self._results_dir = results_dir
        self._results_dir.mkdir(parents=True, exist_ok=True)
        self._journal = JobJournal(jobs_dir / "journal.jsonl")
        self._runner: JobRunner = runner or _default_runner
        self._snapshot = snapshot
        self._lock = threading.Lock()
        self._jobs: dict[str, ConsolidationJob] = {}
        self._snapshots: dict[str, MaterialsBase] = {}
        self._knowledge: tuple[tuple[str, ...], KnowledgeGraph] | None = None
        self._futures: dict[str, Future[None]] = {}
        self._pool = ThreadPoolExecutor(
            max_workers=max_concurrent_jobs,
            thread_name_prefix="job",
        )
        self._recover()

    def submit(
        self,
        document_ids: Sequence[str],
        options: ConsolidationOptions,
    ) -> ConsolidationJob:
        """Queue a job and return it in the pending state without doing any work."""
        job = ConsolidationJob(
            job_id=str(uuid.uuid4()),
            submitted_at=_now(),
            document_ids=list(document_ids),
            options=options,
        )
        mb = self._snapshot()
        with self._lock:
            self._journal.append(job)
            self._jobs[job.job_id] = job
            self._snapshots[job.job_id] = mb
        log_job_transition(
            logger, job_id=job.job_id, state=job.state.value, documents=len(document_ids)
        )
        self._enqueue(job.job_id)
        return job

    def get(self, job_id: str) -> ConsolidationJob:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise JobNotFound(job_id)
        return job

    @property
    def in_flight(self) -> int:
        """Jobs queued on or running in the worker pool."""
        with self._lock:
            return len(self._futures)

    def all_jobs(self) -> list[ConsolidationJob]:
        with self._lock:
            return sorted(self._jobs.values(), key=lambda job: (job.submitted_at, job.job_id))

    def result_bytes(self, job_id: str, name: str) -> bytes:
        """Bytes of one stored result file of a succeeded job."""
        if name not in RESULT_FILES:
            raise ValueError(f"unknown_result_file: {name}")
        job = self.get(job_id)
        if job.state != JobState.SUCCEEDED:
            raise JobNotFinished(job_id, job.state.value)
        return (self._results_dir / job_id / name).read_bytes()

    def knowledge_graph(self) -> KnowledgeGraph:
        """Merge of every succeeded job's graph, oldest start first.

        Rebuilt only when the set of succeeded jobs changes.
        """
        with self._lock:
            succeeded = sorted(
                (job for job in self._jobs.values() if job.state == JobState.SUCCEEDED),
                key=lambda job: (job.started_at or job.submitted_at, job.job_id),
            )
            key = tuple(job.job_id for job in succeeded)
            if self._knowledge is not None and self._knowledge[0] == key:
                return self._knowledge[1]
        graph = merge_graphs(
            graph_from_json(self.result_bytes(job_id, GRAPH_FILE)) for job_id in key
        )
        with self._lock:
            self._knowledge = (key, graph)
        logger.info("knowledge_graph_rebuilt", jobs=len(key), measurements=len(graph.measurements))
        return graph

    def wait(self, job_id: str, timeout: float | None = None) -> ConsolidationJob:
        """Block until the job's worker returns (tests and the CLI server mode)."""
        with self._lock:
            future = self._futures.get(job_id)
        if future is not None:
            future.result(timeout=timeout)
        return self.get(job_id)

    def shutdown(self, wait: bool = True) -> None:
        self._pool.shutdown(wait=wait, cancel_futures=not wait)

    def _enqueue(self, job_id: str) -> None:
        future = self._pool.submit(self._execute, job_id)
        with self._lock:
            self._futures[job_id] = future
        future.add_done_callback(lambda _: self._forget(job_id))

    def _forget(self, job_id: str) -> None:
        with self._lock:
            self._futures.pop(job_id, None)

    def _execute(self, job_id: str) -> None:
        with structlog.contextvars.bound_contextvars(job_id=job_id):
            job = self._set(job_id, JobState.RUNNING, started_at=_now())
            mb = self._snapshots.pop(job_id, None) or self._snapshot()
            try:
                documents = [self._store.get(doc_id) for doc_id in job.document_ids]
                artifacts = self._runner(documents, mb, job.options)
                out_dir = self._results_dir / job_id
                write_artifacts(artifacts, out_dir)
            except (CarbonTablesError, OSError, ValueError) as exc:
                self._set(job_id, JobState.FAILED, finished_at=_now(), error=str(exc))
                return
            except Exception as exc:  # noqa: BLE001
                logger.exception("job_crashed")
                self._set(
                    job_id, JobState.FAILED, finished_at=_now(), error=f"internal_error: {exc}"
                )
                return
            self._set(
                job_id,
                JobState.SUCCEEDED,
                finished_at=_now(),
                result_ref=f"results/{job_id}",
            )

    def _set(self, job_id: str, state: JobState, **changes: Any) -> ConsolidationJob:
        with self._lock:
            job = self._jobs[job_id].transition(state, **changes)
            self._journal.append(job)
            self._jobs[job_id] = job
        log_job_transition(logger, job_id=job_id, state=state.value, error=job.error)
        return job

    def _recover(self) -> None:
        recovered = self._journal.replay()
        requeue: list[str] = []
        for job_id, job in recovered.items():
            self._jobs[job_id] = job
            if job.state == JobState.RUNNING:
                self._set(job_id, JobState.FAILED, finished_at=_now(), error=INTERRUPTED_BY_RESTART)
            elif job.state == JobState.PENDING:
                requeue.append(job_id)
            elif job.state == JobState.SUCCEEDED and not (self._results_dir / job_id).is_dir():
                logger.warning("job_results_missing", job_id=job_id)
        for job_id in requeue:
            self._enqueue(job_id)
        if recovered:
            logger.info("jobs_recovered", jobs=len(recovered), requeued=len(requeue))


def _default_runner(
    documents: Sequence[AnnotatedDocument],
    mb: MaterialsBase,
    options: ConsolidationOptions,
) -> ConsolidationArtifacts:
    return build_artifacts(documents, mb, options)


def _now() -> datetime:
    return datetime.now(timezone.utc)
