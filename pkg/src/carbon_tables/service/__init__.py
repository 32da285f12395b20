"""服务模块 - 整合流水线之上的异步 REST 服务。"""

from carbon_tables.service.app import ServiceContext, SnapshotHolder, create_app
from carbon_tables.service.errors import (
    DocumentNotFound,
    DuplicateDocument,
    IllegalTransition,
    JobNotFinished,
    JobNotFound,
    ServiceError,
)
from carbon_tables.service.jobs import (
    INTERRUPTED_BY_RESTART,
    TERMINAL_STATES,
    ConsolidationJob,
    JobJournal,
    JobRegistry,
    JobState,
)
from carbon_tables.service.store import DocumentStore

__all__ = [
    "INTERRUPTED_BY_RESTART",
    "TERMINAL_STATES",
    "ConsolidationJob",
    "DocumentNotFound",
    "DocumentStore",
    "DuplicateDocument",
    "IllegalTransition",
    "JobJournal",
    "JobNotFinished",
    "JobNotFound",
    "JobRegistry",
    "JobState",
    "ServiceContext",
    "ServiceError",
    "SnapshotHolder",
    "create_app",
]
