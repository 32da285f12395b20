"""结构化日志配置模块。

使用 structlog 提供结构化日志支持，支持 JSON 和控制台两种输出格式。
"""

import logging
import sys
from typing import Any, cast

import structlog
from structlog.types import Processor

from carbon_tables.config import LogFormat, Settings, get_settings


def setup_logging(settings: Settings | None = None) -> None:
    """配置结构化日志系统。

    根据配置设置日志级别和输出格式。

    Args:
        settings: 显式传入的配置，为 None 时使用全局配置。
    """
    settings = settings or get_settings()

    log_level = getattr(logging, settings.log_level)
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=log_level,
    )
    # 请求日志由服务中间件统一记录，压低第三方访问日志
    for noisy in ("uvicorn.access", "httpx", "httpcore"):
        logging.getLogger(noisy).setLevel(max(log_level, logging.WARNING))

    # 共享处理器
    shared_processors: list[Processor] = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.UnicodeDecoder(),
    ]

    # 根据格式选择渲染器
    if settings.log_format == LogFormat.JSON:
        processors: list[Processor] = [
            *shared_processors,
            structlog.processors.format_exc_info,
            structlog.processors.JSONRenderer(),
        ]
    else:
        processors = [
            *shared_processors,
            structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty()),
        ]

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )


def get_logger(name: str | None = None) -> structlog.stdlib.BoundLogger:
    """获取结构化日志记录器。

    Args:
        name: 日志记录器名称，通常为模块路径。

    Returns:
        结构化日志记录器实例。
    """
    return cast(structlog.stdlib.BoundLogger, structlog.get_logger(name))


# 便捷日志函数
def log_job_transition(
    logger: structlog.stdlib.BoundLogger,
    *,
    job_id: str,
    state: str,
    **kwargs: Any,
) -> None:
    """记录任务状态迁移。"""
    level = "warning" if state == "failed" else "info"
    getattr(logger, level)("job_transition", job_id=job_id, state=state, **kwargs)


def log_request(
    logger: structlog.stdlib.BoundLogger,
    *,
    method: str,
    path: str,
    status: int,
    latency_ms: float,
    **kwargs: Any,
) -> None:
    """记录 HTTP 请求。"""
    level = "info" if status < 500 else "error"
    getattr(logger, level)(
        "http_request",
        method=method,
        path=path,
        status=status,
        latency_ms=round(latency_ms, 2),
        **kwargs,
    )


def log_skip(
    logger: structlog.stdlib.BoundLogger,
    *,
    reason: str,
    doc: str | None,
    table: int | None,
    **kwargs: Any,
) -> None:
    """以 debug 级别记录整合跳过项。"""
    logger.debug("consolidation_skip", reason=reason, doc=doc, table=table, **kwargs)
