"""客户端模块 - 整合服务的 HTTP 客户端。"""

from carbon_tables.client.errors import (
    ClientConnectionError,
    ClientError,
    ClientHTTPError,
    JobFailedError,
)
from carbon_tables.client.http import CarbonTablesClient

__all__ = [
    "CarbonTablesClient",
    "ClientConnectionError",
    "ClientError",
    "ClientHTTPError",
    "JobFailedError",
]
