"""配置加载模块 - 从环境变量和 .env 文件加载配置。"""

from enum import Enum
from pathlib import Path
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_MB_PATH = Path(__file__).parent / "catalog" / "data" / "default_mb.json"


class LogFormat(str, Enum):
    """日志输出格式。"""

    JSON = "json"
    CONSOLE = "console"


class Settings(BaseSettings):
    """服务配置。

    从 .env 文件加载，环境变量优先。
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # ==================== 服务 ====================
    listen_addr: str = Field(
        default="127.0.0.1:8080",
        description="API 监听地址，格式 host:port",
    )
    max_upload_bytes: int = Field(
        default=50 * 1024 * 1024,
        ge=1,
        description="单次上传的最大字节数，同时限制 zip 解压后的总大小",
    )

    # ==================== 任务 ====================
    max_concurrent_jobs: int = Field(
        default=2,
        ge=1,
        le=64,
        description="同时处于 Running 状态的整合任务上限",
    )
    process_known_materials: bool = Field(
        default=False,
        description="是否默认整合仅含参考材料的表格",
    )

    # ==================== 存储 ====================
    data_dir: Path = Field(
        default=Path("data"),
        description="文档库、任务日志与结果的根目录",
    )
    mb_path: Path = Field(
        default=DEFAULT_MB_PATH,
        description="材料知识库 JSON 文件",
    )

    # ==================== 日志配置 ====================
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="INFO",
        description="日志级别",
    )
    log_format: LogFormat = Field(
        default=LogFormat.CONSOLE,
        description="日志输出格式",
    )

    @field_validator("data_dir", "mb_path", mode="before")
    @classmethod
    def parse_path(cls, v: str | Path) -> Path:
        """将字符串转换为 Path。"""
        return Path(v) if isinstance(v, str) else v

    @field_validator("listen_addr")
    @classmethod
    def check_listen_addr(cls, v: str) -> str:
        host, sep, port = v.rpartition(":")
        if not sep or not host or not port.isdigit() or not 0 < int(port) < 65536:
            raise ValueError(f"listen_addr_must_be_host_port: {v}")
        return v

    @property
    def host(self) -> str:
        return self.listen_addr.rpartition(":")[0]

    @property
    def port(self) -> int:
        return int(self.listen_addr.rpartition(":")[2])

    @property
    def documents_dir(self) -> Path:
        return self.data_dir / "documents"

    @property
    def jobs_dir(self) -> Path:
        return self.data_dir / "jobs"

    @property
    def results_dir(self) -> Path:
        return self.data_dir / "results"

    def ensure_directories(self) -> None:
        """确保存储目录存在。"""
        for directory in (self.documents_dir, self.jobs_dir, self.results_dir):
            directory.mkdir(parents=True, exist_ok=True)


# 全局配置实例（延迟加载）
_settings: Settings | None = None


def get_settings() -> Settings:
    """获取全局配置实例。"""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reload_settings() -> Settings:
    """重新加载配置。"""
    global _settings
    _settings = Settings()
    return _settings


class CliSettings(BaseSettings):
    """命令行客户端默认值，命令行参数优先。"""

    model_config = SettingsConfigDict(
        env_prefix="CARBON_TABLES_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    server: str = Field(default="http://127.0.0.1:8080", description="服务地址")
    output: Path = Field(default=Path("out"), description="结果下载目录")
    poll_interval: float = Field(default=1.0, gt=0, description="状态轮询间隔（秒）")

    @field_validator("output", mode="before")
    @classmethod
    def parse_path(cls, v: str | Path) -> Path:
        return Path(v) if isinstance(v, str) else v
