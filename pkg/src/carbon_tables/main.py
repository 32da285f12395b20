"""CLI 入口模块 - 调用整合服务，或在本地离线运行流水线。"""

from __future__ import annotations

import json
import sys
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, NoReturn

import click

from carbon_tables import __version__
from carbon_tables.catalog.errors import CatalogError
from carbon_tables.catalog.loader import load_material_base
from carbon_tables.client.errors import ClientConnectionError, ClientHTTPError, JobFailedError
from carbon_tables.client.http import CarbonTablesClient
from carbon_tables.config import CliSettings, get_settings
from carbon_tables.consolidate.errors import UnknownFilterField
from carbon_tables.consolidate.models import ConsolidationOptions
from carbon_tables.consolidate.query import query_records
from carbon_tables.consolidate.serialize import graph_from_json, record_to_dict
from carbon_tables.ingest.errors import IngestError
from carbon_tables.pipeline import FEATURES_CSV_FILE, FEATURES_JSON_FILE, GRAPH_FILE, run_offline
from carbon_tables.utils.files import atomic_write_bytes
from carbon_tables.utils.logging import get_logger, setup_logging

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NETWORK = 3
EXIT_SERVER = 4
EXIT_JOB_FAILED = 5

ClientFactory = Callable[[str], CarbonTablesClient]


@dataclass(slots=True)
class CliConfig:
    """单次调用生效的客户端配置。"""

    server_url: str | None
    output_dir: Path
    poll_interval: float
    offline: bool = False
    mb_path: Path | None = None

    def __post_init__(self) -> None:
        if self.poll_interval <= 0:
            raise ValueError("poll_interval_must_be_positive")
        if self.offline:
            self.server_url = None
        elif not self.server_url:
            raise ValueError("server_url_required_online")


@dataclass(slots=True)
class CliContext:
    config: CliConfig
    client_factory: ClientFactory

    def client(self) -> CarbonTablesClient:
        if self.config.server_url is None:
            raise click.UsageError("该命令需要连接服务，请去掉 --offline")
        return self.client_factory(self.config.server_url)


@click.group(invoke_without_command=True)
@click.option("--version", "-v", is_flag=True, help="显示版本号")
@click.option("--server", default=None, help="服务地址")
@click.option(
    "--output",
    type=click.Path(path_type=Path, file_okay=False),
    default=None,
    help="结果文件目录",
)
@click.option("--poll-interval", type=float, default=None, help="状态轮询间隔（秒）")
@click.option("--offline", is_flag=True, default=False, help="离线模式，直接处理本地文件")
@click.option(
    "--mb",
    "mb_path",
    type=click.Path(path_type=Path, dir_okay=False),
    default=None,
    help="材料知识库 JSON（离线模式）",
)
@click.pass_context
def cli(
    ctx: click.Context,
    version: bool,
    server: str | None,
    output: Path | None,
    poll_interval: float | None,
    offline: bool,
    mb_path: Path | None,
) -> None:
    """Carbon Tables - 从论文标注表格中提取碳捕集材料的性能指标。

    上传标注表格 → 整合为知识图谱 → 下载图谱与特征向量 → 查询测量值
    """
    if version:
        click.echo(f"carbon-tables version {__version__}")
        return

    setup_logging()
    defaults = CliSettings()
    try:
        config = CliConfig(
            server_url=server or defaults.server,
            output_dir=output or defaults.output,
            poll_interval=poll_interval if poll_interval is not None else defaults.poll_interval,
            offline=offline,
            mb_path=mb_path,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc

    factory: ClientFactory = ctx.obj if callable(ctx.obj) else CarbonTablesClient
    ctx.obj = CliContext(config=config, client_factory=factory)

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@cli.command()
@click.argument("path", type=click.Path(path_type=Path, exists=True, dir_okay=False))
@click.option(
    "--overwrite",
    is_flag=True,
    default=False,
    help="覆盖已存在的同名 doc_id 文档",
)
@click.pass_obj
def upload(obj: CliContext, path: Path, overwrite: bool) -> None:
    """上传单个标注 .json 文档或 .zip 压缩包。"""
    with _client_errors(), obj.client() as client:
        report = client.upload(path, overwrite=overwrite)
    _echo_json(report)


@cli.command()
@click.argument("doc_ids", nargs=-1)
@click.option(
    "--all", "all_documents", is_flag=True, default=False, help="使用全部已存储文档"
)
@click.option("--wait", is_flag=True, default=False, help="轮询直到任务结束")
@click.option(
    "--process-known-materials/--skip-known-materials",
    default=None,
    help="覆盖服务端对参考材料表格的默认处理",
)
@click.pass_obj
def consolidate(
    obj: CliContext,
    doc_ids: tuple[str, ...],
    all_documents: bool,
    wait: bool,
    process_known_materials: bool | None,
) -> None:
    """对 DOC_IDS（或 --all）启动整合任务。"""
    if bool(doc_ids) == all_documents:
        raise click.UsageError("DOC_IDS 与 --all 必须二选一")

    with _client_errors(), obj.client() as client:
        accepted = client.submit(
            "all" if all_documents else list(doc_ids),
            process_known_materials=process_known_materials,
        )
        if not wait:
            _echo_json(accepted)
            return
        job = client.wait(accepted["job_id"], poll_interval=obj.config.poll_interval)
    _echo_json(job)


@cli.command()
@click.argument("job_id")
@click.pass_obj
def status(obj: CliContext, job_id: str) -> None:
    """查看任务状态。"""
    with _client_errors(), obj.client() as client:
        _echo_json(client.status(job_id))


@cli.command()
@click.argument("job_id")
@click.argument("out", type=click.Path(path_type=Path, file_okay=False), required=False)
@click.pass_obj
def download(obj: CliContext, job_id: str, out: Path | None) -> None:
    """将已完成任务的图谱与特征文件下载到 OUT。"""
    out_dir = out or obj.config.output_dir
    with _client_errors(), obj.client() as client:
        files = {
            GRAPH_FILE: client.download_result(job_id),
            FEATURES_CSV_FILE: client.download_features(job_id, "csv"),
            FEATURES_JSON_FILE: client.download_features(job_id, "json"),
        }
    for name, data in files.items():
        atomic_write_bytes(out_dir / name, data)
    click.echo(str(out_dir / GRAPH_FILE))


@cli.command()
@click.option("--category", default=None, help="FoM 或材料的技术类别")
@click.option("--material", default=None, help="材料规范名称")
@click.option("--fom", "fom_id", default=None, help="FoM 标识")
@click.option("--min-value", type=float, default=None)
@click.option("--max-value", type=float, default=None)
@click.option(
    "--filter", "raw_filters", multiple=True, help="额外过滤条件 key=value，可重复传入"
)
@click.pass_obj
def query(
    obj: CliContext,
    category: str | None,
    material: str | None,
    fom_id: str | None,
    min_value: float | None,
    max_value: float | None,
    raw_filters: tuple[str, ...],
) -> None:
    """查询测量值（服务端全部结果，--offline 时查询 OUTPUT/graph.json）。"""
    filters: dict[str, Any] = _parse_filters(raw_filters)
    shortcuts = {
        "category": category,
        "material": material,
        "fom_id": fom_id,
        "min_value": min_value,
        "max_value": max_value,
    }
    filters.update({key: value for key, value in shortcuts.items() if value is not None})

    if obj.config.offline:
        graph_path = obj.config.output_dir / GRAPH_FILE
        if not graph_path.is_file():
            raise click.UsageError(f"找不到图谱文件 {graph_path}，请先执行 `carbon-tables run`")
        graph = graph_from_json(graph_path.read_bytes())
        try:
            records = query_records(graph, filters)
        except (UnknownFilterField, ValueError) as exc:
            raise click.UsageError(str(exc)) from exc
        _echo_json([record_to_dict(record) for record in records])
        return

    server_filters = {("fom" if key == "fom_id" else key): value for key, value in filters.items()}
    with _client_errors(), obj.client() as client:
        _echo_json(client.query_all(server_filters))


@cli.command()
@click.argument("corpus", type=click.Path(path_type=Path, exists=True))
@click.argument("mb", type=click.Path(path_type=Path, exists=True, dir_okay=False), required=False)
@click.argument("out", type=click.Path(path_type=Path, file_okay=False), required=False)
@click.option("--process-known-materials", is_flag=True, default=False)
@click.option("--workers", type=click.IntRange(1, 64), default=1, show_default=True)
@click.pass_obj
def run(
    obj: CliContext,
    corpus: Path,
    mb: Path | None,
    out: Path | None,
    process_known_materials: bool,
    workers: int,
) -> None:
    """在本地对 CORPUS 执行导入 → 整合 → 特征编码。

    CORPUS 可以是 .json 文档、.zip 压缩包或包含 .json 文件的目录。
    """
    logger = get_logger("carbon_tables.main")
    mb_path = mb or obj.config.mb_path or get_settings().mb_path
    out_dir = out or obj.config.output_dir
    try:
        materials_base = load_material_base(mb_path)
        result = run_offline(
            corpus,
            materials_base,
            out_dir,
            ConsolidationOptions(process_known_materials=process_known_materials),
            max_workers=workers,
        )
    except (CatalogError, IngestError) as exc:
        logger.error("offline_run_failed", error=str(exc))
        _fail(EXIT_USAGE, str(exc))

    for filename, reason in result.report.rejected:
        click.echo(f"rejected {filename}: {reason}", err=True)
    _echo_json(
        {
            "output_dir": str(result.output_dir),
            "documents": result.documents,
            "materials": result.materials,
            "measurements": result.measurements,
        }
    )


@cli.command()
def serve() -> None:
    """启动 REST 服务（LISTEN_ADDR、DATA_DIR、MB_PATH 等读取自环境变量）。"""
    import uvicorn

    from carbon_tables.service.app import create_app

    settings = get_settings()
    try:
        app = create_app(settings)
    except CatalogError as exc:
        _fail(EXIT_USAGE, str(exc))
    uvicorn.run(app, host=settings.host, port=settings.port, log_config=None)


@cli.command()
@click.pass_obj
def catalog(obj: CliContext) -> None:
    """显示知识库摘要（--offline 时读取本地文件，否则查询服务端）。"""
    if obj.config.offline:
        try:
            materials_base = load_material_base(obj.config.mb_path or get_settings().mb_path)
        except CatalogError as exc:
            _fail(EXIT_USAGE, str(exc))
        _echo_json(materials_base.summary())
        return
    with _client_errors(), obj.client() as client:
        _echo_json(client.catalog())


@contextmanager
def _client_errors() -> Iterator[None]:
    """将客户端异常映射为退出码。"""
    try:
        yield
    except ClientConnectionError as exc:
        _fail(EXIT_NETWORK, str(exc))
    except JobFailedError as exc:
        _fail(EXIT_JOB_FAILED, str(exc))
    except ClientHTTPError as exc:
        _fail(EXIT_SERVER, str(exc))


def _parse_filters(raw_filters: tuple[str, ...]) -> dict[str, Any]:
    filters: dict[str, Any] = {}
    for item in raw_filters:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise click.UsageError(f"非法过滤条件: {item!r}，正确格式应为 key=value")
        key = key.strip()
        filters["fom_id" if key == "fom" else key] = value.strip()
    return filters


def _echo_json(payload: Any) -> None:
    click.echo(json.dumps(payload, indent=2, ensure_ascii=False))


def _fail(code: int, message: str) -> NoReturn:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


# 支持 python -m carbon_tables.main 调用
if __name__ == "__main__":
    cli()
