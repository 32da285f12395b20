"""Materials Knowledge Base file loading."""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import ValidationError

from carbon_tables.catalog.base import FomCatalog, MaterialsBase
from carbon_tables.catalog.errors import MalformedFile, SchemaViolation
from carbon_tables.catalog.models import MaterialBaseFile
from carbon_tables.config import DEFAULT_MB_PATH
from carbon_tables.utils.logging import get_logger


def load_material_base(path: Path | str) -> MaterialsBase:
    """Load and validate an MB JSON file into an immutable snapshot.

    Raises:
        MalformedFile: the file cannot be read or is not JSON.
        SchemaViolation: a field is missing or has the wrong kind.
        InvariantViolation: cross-record rules are broken.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise MalformedFile(f"unreadable_mb_file: {path}: {exc}") from exc
    return parse_material_base(raw, source=str(path))


def load_default_material_base() -> MaterialsBase:
    """Load the MB shipped with the package."""
    return load_material_base(DEFAULT_MB_PATH)


def parse_material_base(raw: bytes | str, *, source: str = "<memory>") -> MaterialsBase:
    """Validate MB JSON content; see `load_material_base`."""
    logger = get_logger("carbon_tables.catalog.loader")
    try:
        payload = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedFile(f"mb_not_json: {source}: {exc}") from exc

    try:
        parsed = MaterialBaseFile.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise SchemaViolation(_format_loc(first["loc"]), first["msg"]) from exc

    catalog = FomCatalog(parsed.fom_catalog, parsed.species_dictionary)
    base = MaterialsBase(
        parsed.materials,
        catalog,
        declared_reference_count=parsed.reference_entry_count,
        source=source,
    )
    logger.info(
        "material_base_loaded",
        source=source,
        materials=len(base.materials),
        fom_fields=len(catalog),
        reference_entries=base.reference.entry_count,
    )
    return base


def _format_loc(loc: tuple[int | str, ...]) -> str:
    parts: list[str] = []
    for item in loc:
        if isinstance(item, int):
            parts.append(f"[{item}]")
        else:
            parts.append(f".{item}" if parts else str(item))
    return "".join(parts) or "<root>"
