"""知识库模块 - 材料知识库、FoM 目录与参考材料表。"""

from carbon_tables.catalog.base import FomCatalog, MaterialLookup, MaterialsBase, ReferenceTable
from carbon_tables.catalog.errors import (
    CatalogError,
    InvariantViolation,
    MalformedFile,
    SchemaViolation,
    UnknownSpecies,
)
from carbon_tables.catalog.loader import (
    load_default_material_base,
    load_material_base,
    parse_material_base,
)
from carbon_tables.catalog.models import (
    COMMON,
    FomDefinition,
    MaterialRecord,
    ScalarMeasurement,
    TechnologyCategory,
)

__all__ = [
    "COMMON",
    "CatalogError",
    "FomCatalog",
    "FomDefinition",
    "InvariantViolation",
    "MalformedFile",
    "MaterialLookup",
    "MaterialRecord",
    "MaterialsBase",
    "ReferenceTable",
    "ScalarMeasurement",
    "SchemaViolation",
    "TechnologyCategory",
    "UnknownSpecies",
    "load_default_material_base",
    "load_material_base",
    "parse_material_base",
]
