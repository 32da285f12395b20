"""Catalog loading and lookup errors."""

from __future__ import annotations

from carbon_tables.errors import CarbonTablesError


class CatalogError(CarbonTablesError):
    """Base Materials Knowledge Base error."""


class MalformedFile(CatalogError):
    """Raised when the MB file is not parseable JSON."""


class SchemaViolation(CatalogError):
    """Raised when a field is missing or of the wrong kind."""

    def __init__(self, path: str, detail: str) -> None:
        super().__init__(f"schema_violation at {path}: {detail}")
        self.path = path
        self.detail = detail


class InvariantViolation(CatalogError):
    """Raised when the MB content breaks a cross-record rule."""


class UnknownSpecies(CatalogError):
    """Raised when a species symbol is not in the species dictionary."""

    def __init__(self, symbol: str) -> None:
        super().__init__(f"unknown_species: {symbol}")
        self.symbol = symbol
