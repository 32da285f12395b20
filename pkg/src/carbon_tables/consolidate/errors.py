"""Consolidation errors."""

from __future__ import annotations

from carbon_tables.errors import CarbonTablesError


class UnknownFilterField(CarbonTablesError):
    """Raised when a knowledge query names a field that cannot be filtered on."""

    def __init__(self, field: str) -> None:
        super().__init__(f"unknown_filter_field: {field}")
        self.field = field
