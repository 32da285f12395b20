"""Shared error base."""

from __future__ import annotations


class CarbonTablesError(Exception):
    """Base error for every failure raised by this package."""
