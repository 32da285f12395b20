from __future__ import annotations

import json
from typing import Any

import pytest

from carbon_tables.catalog.base import MaterialsBase
from carbon_tables.catalog.loader import load_default_material_base


@pytest.fixture(scope="session")
def mb() -> MaterialsBase:
    return load_default_material_base()


@pytest.fixture
def ultem_payload() -> dict[str, Any]:
    return {
        "doc_id": "ultem-hfm-2019",
        "tables": [
            {
                "table_index": 0,
                "caption": "Gas separation performance of the hollow fiber membranes",
                "header_row": ["Material's Name", "CO2 (GPU)", "CO2/N2 Selectivity"],
                "body": [
                    ["Pure Ultem HFM", "15.3", "0.5"],
                    ["MMHFM", "31.2", "35.7"],
                ],
            }
        ],
    }


@pytest.fixture
def ultem_bytes(ultem_payload: dict[str, Any]) -> bytes:
    return json.dumps(ultem_payload).encode("utf-8")
