"""Decision-tree consolidation of one annotated table."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from carbon_tables.catalog.base import MaterialLookup, MaterialsBase
from carbon_tables.catalog.models import FomDefinition, MaterialRecord
from carbon_tables.consolidate.headers import ColumnMatch, DecisionTreeHeaderMatcher, HeaderMatcher
from carbon_tables.consolidate.models import (
    ConsolidationOptions,
    MeasurementRecord,
    Novelty,
    Provenance,
    SkipEntry,
    SkipReason,
)
from carbon_tables.ingest.models import AnnotatedTable
from carbon_tables.matching.values import ParsedValue, parse_numeric_cell
from carbon_tables.utils.logging import get_logger, log_skip

logger = get_logger("carbon_tables.consolidate")

CONFIRM_REL_TOL = 1e-6

_DEFAULT_MATCHER = DecisionTreeHeaderMatcher()


@dataclass(slots=True)
class TableOutcome:
    """Records and skips of one table, plus the nodes it touched."""

    records: list[MeasurementRecord] = field(default_factory=list)
    skips: list[SkipEntry] = field(default_factory=list)
    materials: dict[str, MaterialRecord] = field(default_factory=dict)
    foms: dict[str, FomDefinition] = field(default_factory=dict)
    skipped: bool = False


def consolidate_table(
    table: AnnotatedTable,
    mb: MaterialsBase,
    *,
    doc_id: str,
    options: ConsolidationOptions | None = None,
    matcher: HeaderMatcher | None = None,
    materials: MaterialLookup | None = None,
) -> TableOutcome:
    """Map one table onto the catalog.

    Column 0 names the material of each row; every other column is matched
    to a catalog field. Never raises for table content: each anomaly is
    logged as a skip entry instead.

    Args:
        table: Validated annotated table.
        mb: Knowledge base snapshot (materials, catalog and reference table).
        doc_id: Owning document, recorded in provenance.
        options: Consolidation switches; defaults apply when omitted.
        matcher: Header resolution strategy.
        materials: Material resolution strategy; `mb` itself by default.
    """
    options = options or ConsolidationOptions()
    matcher = matcher or _DEFAULT_MATCHER
    lookup = materials or mb
    catalog = mb.catalog
    outcome = TableOutcome()

    rows = _resolve_rows(table, lookup, doc_id, outcome)

    resolved = {record.canonical_name for record in rows.values()}
    if (
        resolved
        and not options.process_known_materials
        and all(mb.is_reference(name) for name in resolved)
    ):
        entry = SkipEntry(
            Provenance(doc_id, table.table_index),
            SkipReason.TABLE_SKIPPED_KNOWN_MATERIALS,
            ", ".join(sorted(resolved)),
        )
        _skip(outcome, entry)
        outcome.skipped = True
        logger.info("table_skipped_known_materials", doc=doc_id, table=table.table_index)
        return outcome

    outcome.materials.update({record.canonical_name: record for record in rows.values()})

    value_columns: list[tuple[int, ColumnMatch, FomDefinition]] = []
    state_columns: list[tuple[int, FomDefinition]] = []
    for col in range(1, table.n_cols):
        match = matcher.match(table.header_row[col], catalog)
        if match.fom is None:
            _skip(
                outcome,
                SkipEntry(
                    Provenance(doc_id, table.table_index, None, col),
                    SkipReason.UNMATCHED_HEADER,
                    table.header_row[col],
                ),
            )
            continue
        if match.fom.is_state_variable:
            state_columns.append((col, match.fom))
        else:
            value_columns.append((col, match, match.fom))
            outcome.foms[match.fom.fom_id] = match.fom

    for row_index, material in rows.items():
        row = table.body[row_index]
        state = _row_state(row, row_index, state_columns, doc_id, table.table_index, outcome)
        for col, match, fom in value_columns:
            provenance = Provenance(doc_id, table.table_index, row_index, col)
            parsed = parse_numeric_cell(row[col])
            if parsed is None:
                _skip(outcome, SkipEntry(provenance, SkipReason.UNPARSEABLE_VALUE, row[col]))
                continue
            outcome.records.append(
                MeasurementRecord(
                    material_id=material.canonical_name,
                    fom_id=fom.fom_id,
                    value=parsed.value,
                    uncertainty=parsed.uncertainty,
                    unit=match.unit if match.unit is not None else fom.canonical_unit,
                    state_variables=dict(state),
                    provenance=provenance,
                    novelty=_novelty(mb, material.canonical_name, fom.fom_id, parsed),
                )
            )

    logger.debug(
        "table_consolidated",
        doc=doc_id,
        table=table.table_index,
        records=len(outcome.records),
        skips=len(outcome.skips),
    )
    return outcome


def _resolve_rows(
    table: AnnotatedTable,
    lookup: MaterialLookup,
    doc_id: str,
    outcome: TableOutcome,
) -> dict[int, MaterialRecord]:
    rows: dict[int, MaterialRecord] = {}
    for row_index, row in enumerate(table.body):
        record = lookup.lookup_material(row[0])
        if record is None:
            _skip(
                outcome,
                SkipEntry(
                    Provenance(doc_id, table.table_index, row_index, 0),
                    SkipReason.UNRESOLVED_MATERIAL,
                    row[0],
                ),
            )
            continue
        rows[row_index] = record
    return rows


def _row_state(
    row: list[str],
    row_index: int,
    state_columns: list[tuple[int, FomDefinition]],
    doc_id: str,
    table_index: int,
    outcome: TableOutcome,
) -> dict[str, float]:
    state: dict[str, float] = {}
    for col, fom in state_columns:
        parsed = parse_numeric_cell(row[col])
        if parsed is None:
            _skip(
                outcome,
                SkipEntry(
                    Provenance(doc_id, table_index, row_index, col),
                    SkipReason.UNPARSEABLE_STATE_VARIABLE,
                    row[col],
                ),
            )
            continue
        # first column wins when a table repeats a state variable
        state.setdefault(fom.fom_id, parsed.value)
    return state


def _novelty(mb: MaterialsBase, material_id: str, fom_id: str, parsed: ParsedValue) -> Novelty:
    reference = mb.reference_value(material_id, fom_id)
    if reference is None:
        return Novelty.NEW
    tolerance = parsed.uncertainty or 0.0
    if abs(parsed.value - reference.value) <= tolerance or math.isclose(
        parsed.value, reference.value, rel_tol=CONFIRM_REL_TOL
    ):
        return Novelty.CONFIRMS_REFERENCE
    return Novelty.NEW


def _skip(outcome: TableOutcome, entry: SkipEntry) -> None:
    outcome.skips.append(entry)
    provenance = entry.provenance
    log_skip(
        logger,
        reason=entry.reason.value,
        doc=provenance.doc if provenance else None,
        table=provenance.table if provenance else None,
        row=provenance.row if provenance else None,
        col=provenance.col if provenance else None,
    )
