from __future__ import annotations

import io
import json
import random
import zipfile
from typing import Any

import pytest

from carbon_tables.ingest.documents import (
    PDF_REJECTION,
    parse_archive,
    parse_document,
    parse_upload,
    serialize_document,
)
from carbon_tables.ingest.errors import (
    DocumentSchemaViolation,
    EmptyArchive,
    MalformedJson,
    MemberTooLarge,
    NotAnArchive,
    UnsupportedFormat,
)


def _build_archive(
    members: dict[str, bytes], compression: int = zipfile.ZIP_STORED
) -> bytes:
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", compression=compression) as archive:
        for name, data in members.items():
            archive.writestr(name, data)
    return buffer.getvalue()


def _build_document(doc_id: str, value: str = "1.0") -> bytes:
    payload = {
        "doc_id": doc_id,
        "tables": [
            {
                "table_index": 0,
                "header_row": ["Material", "CO2 (GPU)"],
                "body": [["MMHFM", value]],
            }
        ],
    }
    return json.dumps(payload).encode("utf-8")


_ALPHABET = "abcXYZ019 .,;:-+/()%'\"\\\t\nµ±×°αβΔ≤≥₂²中文é😀"


def _random_text(rng: random.Random, max_length: int = 12) -> str:
    return "".join(rng.choice(_ALPHABET) for _ in range(rng.randint(0, max_length)))


def _random_payload(rng: random.Random) -> dict[str, Any]:
    tables = []
    for index in range(rng.randint(0, 3)):
        n_cols = rng.randint(1, 4)
        tables.append(
            {
                "table_index": index,
                "caption": _random_text(rng, 30),
                "header_row": [_random_text(rng) for _ in range(n_cols)],
                "body": [
                    [_random_text(rng) for _ in range(n_cols)] for _ in range(rng.randint(0, 4))
                ],
            }
        )
    return {
        "doc_id": "d" + _random_text(rng),
        "source_filename": _random_text(rng),
        "tables": tables,
    }


def test_parse_document_reads_ultem_table(ultem_bytes: bytes) -> None:
    document = parse_document(ultem_bytes, "uploads/ultem.json")

    assert document.doc_id == "ultem-hfm-2019"
    assert document.source_filename == "ultem.json"
    assert len(document.tables) == 1
    table = document.tables[0]
    assert (table.n_rows, table.n_cols) == (2, 3)
    assert table.body[1] == ["MMHFM", "31.2", "35.7"]


def test_parse_document_derives_doc_id_from_filename() -> None:
    document = parse_document(b'{"tables": []}', "smith2021.json")

    assert document.doc_id == "smith2021"
    assert document.is_empty


def test_parse_document_rejects_ragged_row(ultem_payload: dict[str, Any]) -> None:
    ultem_payload["tables"][0]["body"][1] = ["MMHFM", "31.2"]

    with pytest.raises(DocumentSchemaViolation) as excinfo:
        parse_document(json.dumps(ultem_payload).encode(), "ultem.json")

    assert excinfo.value.table_index == 0
    assert excinfo.value.row == 1
    assert "row_has_2_cells_expected_3" in str(excinfo.value)


def test_parse_document_rejects_wrong_kinds(ultem_payload: dict[str, Any]) -> None:
    ultem_payload["tables"][0]["body"][0][1] = 15.3

    with pytest.raises(DocumentSchemaViolation) as excinfo:
        parse_document(json.dumps(ultem_payload).encode(), "ultem.json")

    assert excinfo.value.table_index == 0
    assert excinfo.value.row == 0


def test_parse_document_rejects_gap_in_table_indices(ultem_payload: dict[str, Any]) -> None:
    ultem_payload["tables"][0]["table_index"] = 3

    with pytest.raises(DocumentSchemaViolation, match="table_index_not_contiguous"):
        parse_document(json.dumps(ultem_payload).encode(), "ultem.json")


def test_parse_document_rejects_bad_json() -> None:
    with pytest.raises(MalformedJson):
        parse_document(b"{not json", "broken.json")
    with pytest.raises(MalformedJson):
        parse_document(b"\xff\xfe", "broken.json")
    with pytest.raises(DocumentSchemaViolation, match="document_must_be_object"):
        parse_document(b"[1, 2]", "list.json")


def test_serialized_document_reads_back(ultem_bytes: bytes) -> None:
    document = parse_document(ultem_bytes, "ultem.json")

    data = serialize_document(document)

    assert parse_document(data, "other-name.json") == document
    assert serialize_document(parse_document(data, "x.json")) == data


def test_random_documents_read_back_unchanged() -> None:
    rng = random.Random(20190611)
    for _ in range(100):
        payload = _random_payload(rng)
        document = parse_document(json.dumps(payload, ensure_ascii=False).encode(), "x.json")
        assert document.model_dump() == payload

        data = serialize_document(document)

        assert parse_document(data, "y.json") == document
        assert serialize_document(parse_document(data, "z.json")) == data


def test_parse_archive_reports_members_independently(ultem_bytes: bytes) -> None:
    archive = _build_archive(
        {
            "b_ultem.json": ultem_bytes,
            "a_broken.json": b"{oops",
            "c_scan.pdf": b"%PDF-1.7",
            "d_empty.json": b'{"doc_id": "empty-doc", "tables": []}',
            "__MACOSX/._b_ultem.json": b"junk",
            ".hidden.json": b"junk",
        }
    )

    documents, report = parse_archive(archive)

    assert [d.doc_id for d in documents] == ["ultem-hfm-2019", "empty-doc"]
    assert report.accepted == ["ultem-hfm-2019", "empty-doc"]
    rejected = dict(report.rejected)
    assert set(rejected) == {"a_broken.json", "c_scan.pdf"}
    assert rejected["a_broken.json"].startswith("MalformedJson")
    assert PDF_REJECTION in rejected["c_scan.pdf"]
    assert report.warnings == [("empty-doc", "empty_document")]


def test_parse_archive_rejects_repeated_doc_id() -> None:
    archive = _build_archive(
        {"2.json": _build_document("same", "2.0"), "1.json": _build_document("same", "1.0")}
    )

    documents, report = parse_archive(archive)

    assert len(documents) == 1
    assert documents[0].tables[0].body[0][1] == "1.0"
    assert report.rejected == [("2.json", "DuplicateDocument: same")]


def test_parse_archive_is_independent_of_member_order() -> None:
    members = {f"doc{i}.json": _build_document(f"doc{i}", str(i)) for i in range(5)}
    shuffled = dict(reversed(list(members.items())))

    forward, _ = parse_archive(_build_archive(members))
    backward, _ = parse_archive(_build_archive(shuffled))

    assert forward == backward


def test_parse_archive_rejects_non_archives() -> None:
    with pytest.raises(NotAnArchive):
        parse_archive(b"definitely not a zip")
    with pytest.raises(EmptyArchive):
        parse_archive(_build_archive({"__MACOSX/._x.json": b"junk"}))


def test_parse_upload_dispatches_on_suffix(ultem_bytes: bytes) -> None:
    documents, report = parse_upload(ultem_bytes, "ultem.JSON")
    assert [d.doc_id for d in documents] == ["ultem-hfm-2019"]
    assert report.accepted == ["ultem-hfm-2019"] and report.rejected == []

    with pytest.raises(UnsupportedFormat) as excinfo:
        parse_upload(b"%PDF-1.7", "paper.pdf")
    assert excinfo.value.fmt == "pdf"

    with pytest.raises(UnsupportedFormat):
        parse_upload(b"a,b\n1,2\n", "table.csv")


def _padded_document(doc_id: str, size: int) -> bytes:
    return _build_document(doc_id) + b" " * size


def test_parse_archive_caps_decompressed_member_size(ultem_bytes: bytes) -> None:
    archive = _build_archive(
        {"a_ultem.json": ultem_bytes, "b_bomb.json": _padded_document("bomb", 2 * 1024 * 1024)},
        compression=zipfile.ZIP_DEFLATED,
    )
    assert len(archive) < 64 * 1024

    documents, report = parse_archive(archive, max_uncompressed_bytes=1024 * 1024)

    assert [d.doc_id for d in documents] == ["ultem-hfm-2019"]
    assert [name for name, _ in report.rejected] == ["b_bomb.json"]
    assert report.rejected[0][1].startswith("MemberTooLarge")

    unlimited, _ = parse_archive(archive)
    assert [d.doc_id for d in unlimited] == ["ultem-hfm-2019", "bomb"]


def test_parse_archive_cap_covers_all_members() -> None:
    members = {
        "1.json": _padded_document("first", 600 * 1024),
        "2.json": _padded_document("second", 600 * 1024),
        "3.json": _build_document("third"),
    }

    documents, report = parse_upload(
        _build_archive(members, compression=zipfile.ZIP_DEFLATED),
        "batch.zip",
        max_uncompressed_bytes=1024 * 1024,
    )

    assert [d.doc_id for d in documents] == ["first", "third"]
    assert report.rejected[0][0] == "2.json"
    assert report.rejected[0][1].startswith("MemberTooLarge")


def test_member_too_large_names_member_and_limit() -> None:
    error = MemberTooLarge("bomb.json", 2048, 1024)

    assert (error.member, error.size, error.limit) == ("bomb.json", 2048, 1024)
    assert str(error) == "member_too_large: bomb.json needs 2048 bytes, 1024 left"
