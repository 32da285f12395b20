"""On-disk store of uploaded annotated documents."""

from __future__ import annotations

import hashlib
import re
import threading
from pathlib import Path

from carbon_tables.ingest.documents import parse_document, serialize_document
from carbon_tables.ingest.errors import IngestError
from carbon_tables.ingest.models import AnnotatedDocument
from carbon_tables.service.errors import DocumentNotFound, DuplicateDocument
from carbon_tables.utils.files import atomic_write_bytes
from carbon_tables.utils.logging import get_logger

logger = get_logger("carbon_tables.service.store")

_UNSAFE = re.compile(r"[^A-Za-z0-9._-]")


class DocumentStore:
    """Documents keyed by doc_id, one canonical JSON file each.

    Writes are atomic, so a document either survives a restart whole or not
    at all. Reads always go to disk. The doc_id index is built once when the
    store opens and kept current by ``put`` and ``delete``.
    """

    def __init__(self, root: Path) -> None:
        self._root = root
        self._root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._index: dict[str, Path] = self._scan()

    @property
    def root(self) -> Path:
        return self._root

    def put(self, document: AnnotatedDocument, *, overwrite: bool = False) -> None:
        path = self._path(document.doc_id)
        with self._lock:
            if document.doc_id in self._index and not overwrite:
                raise DuplicateDocument(document.doc_id)
            atomic_write_bytes(path, serialize_document(document))
            self._index[document.doc_id] = path
        logger.info("document_stored", doc_id=document.doc_id, tables=len(document.tables))

    def get(self, doc_id: str) -> AnnotatedDocument:
        path = self._path(doc_id)
        try:
            data = path.read_bytes()
        except FileNotFoundError as exc:
            raise DocumentNotFound(doc_id) from exc
        return parse_document(data, path.name)

    def exists(self, doc_id: str) -> bool:
        with self._lock:
            return doc_id in self._index

    def delete(self, doc_id: str) -> None:
        with self._lock:
            path = self._index.pop(doc_id, None) or self._path(doc_id)
            try:
                path.unlink()
            except FileNotFoundError as exc:
                raise DocumentNotFound(doc_id) from exc

    def list_ids(self) -> list[str]:
        """Stored doc_ids in sorted order."""
        with self._lock:
            return sorted(self._index)

    def _scan(self) -> dict[str, Path]:
        index: dict[str, Path] = {}
        for path in sorted(self._root.glob("*.json")):
            try:
                doc_id = parse_document(path.read_bytes(), path.name).doc_id
            except (IngestError, OSError):
                logger.warning("stored_document_unreadable", path=str(path))
                continue
            index[doc_id] = path
        logger.info("document_index_built", documents=len(index))
        return index

    def _path(self, doc_id: str) -> Path:
        # doc_ids are client-supplied; keep file names inside the store
        safe = _UNSAFE.sub("_", doc_id)
        if safe != doc_id or safe.startswith("."):
            safe = f"{safe}-{hashlib.sha256(doc_id.encode('utf-8')).hexdigest()[:32]}"
        return self._root / f"{safe}.json"
