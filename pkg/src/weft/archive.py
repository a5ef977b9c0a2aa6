"""Content-addressed archive of raw crawled items.

Payload bytes are stored exactly as fetched under objects/<hh>/<hash>;
each record gets one JSON metadata document under records/. Records are
keyed by the (source, url, contentHash) triple, so re-archiving an
identical item is a no-op returning the existing record. Writes are
atomic (temp file + rename) and metadata updates for one source are
serialized behind a file lock, so concurrent writers are safe.
"""

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from filelock import FileLock

from weft.errors import InputError, IntegrityError, NotFoundError, StoreError

_METADATA_KEYS = ("id", "source", "date", "url", "contentType", "contentHash", "payloadRef")


def _utcnow():
    return datetime.now(timezone.utc).replace(microsecond=0)


def format_date(value: datetime) -> str:
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    value = value.astimezone(timezone.utc)
    text = value.isoformat()
    return text.replace("+00:00", "Z")


def parse_date(text: str) -> datetime:
    return datetime.fromisoformat(text.replace("Z", "+00:00"))


@dataclass(frozen=True)
class ArchiveRecord:
    id: str
    source: str
    date: datetime
    url: str
    content_type: str
    content_hash: str
    payload_ref: str

    def to_json_dict(self):
        return {
            "id": self.id,
            "source": self.source,
            "date": format_date(self.date),
            "url": self.url,
            "contentType": self.content_type,
            "contentHash": self.content_hash,
            "payloadRef": self.payload_ref,
        }

    @classmethod
    def from_json_dict(cls, raw):
        missing = [key for key in _METADATA_KEYS if key not in raw]
        if missing:
            raise StoreError(f"metadata document missing keys {missing}")
        return cls(
            id=raw["id"],
            source=raw["source"],
            date=parse_date(raw["date"]),
            url=raw["url"],
            content_type=raw["contentType"],
            content_hash=raw["contentHash"],
            payload_ref=raw["payloadRef"],
        )


def _atomic_write(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise StoreError(f"cannot write {path}: {exc}") from exc


class ArchiveStore:
    """File-backed archive rooted at a directory."""

    def __init__(self, root):
        self.root = Path(root)
        (self.root / "objects").mkdir(parents=True, exist_ok=True)
        (self.root / "records").mkdir(parents=True, exist_ok=True)
        (self.root / "locks").mkdir(parents=True, exist_ok=True)

    # -- paths -------------------------------------------------------------

    def _object_path(self, content_hash):
        return self.root / "objects" / content_hash[:2] / content_hash

    def _record_path(self, record_id):
        return self.root / "records" / f"{record_id}.json"

    def _source_lock(self, source):
        safe = hashlib.sha256(source.encode("utf-8")).hexdigest()[:16]
        return FileLock(self.root / "locks" / f"{safe}.lock")

    # -- operations ----------------------------------------------------------

    def put(self, source, url, content_type, payload, date=None) -> ArchiveRecord:
        """Archive one crawled item; idempotent for identical (source, url, payload)."""
        if not payload:
            raise InputError("refusing to archive an empty payload")
        if not source:
            raise InputError("source code must be non-empty")
        now = _utcnow()
        if date is None:
            date = now
        elif date > now:
            raise InputError("record date lies in the future")

        content_hash = hashlib.sha256(payload).hexdigest()
        record_id = hashlib.sha256(
            b"\x00".join([source.encode("utf-8"), url.encode("utf-8"), content_hash.encode()])
        ).hexdigest()[:32]

        with self._source_lock(source):
            record_path = self._record_path(record_id)
            if record_path.exists():
                return self._read_record(record_path)
            object_path = self._object_path(content_hash)
            if not object_path.exists():
                _atomic_write(object_path, payload)
            record = ArchiveRecord(
                id=record_id,
                source=source,
                date=date,
                url=url,
                content_type=content_type or "",
                content_hash=content_hash,
                payload_ref=str(object_path.relative_to(self.root)),
            )
            _atomic_write(
                record_path,
                (json.dumps(record.to_json_dict(), ensure_ascii=False, indent=2) + "\n").encode(
                    "utf-8"
                ),
            )
        return record

    def get(self, record_id):
        """Return (record, payload); payload is digest-checked on every read."""
        record = self.get_record(record_id)
        object_path = self.root / record.payload_ref
        try:
            payload = object_path.read_bytes()
        except FileNotFoundError:
            raise IntegrityError(f"payload blob missing for record {record_id}") from None
        except OSError as exc:
            raise StoreError(f"cannot read payload for {record_id}: {exc}") from exc
        if hashlib.sha256(payload).hexdigest() != record.content_hash:
            raise IntegrityError(f"payload digest mismatch for record {record_id}")
        return record, payload

    def get_record(self, record_id) -> ArchiveRecord:
        record_path = self._record_path(record_id)
        if not record_path.exists():
            raise NotFoundError(f"no archive record {record_id}")
        return self._read_record(record_path)

    def verify(self, record_id) -> bool:
        """True iff the stored payload still matches the recorded digest."""
        try:
            self.get(record_id)
            return True
        except IntegrityError:
            return False

    def list(self, source=None, date_from=None, date_to=None):
        """Records filtered by source and inclusive date range, date ascending."""
        if date_from is not None and date_to is not None and date_from > date_to:
            raise InputError("inverted date range")
        records = []
        for record_path in (self.root / "records").glob("*.json"):
            record = self._read_record(record_path)
            if source is not None and record.source != source:
                continue
            if date_from is not None and record.date < date_from:
                continue
            if date_to is not None and record.date > date_to:
                continue
            records.append(record)
        records.sort(key=lambda r: (r.date, r.id))
        return records

    def has_url(self, source, url) -> bool:
        return any(r.url == url for r in self.list(source=source))

    def _read_record(self, record_path) -> ArchiveRecord:
        try:
            raw = json.loads(record_path.read_text("utf-8"))
        except (OSError, ValueError) as exc:
            raise StoreError(f"unreadable record {record_path.name}: {exc}") from exc
        return ArchiveRecord.from_json_dict(raw)
