"""Persistent inbox store: scan-once reports and the message lifecycle.

Each message lives in its own directory under the store root (raw bytes,
report JSON, and a small state file), keyed by a content hash so
ingestion is idempotent and ids survive restarts. Deleting a message
removes the raw bytes but keeps the report for audit.
"""

from __future__ import annotations

import email.header
import hashlib
import html
import json
import logging
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from ..engine import ScanConfig, ScanReport, scan
from ..ingest import EmptyInput, RawMessage, parse_message
from .sanitizer import SanitizedRendering, sanitize

logger = logging.getLogger("mailguard.store")

RAW_FILE = "raw.eml"
REPORT_FILE = "report.json"
ENTRY_FILE = "entry.json"


class EntryNotFound(KeyError):
    """No entry with that id."""


class EntryGone(Exception):
    """The entry was deleted; only its report remains."""


class EntryState(str, Enum):
    UNREAD = "unread"
    OPENED = "opened"
    DELETED = "deleted"


def decode_display_header(value: str | None) -> str:
    """Best-effort RFC 2047 decoding of a header for display."""
    if not value:
        return ""
    try:
        chunks = []
        for data, charset in email.header.decode_header(value):
            if isinstance(data, bytes):
                chunks.append(data.decode(charset or "ascii", errors="replace"))
            else:
                chunks.append(data)
        return "".join(chunks).strip()
    except Exception:
        return value.strip()


@dataclass
class InboxEntry:
    """One stored message with its report and lifecycle state."""

    id: str
    report: ScanReport
    state: EntryState
    subject: str
    from_header: str
    received_at: datetime
    source_name: str
    raw: bytes | None

    def summary(self) -> dict:
        return {
            "id": self.id,
            "subject": self.subject,
            "from_header": self.from_header,
            "received_at": self.received_at.isoformat().replace("+00:00", "Z"),
            "state": self.state.value,
            "verdict": self.report.verdict.label.value,
            "advisory": self.report.verdict.advisory.value,
        }

    def full_dict(self) -> dict:
        data = self.summary()
        data["report"] = self.report.to_dict()
        return data


class MessageStore:
    """Thread-safe store; mutations on one entry are serialized."""

    def __init__(self, root: Path | str, config: ScanConfig | None = None):
        self.root = Path(root)
        self.config = config or ScanConfig()
        self._index_lock = threading.RLock()
        self._entry_locks: dict[str, threading.RLock] = {}
        self._entries: dict[str, InboxEntry] = {}
        self.root.mkdir(parents=True, exist_ok=True)
        self._load()

    # -- persistence ------------------------------------------------------

    def _entry_dir(self, entry_id: str) -> Path:
        return self.root / entry_id

    def _write_json(self, path: Path, payload: dict) -> None:
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        os.replace(tmp, path)

    def _persist_entry_file(self, entry: InboxEntry) -> None:
        self._write_json(self._entry_dir(entry.id) / ENTRY_FILE, {
            "id": entry.id,
            "state": entry.state.value,
            "subject": entry.subject,
            "from_header": entry.from_header,
            "received_at": entry.received_at.isoformat(),
            "source_name": entry.source_name,
        })

    def _persist_new(self, entry: InboxEntry) -> None:
        directory = self._entry_dir(entry.id)
        directory.mkdir(parents=True, exist_ok=True)
        assert entry.raw is not None
        (directory / RAW_FILE).write_bytes(entry.raw)
        self._write_json(directory / REPORT_FILE, entry.report.to_dict())
        self._persist_entry_file(entry)

    def _load(self) -> None:
        for directory in sorted(self.root.iterdir() if self.root.exists() else []):
            entry_file = directory / ENTRY_FILE
            report_file = directory / REPORT_FILE
            if not directory.is_dir() or not entry_file.is_file() or not report_file.is_file():
                continue
            try:
                meta = json.loads(entry_file.read_text(encoding="utf-8"))
                report = ScanReport.from_dict(json.loads(report_file.read_text(encoding="utf-8")))
                raw_file = directory / RAW_FILE
                raw = raw_file.read_bytes() if raw_file.is_file() else None
                entry = InboxEntry(
                    id=meta["id"],
                    report=report,
                    state=EntryState(meta["state"]),
                    subject=meta.get("subject", ""),
                    from_header=meta.get("from_header", ""),
                    received_at=datetime.fromisoformat(meta["received_at"]),
                    source_name=meta.get("source_name", ""),
                    raw=raw,
                )
            except Exception as exc:
                logger.warning("skipping corrupt store entry %s: %s", directory.name, exc)
                continue
            self._entries[entry.id] = entry

    # -- locking ----------------------------------------------------------

    def _lock_for(self, entry_id: str) -> threading.RLock:
        with self._index_lock:
            lock = self._entry_locks.get(entry_id)
            if lock is None:
                lock = self._entry_locks[entry_id] = threading.RLock()
            return lock

    def _get(self, entry_id: str) -> InboxEntry:
        with self._index_lock:
            entry = self._entries.get(entry_id)
        if entry is None:
            raise EntryNotFound(entry_id)
        return entry

    # -- operations -------------------------------------------------------

    @staticmethod
    def content_id(data: bytes) -> str:
        return hashlib.sha256(data).hexdigest()

    def add_raw(self, data: bytes, source_name: str = "") -> tuple[InboxEntry, bool]:
        """Scan and store a message; idempotent on content. Returns (entry, created)."""
        entry_id = self.content_id(data)
        with self._lock_for(entry_id):
            with self._index_lock:
                existing = self._entries.get(entry_id)
            if existing is not None:
                return existing, False
            raw = RawMessage(data, source_name)
            report = scan(raw, self.config)
            parsed = parse_message(raw)
            entry = InboxEntry(
                id=entry_id,
                report=report,
                state=EntryState.UNREAD,
                subject=decode_display_header(parsed.header("subject")),
                from_header=decode_display_header(parsed.header("from")),
                received_at=datetime.now(timezone.utc),
                source_name=source_name,
                raw=data,
            )
            self._persist_new(entry)
            with self._index_lock:
                self._entries[entry_id] = entry
            return entry, True

    def ingest_directory(self, inbox_dir: Path | str) -> list[InboxEntry]:
        """Scan every new .eml file in ``inbox_dir``; known ids are skipped."""
        created: list[InboxEntry] = []
        for path in sorted(Path(inbox_dir).glob("*.eml")):
            try:
                data = path.read_bytes()
                entry, is_new = self.add_raw(data, path.name)
            except (OSError, EmptyInput) as exc:
                logger.warning("inbox sweep: skipping %s: %s", path, exc)
                continue
            if is_new:
                created.append(entry)
        return created

    def get_entry(self, entry_id: str) -> InboxEntry:
        return self._get(entry_id)

    def open_entry(self, entry_id: str) -> tuple[InboxEntry, SanitizedRendering]:
        """Mark opened and return the stored report's rendering; never re-scans."""
        with self._lock_for(entry_id):
            entry = self._get(entry_id)
            if entry.state is EntryState.DELETED:
                raise EntryGone(entry_id)
            if entry.state is EntryState.UNREAD:
                entry.state = EntryState.OPENED
                self._persist_entry_file(entry)
            return entry, self.render_entry(entry)

    def delete_entry(self, entry_id: str) -> InboxEntry:
        """Drop the raw bytes, keep the report; idempotent."""
        with self._lock_for(entry_id):
            entry = self._get(entry_id)
            if entry.state is EntryState.DELETED:
                return entry
            entry.state = EntryState.DELETED
            entry.raw = None
            raw_file = self._entry_dir(entry_id) / RAW_FILE
            if raw_file.exists():
                raw_file.unlink()
            self._persist_entry_file(entry)
            return entry

    def rescan_entry(self, entry_id: str, config: ScanConfig | None = None) -> InboxEntry:
        """Produce a fresh report that supersedes the stored one."""
        with self._lock_for(entry_id):
            entry = self._get(entry_id)
            if entry.state is EntryState.DELETED or entry.raw is None:
                raise EntryGone(entry_id)
            report = scan(RawMessage(entry.raw, entry.source_name), config or self.config)
            entry.report = report
            self._write_json(self._entry_dir(entry_id) / REPORT_FILE, report.to_dict())
            return entry

    def render_entry(self, entry: InboxEntry) -> SanitizedRendering:
        """Sanitized rendering of all body parts, findings annotated per part."""
        if entry.raw is None:
            raise EntryGone(entry.id)
        parsed = parse_message(RawMessage(entry.raw, entry.source_name))
        pieces: list[str] = []
        annotations: list[dict] = []
        for index, document in enumerate(parsed.html_parts):
            part_findings = [f for f in entry.report.findings if f.part_index == index]
            rendering = sanitize(document, part_findings)
            pieces.append(f'<div class="mg-part" data-mg-part="{index}">{rendering.html}</div>')
            annotations.extend(rendering.annotations)
        if not parsed.html_parts:
            text = "\n\n".join(parsed.text_parts)
            pieces.append(f'<pre class="mg-plain">{html.escape(text)}</pre>')
        return SanitizedRendering(html="\n".join(pieces), annotations=annotations)

    def render_by_id(self, entry_id: str) -> SanitizedRendering:
        with self._lock_for(entry_id):
            entry = self._get(entry_id)
            if entry.state is EntryState.DELETED:
                raise EntryGone(entry_id)
            return self.render_entry(entry)

    def list_entries(
        self,
        state: EntryState | str | None = None,
        verdict: str | None = None,
    ) -> list[InboxEntry]:
        """Entries newest first; deleted ones only when asked for explicitly."""
        wanted_state = EntryState(state) if isinstance(state, str) else state
        with self._index_lock:
            entries = list(self._entries.values())
        selected = []
        for entry in entries:
            if wanted_state is None:
                if entry.state is EntryState.DELETED:
                    continue
            elif entry.state is not wanted_state:
                continue
            if verdict is not None and entry.report.verdict.label.value != verdict:
                continue
            selected.append(entry)
        selected.sort(key=lambda e: (e.received_at, e.id), reverse=True)
        return selected

    def counts(self) -> dict[str, int]:
        with self._index_lock:
            entries = list(self._entries.values())
        result = {"total": len(entries)}
        for state in EntryState:
            result[state.value] = sum(1 for e in entries if e.state is state)
        return result
