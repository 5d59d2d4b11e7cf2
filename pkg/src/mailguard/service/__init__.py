"""Inbox HTTP service: directory ingestion, persisted reports, safe rendering."""

from .sanitizer import SanitizedRendering, sanitize
from .store import (
    EntryGone,
    EntryNotFound,
    EntryState,
    InboxEntry,
    MessageStore,
)

__all__ = [
    "EntryGone",
    "EntryNotFound",
    "EntryState",
    "InboxEntry",
    "MessageStore",
    "SanitizedRendering",
    "sanitize",
]
