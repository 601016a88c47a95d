"""Append-only journal: the single persistence mechanism shared by all modules.

On-disk format, per entry: 4-byte big-endian payload length, payload bytes,
4-byte big-endian CRC32 of the payload. The payload is canonical JSON
(sorted keys, compact separators) of {"type", "payload", "written_at"}.

Replaying the journal from an empty state reconstructs all module state;
a journal may also live purely in memory (tests, enumeration harnesses).
"""

from __future__ import annotations

import json
import struct
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional

from .errors import JournalCorrupt, StorageFailure

ENTRY_TYPES = {
    "Identity", "Mailbox", "MailMessage", "Token", "Session",
    "SealedRecord", "Audit", "Tombstone",
}


@dataclass(frozen=True)
class JournalEntry:
    entry_type: str
    payload: dict
    written_at: float


def _encode(entry: JournalEntry) -> bytes:
    doc = {
        "type": entry.entry_type,
        "payload": entry.payload,
        "written_at": entry.written_at,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _frame(blob: bytes) -> bytes:
    return struct.pack(">I", len(blob)) + blob + struct.pack(">I", zlib.crc32(blob))


def read_journal_file(path: Path) -> list[JournalEntry]:
    """Parse a journal file, raising JournalCorrupt with the 1-based entry
    number of the first unreadable record."""
    entries: list[JournalEntry] = []
    data = Path(path).read_bytes()
    off, n = 0, len(data)
    seq = 0
    while off < n:
        seq += 1
        if off + 4 > n:
            raise JournalCorrupt(seq, f"truncated length header at entry {seq}")
        (length,) = struct.unpack_from(">I", data, off)
        off += 4
        if off + length + 4 > n:
            raise JournalCorrupt(seq, f"truncated record at entry {seq}")
        blob = data[off:off + length]
        off += length
        (crc,) = struct.unpack_from(">I", data, off)
        off += 4
        if zlib.crc32(blob) != crc:
            raise JournalCorrupt(seq, f"checksum mismatch at entry {seq}")
        try:
            doc = json.loads(blob.decode("utf-8"))
            entries.append(JournalEntry(doc["type"], doc["payload"], doc["written_at"]))
        except (ValueError, KeyError) as exc:
            raise JournalCorrupt(seq, f"undecodable entry {seq}: {exc}") from exc
    return entries


class Journal:
    """Single-writer append-only journal. ``path=None`` keeps it in memory.

    ``fault_hook`` (tests only) is called before each append and may raise
    StorageFailure to simulate a failed write.
    """

    def __init__(self, path: Optional[Path] = None, clock=None):
        from .clock import Clock
        self.path = Path(path) if path is not None else None
        self.clock = clock or Clock()
        self._entries: list[JournalEntry] = []
        self._lock = threading.Lock()
        self._fh = None
        self.fault_hook: Optional[Callable[[JournalEntry], None]] = None
        if self.path is not None and self.path.exists():
            self._entries = read_journal_file(self.path)
        if self.path is not None:
            self._fh = open(self.path, "ab")

    def append(self, entry_type: str, payload: dict) -> JournalEntry:
        if entry_type not in ENTRY_TYPES:
            raise ValueError(f"unknown journal entry type: {entry_type}")
        entry = JournalEntry(entry_type, payload, self.clock.now())
        with self._lock:
            if self.fault_hook is not None:
                self.fault_hook(entry)
            if self._fh is not None:
                try:
                    self._fh.write(_frame(_encode(entry)))
                    self._fh.flush()
                except OSError as exc:
                    raise StorageFailure(str(exc)) from exc
            self._entries.append(entry)
        return entry

    def entries(self, entry_type: Optional[str] = None) -> list[JournalEntry]:
        with self._lock:
            snap = list(self._entries)
        if entry_type is None:
            return snap
        return [e for e in snap if e.entry_type == entry_type]

    def raw_bytes(self) -> bytes:
        """Full persisted byte stream (for leak-scanning tests)."""
        if self.path is not None:
            if self._fh is not None:
                self._fh.flush()
            return self.path.read_bytes()
        with self._lock:
            return b"".join(_frame(_encode(e)) for e in self._entries)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


def replay(entries: Iterable[JournalEntry], handlers: dict) -> None:
    """Dispatch each entry to handlers[entry_type] in journal order."""
    for entry in entries:
        handler = handlers.get(entry.entry_type)
        if handler is not None:
            handler(entry.payload)
