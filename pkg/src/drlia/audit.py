"""Hash-chained audit log recording every access attempt and admin action.

Each entry's hash covers all its fields plus the previous entry's hash, so
any modification of history is detectable by rehashing the chain. Writes are
synchronous with the operation that caused them: if the journal write fails,
the triggering operation must fail too (fail-closed).
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from typing import Optional

from .errors import SecretInDetail

ACTIONS = {
    "Register", "GrantPrivilege", "LoginStep1", "TokenIssued", "AccessGranted",
    "Logout", "RecordSealed", "RecordOpened", "Lockdown", "Denied", "Suspend",
}
OUTCOMES = {"Success", "Failure"}
GENESIS_HASH = b"\x00" * 32
MAX_DETAIL = 256


@dataclass(frozen=True)
class AuditEntry:
    seq: int
    timestamp_ms: int
    staff_number: Optional[str]
    action: str
    outcome: str
    detail: str
    prev_hash: bytes
    entry_hash: bytes

    def canonical(self) -> bytes:
        return "|".join([
            str(self.seq),
            str(self.timestamp_ms),
            self.staff_number or "",
            self.action,
            self.outcome,
            self.detail,
            self.prev_hash.hex(),
        ]).encode("utf-8")

    def compute_hash(self) -> bytes:
        return hashlib.sha256(self.canonical()).digest()

    def to_tsv(self) -> str:
        return "\t".join([
            str(self.seq),
            str(self.timestamp_ms),
            self.staff_number or "-",
            self.action,
            self.outcome,
            self.detail,
            self.prev_hash.hex(),
            self.entry_hash.hex(),
        ])


def entry_from_payload(payload: dict) -> AuditEntry:
    return AuditEntry(
        seq=payload["seq"],
        timestamp_ms=payload["timestamp_ms"],
        staff_number=payload.get("staff_number"),
        action=payload["action"],
        outcome=payload["outcome"],
        detail=payload["detail"],
        prev_hash=bytes.fromhex(payload["prev_hash"]),
        entry_hash=bytes.fromhex(payload["entry_hash"]),
    )


def verify_entries(entries: list[AuditEntry]) -> tuple[bool, Optional[int]]:
    """Recompute every link; returns (valid, first_bad_seq)."""
    prev = GENESIS_HASH
    for i, e in enumerate(entries, start=1):
        if e.seq != i or e.prev_hash != prev or e.compute_hash() != e.entry_hash:
            return False, e.seq if e.seq == i else i
        prev = e.entry_hash
    return True, None


class AuditLog:
    """Append-only chain persisted through the shared journal.

    Token codes are registered as forbidden substrings the moment they are
    generated; an append whose detail contains one is rejected outright.
    """

    def __init__(self, journal, clock):
        self.journal = journal
        self.clock = clock
        self._entries: list[AuditEntry] = []
        self._secrets: set[str] = set()
        self._lock = threading.Lock()

    # replay path: trust the journal, rebuild in-memory chain
    def apply(self, payload: dict) -> None:
        self._entries.append(entry_from_payload(payload))

    def forbid(self, secret: str) -> None:
        """Register a secret that must never appear in a detail field."""
        if secret:
            self._secrets.add(secret)

    def append(self, staff_number: Optional[str], action: str, outcome: str,
               detail: str = "") -> AuditEntry:
        if action not in ACTIONS:
            raise ValueError(f"unknown audit action: {action}")
        if outcome not in OUTCOMES:
            raise ValueError(f"unknown audit outcome: {outcome}")
        if len(detail) > MAX_DETAIL:
            raise ValueError("detail too long")
        for secret in self._secrets:
            if secret in detail:
                raise SecretInDetail("detail contains a protected secret")
        with self._lock:
            prev = self._entries[-1].entry_hash if self._entries else GENESIS_HASH
            partial = AuditEntry(
                seq=len(self._entries) + 1,
                timestamp_ms=self.clock.now_ms(),
                staff_number=staff_number,
                action=action,
                outcome=outcome,
                detail=detail,
                prev_hash=prev,
                entry_hash=b"",
            )
            entry = AuditEntry(**{**partial.__dict__, "entry_hash": partial.compute_hash()})
            # journal write first: if it fails the entry never exists
            self.journal.append("Audit", {
                "seq": entry.seq,
                "timestamp_ms": entry.timestamp_ms,
                "staff_number": entry.staff_number,
                "action": entry.action,
                "outcome": entry.outcome,
                "detail": entry.detail,
                "prev_hash": entry.prev_hash.hex(),
                "entry_hash": entry.entry_hash.hex(),
            })
            self._entries.append(entry)
        return entry

    def verify_chain(self) -> dict:
        with self._lock:
            valid, first_bad = verify_entries(list(self._entries))
        result = {"valid": valid}
        if not valid:
            result["first_bad_seq"] = first_bad
        return result

    def query(self, staff_number: Optional[str] = None, action: Optional[str] = None,
              from_ms: Optional[int] = None, to_ms: Optional[int] = None) -> list[AuditEntry]:
        with self._lock:
            out = list(self._entries)
        if staff_number is not None:
            out = [e for e in out if e.staff_number == staff_number]
        if action is not None:
            out = [e for e in out if e.action == action]
        if from_ms is not None:
            out = [e for e in out if e.timestamp_ms >= from_ms]
        if to_ms is not None:
            out = [e for e in out if e.timestamp_ms <= to_ms]
        return out

    def entries(self) -> list[AuditEntry]:
        with self._lock:
            return list(self._entries)

    def export_tsv(self) -> str:
        return "\n".join(e.to_tsv() for e in self.entries())
