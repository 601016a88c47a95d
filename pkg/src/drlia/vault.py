"""Encrypted record store with a one-way lockdown.

Every document is encrypted under its own fresh data key (AES-256-GCM); the
data key is wrapped under a single master key that lives only in service
memory. Lockdown destroys the master key, after which every stored document
is permanently undecryptable — stolen or copied media hold only ciphertext.
"""

from __future__ import annotations

import base64
import secrets
import struct
import threading
from dataclasses import dataclass
from typing import Callable, Optional

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from .errors import (
    AlreadyLocked, BadConfirmation, Forbidden, IntegrityFailure, NotAdmin,
    OversizeDocument, UnknownRecord, VaultLocked,
)

RECORD_KINDS = (
    "LevelResult", "CumulativeResult", "TranscriptIncoming",
    "TranscriptOutgoing", "EntryVerification",
)
MAX_DOCUMENT_BYTES = 16 * 1024 * 1024
SEAL_ROLES = {"Admin", "Officer"}


def _b64(b: bytes) -> str:
    return base64.b64encode(b).decode("ascii")


def _unb64(s: str) -> bytes:
    return base64.b64decode(s.encode("ascii"))


def _data_nonce() -> bytes:
    # 32-bit random prefix + 64-bit counter; each data key encrypts once
    return secrets.token_bytes(4) + struct.pack(">Q", 0)


@dataclass(frozen=True)
class SealedRecord:
    record_id: str
    student_id: str
    kind: str
    ciphertext: bytes
    nonce: bytes
    wrapped_data_key: bytes
    wrap_nonce: bytes
    created_by: str
    created_at: float

    @property
    def associated_data(self) -> bytes:
        return f"{self.record_id}|{self.student_id}|{self.kind}".encode("utf-8")

    def to_payload(self) -> dict:
        return {
            "record_id": self.record_id,
            "student_id": self.student_id,
            "kind": self.kind,
            "ciphertext": _b64(self.ciphertext),
            "nonce": _b64(self.nonce),
            "wrapped_data_key": _b64(self.wrapped_data_key),
            "wrap_nonce": _b64(self.wrap_nonce),
            "created_by": self.created_by,
            "created_at": self.created_at,
        }

    @staticmethod
    def from_payload(p: dict) -> "SealedRecord":
        return SealedRecord(
            record_id=p["record_id"],
            student_id=p["student_id"],
            kind=p["kind"],
            ciphertext=_unb64(p["ciphertext"]),
            nonce=_unb64(p["nonce"]),
            wrapped_data_key=_unb64(p["wrapped_data_key"]),
            wrap_nonce=_unb64(p["wrap_nonce"]),
            created_by=p["created_by"],
            created_at=p["created_at"],
        )

    def metadata(self) -> dict:
        return {
            "record_id": self.record_id,
            "student_id": self.student_id,
            "kind": self.kind,
            "created_by": self.created_by,
            "created_at": self.created_at,
        }


class RecordVault:
    """``session_resolver(session)`` must return the session's StaffIdentity
    or raise NotAuthenticated; ``confirm(session, code)`` consumes a lockdown
    confirmation code and reports whether it was valid."""

    def __init__(self, journal, audit, clock, master_key: bytes,
                 session_resolver: Callable, confirm: Callable):
        if len(master_key) != 32:
            raise ValueError("master key must be 32 bytes")
        self.journal = journal
        self.audit = audit
        self.clock = clock
        self._master = bytearray(master_key)
        self._revoked: Optional[dict] = None  # {"revoked_at", "revoked_by"}
        self._records: dict[str, SealedRecord] = {}
        self._resolve = session_resolver
        self._confirm = confirm
        self._lock = threading.Lock()

    # -- replay -----------------------------------------------------------
    def apply_record(self, payload: dict) -> None:
        rec = SealedRecord.from_payload(payload)
        self._records[rec.record_id] = rec

    def apply_tombstone(self, payload: dict) -> None:
        self._revoked = dict(payload)
        self._zeroize()

    # -- state ---------------------------------------------------------------
    def _zeroize(self) -> None:
        for i in range(len(self._master)):
            self._master[i] = 0

    @property
    def locked(self) -> bool:
        return self._revoked is not None

    def state(self) -> dict:
        if self._revoked is not None:
            return {"state": "Revoked", **self._revoked}
        return {"state": "Active"}

    # -- operations --------------------------------------------------------
    def seal_record(self, session, student_id: str, kind: str,
                    document: bytes) -> SealedRecord:
        ident = self._resolve(session)
        if ident.role not in SEAL_ROLES:
            self.audit.append(ident.staff_number, "Denied", "Failure",
                              f"seal_record forbidden for role {ident.role}")
            raise Forbidden(ident.role)
        if kind not in RECORD_KINDS:
            raise ValueError(f"unknown record kind: {kind}")
        with self._lock:
            if self.locked:
                raise VaultLocked()
            if not document or len(document) > MAX_DOCUMENT_BYTES:
                raise OversizeDocument("document empty or over 16 MiB")
            data_key = secrets.token_bytes(32)
            nonce = _data_nonce()
            record_id = secrets.token_hex(16)
            aad = f"{record_id}|{student_id}|{kind}".encode("utf-8")
            ciphertext = AESGCM(data_key).encrypt(nonce, document, aad)
            wrap_nonce = secrets.token_bytes(12)
            wrapped = AESGCM(bytes(self._master)).encrypt(
                wrap_nonce, data_key, record_id.encode("ascii"))
            rec = SealedRecord(
                record_id=record_id,
                student_id=student_id,
                kind=kind,
                ciphertext=ciphertext,
                nonce=nonce,
                wrapped_data_key=wrapped,
                wrap_nonce=wrap_nonce,
                created_by=ident.staff_number,
                created_at=self.clock.now(),
            )
            self.audit.append(ident.staff_number, "RecordSealed", "Success",
                              f"sealed {kind} {record_id} for {student_id}")
            self.journal.append("SealedRecord", rec.to_payload())
            self._records[record_id] = rec
        return rec

    def open_record(self, session, record_id: str) -> bytes:
        ident = self._resolve(session)
        with self._lock:
            rec = self._records.get(record_id)
            if rec is None:
                raise UnknownRecord(record_id)
            if self.locked:
                raise VaultLocked()
            try:
                data_key = AESGCM(bytes(self._master)).decrypt(
                    rec.wrap_nonce, rec.wrapped_data_key,
                    rec.record_id.encode("ascii"))
                document = AESGCM(data_key).decrypt(
                    rec.nonce, rec.ciphertext, rec.associated_data)
            except InvalidTag as exc:
                raise IntegrityFailure(f"record {record_id} failed "
                                       "authentication") from exc
            self.audit.append(ident.staff_number, "RecordOpened", "Success",
                              f"opened {record_id}")
        return document

    def list_records(self, session, student_id: Optional[str] = None,
                     kind: Optional[str] = None) -> list[dict]:
        self._resolve(session)
        with self._lock:
            recs = sorted(self._records.values(), key=lambda r: r.created_at)
        if student_id is not None:
            recs = [r for r in recs if r.student_id == student_id]
        if kind is not None:
            recs = [r for r in recs if r.kind == kind]
        return [r.metadata() for r in recs]

    def lockdown(self, session, confirmation_code: str) -> dict:
        ident = self._resolve(session)
        if ident.role != "Admin":
            self.audit.append(ident.staff_number, "Denied", "Failure",
                              "lockdown attempted by non-admin")
            raise NotAdmin(ident.staff_number)
        with self._lock:
            if self.locked:
                raise AlreadyLocked()
            if not self._confirm(session, confirmation_code):
                raise BadConfirmation()
            revoked = {"revoked_at": self.clock.now(),
                       "revoked_by": ident.staff_number}
            self.audit.append(ident.staff_number, "Lockdown", "Success",
                              "master key revoked")
            self.journal.append("Tombstone", revoked)
            self._revoked = revoked
            self._zeroize()
        return self.state()
