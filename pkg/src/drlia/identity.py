"""Staff identity registry: registration validation, credential storage,
admin-only privilege granting.

Passwords are stored only as salted PBKDF2-HMAC-SHA256 digests; cost
parameters are recorded per credential so they can be raised later without
invalidating existing credentials.
"""

from __future__ import annotations

import hashlib
import hmac
import re
import secrets
import threading
from dataclasses import dataclass, replace
from typing import Optional

from .errors import (
    DuplicateEmail, DuplicateStaffNumber, MalformedField, UnknownStaff,
    WeakPassword,
)

STAFF_NUMBER_RE = re.compile(r"EMP/\d{5}")
CONTACT_RE = re.compile(r"\+?\d{7,15}")
SEXES = {"Male", "Female"}
ROLES = {"Admin", "Officer", "ReadOnly"}
STATUSES = {"PendingApproval", "Active", "Suspended"}

MIN_PASSWORD_LEN = 10
DEFAULT_KDF_ITERATIONS = 100_000
SALT_BYTES = 16


def validate_staff_number(candidate: str) -> bool:
    return bool(STAFF_NUMBER_RE.fullmatch(candidate))


def validate_email(candidate: str) -> bool:
    if candidate.count("@") != 1:
        return False
    local, domain = candidate.split("@")
    return bool(local) and bool(domain)


@dataclass(frozen=True)
class CredentialRecord:
    salt: bytes
    digest: bytes
    kdf_name: str
    kdf_iterations: int

    def to_payload(self) -> dict:
        return {
            "salt": self.salt.hex(),
            "digest": self.digest.hex(),
            "kdf_name": self.kdf_name,
            "kdf_iterations": self.kdf_iterations,
        }

    @staticmethod
    def from_payload(p: dict) -> "CredentialRecord":
        return CredentialRecord(
            salt=bytes.fromhex(p["salt"]),
            digest=bytes.fromhex(p["digest"]),
            kdf_name=p["kdf_name"],
            kdf_iterations=p["kdf_iterations"],
        )


def derive_credential(password: str, iterations: int = DEFAULT_KDF_ITERATIONS,
                      salt: Optional[bytes] = None) -> CredentialRecord:
    salt = salt if salt is not None else secrets.token_bytes(SALT_BYTES)
    digest = hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, iterations)
    return CredentialRecord(salt, digest, "pbkdf2_sha256", iterations)


def credential_matches(cred: CredentialRecord, password: str) -> bool:
    """Constant-time comparison of the derived digest."""
    candidate = hashlib.pbkdf2_hmac(
        "sha256", password.encode("utf-8"), cred.salt, cred.kdf_iterations)
    return hmac.compare_digest(candidate, cred.digest)


@dataclass(frozen=True)
class StaffIdentity:
    staff_number: str
    name: str
    email: str
    contact_number: str
    sex: str
    role: str
    status: str
    credential: CredentialRecord
    created_at: int  # epoch seconds

    def to_payload(self) -> dict:
        return {
            "staff_number": self.staff_number,
            "name": self.name,
            "email": self.email,
            "contact_number": self.contact_number,
            "sex": self.sex,
            "role": self.role,
            "status": self.status,
            "credential": self.credential.to_payload(),
            "created_at": self.created_at,
        }

    @staticmethod
    def from_payload(p: dict) -> "StaffIdentity":
        return StaffIdentity(
            staff_number=p["staff_number"],
            name=p["name"],
            email=p["email"],
            contact_number=p["contact_number"],
            sex=p["sex"],
            role=p["role"],
            status=p["status"],
            credential=CredentialRecord.from_payload(p["credential"]),
            created_at=p["created_at"],
        )

    def public_view(self) -> dict:
        return {
            "staff_number": self.staff_number,
            "name": self.name,
            "email": self.email,
            "contact_number": self.contact_number,
            "sex": self.sex,
            "role": self.role,
            "status": self.status,
            "created_at": self.created_at,
        }


class IdentityRegistry:
    """Holds staff identities; mutations are serialized and journaled as
    whole-identity snapshots (last snapshot wins on replay)."""

    def __init__(self, journal, audit, clock,
                 kdf_iterations: int = DEFAULT_KDF_ITERATIONS):
        self.journal = journal
        self.audit = audit
        self.clock = clock
        self.kdf_iterations = kdf_iterations
        self._by_number: dict[str, StaffIdentity] = {}
        self._lock = threading.Lock()

    def apply(self, payload: dict) -> None:
        ident = StaffIdentity.from_payload(payload)
        self._by_number[ident.staff_number] = ident

    def _persist(self, ident: StaffIdentity) -> None:
        self.journal.append("Identity", ident.to_payload())
        self._by_number[ident.staff_number] = ident

    def register_staff(self, name: str, staff_number: str, email: str,
                       contact_number: str, sex: str, password: str) -> StaffIdentity:
        if not name:
            raise MalformedField("name")
        if not validate_staff_number(staff_number):
            raise MalformedField("staff_number")
        if not validate_email(email):
            raise MalformedField("email")
        if not CONTACT_RE.fullmatch(contact_number or ""):
            raise MalformedField("contact_number")
        if sex not in SEXES:
            raise MalformedField("sex")
        if len(password) < MIN_PASSWORD_LEN:
            raise WeakPassword(f"password must be at least {MIN_PASSWORD_LEN} characters")
        with self._lock:
            if staff_number in self._by_number:
                raise DuplicateStaffNumber(staff_number)
            if any(i.email == email for i in self._by_number.values()):
                raise DuplicateEmail(email)
            ident = StaffIdentity(
                staff_number=staff_number,
                name=name,
                email=email,
                contact_number=contact_number,
                sex=sex,
                role="ReadOnly",
                status="PendingApproval",
                credential=derive_credential(password, self.kdf_iterations),
                created_at=int(self.clock.now()),
            )
            self.audit.append(staff_number, "Register", "Success", "new registration")
            self._persist(ident)
        return ident

    def get(self, staff_number: str) -> Optional[StaffIdentity]:
        with self._lock:
            return self._by_number.get(staff_number)

    def get_by_email(self, email: str) -> Optional[StaffIdentity]:
        with self._lock:
            for ident in self._by_number.values():
                if ident.email == email:
                    return ident
        return None

    def all_identities(self) -> list[StaffIdentity]:
        with self._lock:
            return sorted(self._by_number.values(), key=lambda i: i.staff_number)

    def verify_password(self, staff_number: str, password: str) -> bool:
        ident = self.get(staff_number)
        if ident is None or ident.status != "Active":
            # burn the same KDF work so timing does not reveal existence
            derive_credential(password, self.kdf_iterations)
            return False
        return credential_matches(ident.credential, password)

    def set_status(self, staff_number: str, status: str) -> StaffIdentity:
        if status not in STATUSES:
            raise ValueError(f"unknown status: {status}")
        with self._lock:
            ident = self._by_number.get(staff_number)
            if ident is None:
                raise UnknownStaff(staff_number)
            updated = replace(ident, status=status)
            self._persist(updated)
        return updated

    def grant(self, actor_staff_number: str, staff_number: str, role: str) -> StaffIdentity:
        """Privilege grant; role/authentication checks happen in the service
        layer, which knows about sessions. Target becomes Active."""
        if role not in ROLES:
            raise MalformedField("role")
        with self._lock:
            ident = self._by_number.get(staff_number)
            if ident is None:
                raise UnknownStaff(staff_number)
            updated = replace(ident, role=role, status="Active")
            self.audit.append(actor_staff_number, "GrantPrivilege", "Success",
                              f"granted {role} to {staff_number}")
            self._persist(updated)
        return updated
