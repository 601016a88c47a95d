"""Intranet mailbox: the in-system delivery channel for one-time codes.

One mailbox per registered email, provisioned at registration with its own
random password (independent of the login password). Delivery is in-process;
``transport`` is a seam where an SMTP relay could be plugged in instead.
"""

from __future__ import annotations

import secrets
import string
import threading
import uuid
from dataclasses import dataclass, replace
from typing import Callable, Optional

from .errors import BadMailCredentials, StaleHandle, UnknownMailbox
from .identity import CredentialRecord, credential_matches, derive_credential

MAIL_PASSWORD_LEN = 12
_MAIL_PW_ALPHABET = string.ascii_letters + string.digits


@dataclass(frozen=True)
class MailMessage:
    message_id: str
    delivered_at: float
    subject: str
    body: str
    read: bool

    def to_payload(self, email: str) -> dict:
        return {
            "email": email,
            "message_id": self.message_id,
            "delivered_at": self.delivered_at,
            "subject": self.subject,
            "body": self.body,
            "read": self.read,
        }


class Mailbox:
    def __init__(self, email: str, credential: CredentialRecord):
        self.email = email
        self.credential = credential
        self.messages: list[MailMessage] = []


class MailService:
    def __init__(self, journal, clock, kdf_iterations: int = 100_000,
                 transport: Optional[Callable[[str, str, str], None]] = None):
        self.journal = journal
        self.clock = clock
        self.kdf_iterations = kdf_iterations
        self.transport = transport
        self._boxes: dict[str, Mailbox] = {}
        self._handles: dict[str, str] = {}  # handle id -> email (not persisted)
        self._lock = threading.Lock()

    # -- replay ---------------------------------------------------------
    def apply_mailbox(self, payload: dict) -> None:
        self._boxes[payload["email"]] = Mailbox(
            payload["email"], CredentialRecord.from_payload(payload["credential"]))

    def apply_message(self, payload: dict) -> None:
        box = self._boxes.get(payload["email"])
        if box is None:
            return
        for i, m in enumerate(box.messages):
            if m.message_id == payload["message_id"]:
                box.messages[i] = replace(m, read=payload["read"])
                return
        box.messages.append(MailMessage(
            message_id=payload["message_id"],
            delivered_at=payload["delivered_at"],
            subject=payload["subject"],
            body=payload["body"],
            read=payload["read"],
        ))

    # -- provisioning -----------------------------------------------------
    def provision(self, email: str) -> str:
        """Create the mailbox and return its one-time-displayed password."""
        password = "".join(secrets.choice(_MAIL_PW_ALPHABET)
                           for _ in range(MAIL_PASSWORD_LEN))
        credential = derive_credential(password, self.kdf_iterations)
        with self._lock:
            self.journal.append("Mailbox", {
                "email": email, "credential": credential.to_payload()})
            self._boxes[email] = Mailbox(email, credential)
        return password

    # -- operations -----------------------------------------------------------
    def deliver(self, email: str, subject: str, body: str) -> str:
        with self._lock:
            box = self._boxes.get(email)
            if box is None:
                raise UnknownMailbox(email)
            message = MailMessage(
                message_id=uuid.uuid4().hex,
                delivered_at=self.clock.now(),
                subject=subject,
                body=body,
                read=False,
            )
            self.journal.append("MailMessage", message.to_payload(email))
            box.messages.append(message)
        if self.transport is not None:
            self.transport(email, subject, body)
        return message.message_id

    def login_mailbox(self, email: str, mail_password: str) -> str:
        """Returns an opaque handle; unknown address and wrong password are
        deliberately indistinguishable."""
        with self._lock:
            box = self._boxes.get(email)
        if box is None:
            derive_credential(mail_password, self.kdf_iterations)
            raise BadMailCredentials()
        if not credential_matches(box.credential, mail_password):
            raise BadMailCredentials()
        handle = uuid.uuid4().hex
        with self._lock:
            self._handles[handle] = email
        return handle

    def read_inbox(self, handle: str, unread_only: bool = False) -> list[MailMessage]:
        with self._lock:
            email = self._handles.get(handle)
            if email is None:
                raise StaleHandle()
            box = self._boxes[email]
            selected = [m for m in box.messages if not (unread_only and m.read)]
            for m in selected:
                if not m.read:
                    marked = replace(m, read=True)
                    self.journal.append("MailMessage", marked.to_payload(email))
                    box.messages[box.messages.index(m)] = marked
            selected = [replace(m, read=True) for m in selected]
        return sorted(selected, key=lambda m: m.delivered_at, reverse=True)

    def has_mailbox(self, email: str) -> bool:
        with self._lock:
            return email in self._boxes
