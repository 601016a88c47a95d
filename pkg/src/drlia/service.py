"""Composition root: wires registry, mail, auth engine, vault and audit log
over one shared journal, and replays that journal at startup.

The gateway and the CLI talk to this object; tests can drive it directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .audit import AuditLog
from .auth import (
    DEFAULT_FAILURE_WINDOW, DEFAULT_IDLE_TIMEOUT, DEFAULT_MAX_FAILURES,
    DEFAULT_TOKEN_TTL, AuthEngine, AuthSession,
)
from .clock import Clock
from .errors import JournalCorrupt, NotAdmin, NotAuthenticated, UnknownStaff
from .identity import DEFAULT_KDF_ITERATIONS, IdentityRegistry, StaffIdentity
from .journal import Journal, replay
from .mail import MailService
from .vault import RecordVault


@dataclass
class ServiceConfig:
    journal_path: Optional[Path] = None
    master_key: bytes = field(default_factory=lambda: b"\x00" * 32)
    token_ttl: int = DEFAULT_TOKEN_TTL
    kdf_iterations: int = DEFAULT_KDF_ITERATIONS
    max_failures: int = DEFAULT_MAX_FAILURES
    failure_window: int = DEFAULT_FAILURE_WINDOW
    idle_timeout: int = DEFAULT_IDLE_TIMEOUT
    rate_limit_per_second: int = 10
    bootstrap_admin: Optional[str] = None  # staff number activated as Admin


class Service:
    def __init__(self, config: ServiceConfig, clock: Optional[Clock] = None):
        self.config = config
        self.clock = clock or Clock()
        self.journal = Journal(config.journal_path, self.clock)
        self.audit = AuditLog(self.journal, self.clock)
        self.registry = IdentityRegistry(
            self.journal, self.audit, self.clock, config.kdf_iterations)
        self.mail = MailService(self.journal, self.clock, config.kdf_iterations)
        self.engine = AuthEngine(
            self.registry, self.mail, self.audit, self.journal, self.clock,
            token_ttl=config.token_ttl,
            max_failures=config.max_failures,
            failure_window=config.failure_window,
            idle_timeout=config.idle_timeout,
        )
        self.vault = RecordVault(
            self.journal, self.audit, self.clock, config.master_key,
            session_resolver=self.resolve_session_identity,
            confirm=self.engine.consume_confirmation,
        )
        self._replay()
        self._bootstrap()

    def _replay(self) -> None:
        entries = self.journal.entries()
        if not entries:
            return
        replay(entries, {
            "Identity": self.registry.apply,
            "Mailbox": self.mail.apply_mailbox,
            "MailMessage": self.mail.apply_message,
            "Token": self.engine.apply_token,
            "Session": self.engine.apply_session,
            "SealedRecord": self.vault.apply_record,
            "Audit": self.audit.apply,
            "Tombstone": self.vault.apply_tombstone,
        })
        check = self.audit.verify_chain()
        if not check["valid"]:
            raise JournalCorrupt(check["first_bad_seq"],
                                 "audit chain broken in journal")

    def _bootstrap(self) -> None:
        """First-admin seeding: activate the configured staff number as Admin
        when no Active admin exists yet."""
        target = self.config.bootstrap_admin
        if not target:
            return
        has_admin = any(i.role == "Admin" and i.status == "Active"
                        for i in self.registry.all_identities())
        if has_admin:
            return
        if self.registry.get(target) is not None:
            self.registry.grant("system", target, "Admin")

    # -- session plumbing -------------------------------------------------
    def resolve_session(self, session_id: str) -> AuthSession:
        session = self.engine.get_session(session_id)
        if session is None:
            raise NotAuthenticated("unknown session")
        return session

    def resolve_session_identity(self, session: AuthSession) -> StaffIdentity:
        """Identity behind an Authenticated session, or NotAuthenticated."""
        if self.engine._effective_state(session) != "Authenticated":
            raise NotAuthenticated()
        ident = self.registry.get(session.staff_number or "")
        if ident is None:
            raise NotAuthenticated()
        return ident

    # -- orchestrated operations --------------------------------------------
    def register(self, name: str, staff_number: str, email: str,
                 contact_number: str, sex: str, password: str) -> dict:
        ident = self.registry.register_staff(
            name, staff_number, email, contact_number, sex, password)
        mail_password = self.mail.provision(email)
        if staff_number == self.config.bootstrap_admin:
            self._bootstrap()
            ident = self.registry.get(staff_number)
        return {"identity": ident.public_view(), "mail_password": mail_password}

    def grant_privilege(self, actor_session: AuthSession, staff_number: str,
                        role: str) -> StaffIdentity:
        actor = self.resolve_session_identity(actor_session)
        if actor.role != "Admin":
            self.audit.append(actor.staff_number, "Denied", "Failure",
                              f"grant attempted by {actor.role}")
            raise NotAdmin(actor.staff_number)
        if self.registry.get(staff_number) is None:
            raise UnknownStaff(staff_number)
        return self.registry.grant(actor.staff_number, staff_number, role)

    def query_audit(self, session: AuthSession, **filters):
        actor = self.resolve_session_identity(session)
        if actor.role != "Admin":
            self.audit.append(actor.staff_number, "Denied", "Failure",
                              "audit query attempted by non-admin")
            raise NotAdmin(actor.staff_number)
        return self.audit.query(**filters)

    def close(self) -> None:
        self.journal.close()
