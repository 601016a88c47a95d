"""Three-stage authentication engine.

Stage 1 checks staff number + password, stage 2 issues a single-use code to
the user's intranet mailbox, stage 3 verifies the code against the same
session — access is granted only when both prior stages succeeded for one
session and one identity. Every attempt is audited, repeated failures
suspend the identity, and the access-grant time is recorded.
"""

from __future__ import annotations

import hmac
import secrets
import threading
import uuid
from dataclasses import dataclass
from typing import Optional

from .errors import (
    EntropyUnavailable, IdentitySuspended, MailboxUnavailable, TokenExpired,
    WrongState,
)

# 32 symbols: uppercase letters and digits minus the look-alikes O, 0, I, 1
CODE_ALPHABET = "ABCDEFGHJKLMNPQRSTUVWXYZ23456789"
CODE_LENGTH = 8

STATES = ("AwaitingCredentials", "CredentialsVerified", "TokenIssued",
          "Authenticated", "Terminated")

DEFAULT_TOKEN_TTL = 300
DEFAULT_MAX_FAILURES = 5
DEFAULT_FAILURE_WINDOW = 900
DEFAULT_IDLE_TIMEOUT = 1800

PURPOSE_LOGIN = "Login"
PURPOSE_LOCKDOWN = "Lockdown"

TOKEN_MAIL_SUBJECT = "DRLIA access code"
LOCKDOWN_MAIL_SUBJECT = "DRLIA lockdown confirmation"


def generate_code(entropy=secrets) -> str:
    """8 symbols drawn uniformly from the 32-symbol alphabet (40 bits)."""
    try:
        return "".join(entropy.choice(CODE_ALPHABET) for _ in range(CODE_LENGTH))
    except NotImplementedError as exc:
        raise EntropyUnavailable(str(exc)) from exc


@dataclass
class OneTimeToken:
    token_id: str
    staff_number: str
    code: str
    issued_at: float
    ttl_seconds: int
    consumed: bool
    bound_session: str
    purpose: str
    voided: bool = False

    def is_live(self, now: float) -> bool:
        return (not self.consumed and not self.voided
                and (now - self.issued_at) <= self.ttl_seconds)

    def to_payload(self) -> dict:
        return {
            "token_id": self.token_id,
            "staff_number": self.staff_number,
            "code": self.code,
            "issued_at": self.issued_at,
            "ttl_seconds": self.ttl_seconds,
            "consumed": self.consumed,
            "bound_session": self.bound_session,
            "purpose": self.purpose,
            "voided": self.voided,
        }


@dataclass
class AuthSession:
    session_id: str
    staff_number: Optional[str]
    state: str
    created_at: float
    last_activity: float
    access_granted_at: Optional[float]
    failed_attempts: int

    def to_payload(self) -> dict:
        return {
            "session_id": self.session_id,
            "staff_number": self.staff_number,
            "state": self.state,
            "created_at": self.created_at,
            "last_activity": self.last_activity,
            "access_granted_at": self.access_granted_at,
            "failed_attempts": self.failed_attempts,
        }


class AuthEngine:
    """Session state machine; all transitions are serialized on one lock so
    token consumption and the matching state change commit together."""

    def __init__(self, registry, mail, audit, journal, clock,
                 token_ttl: int = DEFAULT_TOKEN_TTL,
                 max_failures: int = DEFAULT_MAX_FAILURES,
                 failure_window: int = DEFAULT_FAILURE_WINDOW,
                 idle_timeout: int = DEFAULT_IDLE_TIMEOUT):
        self.registry = registry
        self.mail = mail
        self.audit = audit
        self.journal = journal
        self.clock = clock
        self.token_ttl = token_ttl
        self.max_failures = max_failures
        self.failure_window = failure_window
        self.idle_timeout = idle_timeout
        self._sessions: dict[str, AuthSession] = {}
        self._tokens: dict[str, OneTimeToken] = {}
        self._live: dict[tuple[str, str], str] = {}  # (session_id, purpose) -> token_id
        self._failures: dict[str, list[float]] = {}  # staff_number -> failure times
        self._lock = threading.RLock()

    # -- replay ----------------------------------------------------------
    def apply_session(self, payload: dict) -> None:
        s = AuthSession(**payload)
        self._sessions[s.session_id] = s

    def apply_token(self, payload: dict) -> None:
        t = OneTimeToken(**payload)
        self._tokens[t.token_id] = t
        key = (t.bound_session, t.purpose)
        if not t.consumed and not t.voided:
            self._live[key] = t.token_id
        elif self._live.get(key) == t.token_id:
            del self._live[key]
        self.audit.forbid(t.code)

    # -- helpers -----------------------------------------------------------
    def _persist_session(self, s: AuthSession) -> None:
        self.journal.append("Session", s.to_payload())

    def _persist_token(self, t: OneTimeToken) -> None:
        self.journal.append("Token", t.to_payload())

    def _effective_state(self, s: AuthSession) -> str:
        if s.state != "Terminated" and \
                (self.clock.now() - s.last_activity) > self.idle_timeout:
            return "Terminated"
        return s.state

    def _void_live(self, session_id: str, purpose: str) -> None:
        token_id = self._live.pop((session_id, purpose), None)
        if token_id is not None:
            t = self._tokens[token_id]
            t.voided = True
            self._persist_token(t)

    def _record_failure(self, session: AuthSession,
                        staff_number: Optional[str]) -> None:
        """Count a failed attempt; crossing the limit inside the window
        suspends the identity and terminates the session."""
        session.failed_attempts += 1
        ident = self.registry.get(staff_number) if staff_number else None
        if ident is None:
            self._persist_session(session)
            return
        now = self.clock.now()
        times = self._failures.setdefault(staff_number, [])
        times.append(now)
        times[:] = [t for t in times if now - t <= self.failure_window]
        if len(times) >= self.max_failures and ident.status == "Active":
            self.registry.set_status(staff_number, "Suspended")
            self.audit.append(staff_number, "Suspend", "Success",
                              f"suspended after {len(times)} failures")
            session.state = "Terminated"
            self._void_live(session.session_id, PURPOSE_LOGIN)
            self._void_live(session.session_id, PURPOSE_LOCKDOWN)
        self._persist_session(session)

    # -- operations --------------------------------------------------------
    def begin_session(self) -> AuthSession:
        now = self.clock.now()
        session = AuthSession(
            session_id=uuid.uuid4().hex,
            staff_number=None,
            state="AwaitingCredentials",
            created_at=now,
            last_activity=now,
            access_granted_at=None,
            failed_attempts=0,
        )
        with self._lock:
            self._persist_session(session)
            self._sessions[session.session_id] = session
        return session

    def get_session(self, session_id: str) -> Optional[AuthSession]:
        with self._lock:
            return self._sessions.get(session_id)

    def sessions(self) -> list[AuthSession]:
        with self._lock:
            return sorted(self._sessions.values(), key=lambda s: s.created_at)

    def submit_credentials(self, session: AuthSession, staff_number: str,
                           password: str) -> AuthSession:
        with self._lock:
            if self._effective_state(session) != "AwaitingCredentials":
                self.audit.append(staff_number, "Denied", "Failure",
                                  "credentials submitted in wrong state")
                raise WrongState("submit_credentials requires AwaitingCredentials")
            ident = self.registry.get(staff_number)
            if ident is not None and ident.status == "Suspended":
                self.audit.append(staff_number, "Denied", "Failure",
                                  "identity suspended")
                raise IdentitySuspended(staff_number)
            if self.registry.verify_password(staff_number, password):
                # audit write precedes any state change (fail-closed)
                self.audit.append(staff_number, "LoginStep1", "Success",
                                  "credentials verified")
                session.last_activity = self.clock.now()
                session.state = "CredentialsVerified"
                session.staff_number = staff_number
                self._persist_session(session)
            else:
                self.audit.append(staff_number, "LoginStep1", "Failure",
                                  "credential check failed")
                session.last_activity = self.clock.now()
                self._record_failure(session, staff_number)
        return session

    def request_token(self, session: AuthSession) -> dict:
        with self._lock:
            state = self._effective_state(session)
            if state not in ("CredentialsVerified", "TokenIssued"):
                raise WrongState("request_token requires CredentialsVerified")
            ident = self.registry.get(session.staff_number)
            if ident is None or not self.mail.has_mailbox(ident.email):
                self._void_live(session.session_id, PURPOSE_LOGIN)
                session.state = "CredentialsVerified"
                self._persist_session(session)
                raise MailboxUnavailable(session.staff_number or "")
            self.audit.append(session.staff_number, "TokenIssued", "Success",
                              f"one-time code mailed to {ident.email}")
            token = self._issue(session, PURPOSE_LOGIN, ident.email,
                                TOKEN_MAIL_SUBJECT)
            session.state = "TokenIssued"
            session.last_activity = self.clock.now()
            self._persist_session(session)
        return {"delivered": True, "ttl_seconds": token.ttl_seconds}

    def _issue(self, session: AuthSession, purpose: str, email: str,
               subject: str) -> OneTimeToken:
        self._void_live(session.session_id, purpose)
        code = generate_code()
        self.audit.forbid(code)
        token = OneTimeToken(
            token_id=uuid.uuid4().hex,
            staff_number=session.staff_number or "",
            code=code,
            issued_at=self.clock.now(),
            ttl_seconds=self.token_ttl,
            consumed=False,
            bound_session=session.session_id,
            purpose=purpose,
        )
        self._persist_token(token)
        self._tokens[token.token_id] = token
        self._live[(session.session_id, purpose)] = token.token_id
        self.mail.deliver(email, subject,
                          f"Your one-time code is: {code} (valid {token.ttl_seconds}s)")
        return token

    def submit_token(self, session: AuthSession, code: str) -> AuthSession:
        with self._lock:
            if self._effective_state(session) != "TokenIssued":
                self.audit.append(session.staff_number, "Denied", "Failure",
                                  "token submitted in wrong state")
                raise WrongState("submit_token requires TokenIssued")
            now = self.clock.now()
            token_id = self._live.get((session.session_id, PURPOSE_LOGIN))
            token = self._tokens.get(token_id) if token_id else None
            # expiry is checked (and reported) before any code comparison
            if token is None or (now - token.issued_at) > token.ttl_seconds:
                self.audit.append(session.staff_number, "Denied", "Failure",
                                  "one-time code expired")
                self._record_failure(session, session.staff_number)
                raise TokenExpired()
            if not hmac.compare_digest(code.encode(), token.code.encode()):
                self.audit.append(session.staff_number, "Denied", "Failure",
                                  "one-time code mismatch")
                session.last_activity = now
                self._record_failure(session, session.staff_number)
                return session
            # audit first, then consume and grant atomically
            self.audit.append(session.staff_number, "AccessGranted", "Success",
                              f"access granted at {now:.3f}")
            token.consumed = True
            self._live.pop((session.session_id, PURPOSE_LOGIN), None)
            self._persist_token(token)
            session.last_activity = now
            session.state = "Authenticated"
            session.access_granted_at = now
            self._persist_session(session)
        return session

    def terminate_session(self, session: AuthSession) -> AuthSession:
        with self._lock:
            if session.state == "Terminated":
                return session
            was_authenticated = session.state == "Authenticated"
            self._void_live(session.session_id, PURPOSE_LOGIN)
            self._void_live(session.session_id, PURPOSE_LOCKDOWN)
            session.state = "Terminated"
            session.last_activity = self.clock.now()
            if was_authenticated:
                self.audit.append(session.staff_number, "Logout", "Success", "")
            self._persist_session(session)
        return session

    # -- lockdown confirmation codes ------------------------------------
    def issue_confirmation(self, session: AuthSession) -> dict:
        """Mail a single-use confirmation code for the destructive lockdown."""
        with self._lock:
            if self._effective_state(session) != "Authenticated":
                raise WrongState("confirmation requires an authenticated session")
            ident = self.registry.get(session.staff_number)
            if ident is None or not self.mail.has_mailbox(ident.email):
                raise MailboxUnavailable(session.staff_number or "")
            token = self._issue(session, PURPOSE_LOCKDOWN, ident.email,
                                LOCKDOWN_MAIL_SUBJECT)
        return {"delivered": True, "ttl_seconds": token.ttl_seconds}

    def consume_confirmation(self, session: AuthSession, code: str) -> bool:
        with self._lock:
            now = self.clock.now()
            token_id = self._live.get((session.session_id, PURPOSE_LOCKDOWN))
            token = self._tokens.get(token_id) if token_id else None
            if token is None or (now - token.issued_at) > token.ttl_seconds:
                return False
            if not hmac.compare_digest(code.encode(), token.code.encode()):
                return False
            token.consumed = True
            self._live.pop((session.session_id, PURPOSE_LOCKDOWN), None)
            self._persist_token(token)
        return True

    def live_token_for(self, session_id: str,
                       purpose: str = PURPOSE_LOGIN) -> Optional[OneTimeToken]:
        """Test hook: the currently live token for a session, if any."""
        with self._lock:
            token_id = self._live.get((session_id, purpose))
            return self._tokens.get(token_id) if token_id else None
