"""HTTP face of the service: JSON endpoints for registration, the two-step
login, record access, lockdown, audit queries and the intranet mailbox."""

from __future__ import annotations

import base64
from collections import defaultdict, deque
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import errors as err
from .service import Service

STATUS_BY_CODE = {
    "MalformedField": 400, "WeakPassword": 400, "SecretInDetail": 400,
    "LengthMismatch": 400, "NonpositiveExpected": 400, "EmptyTable": 400,
    "EmptyCounts": 400, "InsufficientData": 400, "OversizeDocument": 400,
    "NotAuthenticated": 401, "BadMailCredentials": 401, "StaleHandle": 401,
    "TokenExpired": 401, "BadConfirmation": 401,
    "NotAdmin": 403, "Forbidden": 403,
    "UnknownStaff": 404, "UnknownRecord": 404, "UnknownMailbox": 404,
    "DuplicateStaffNumber": 409, "DuplicateEmail": 409, "AlreadyLocked": 409,
    "WrongState": 409,
    "VaultLocked": 423,
    "IdentitySuspended": 429, "RateLimited": 429,
    "StorageFailure": 500, "MailboxUnavailable": 500, "JournalCorrupt": 500,
}

# endpoints reachable without any session credential, rate limited per host
UNAUTHENTICATED_PATHS = ("/api/register", "/api/session", "/api/mail/login")


class RegisterBody(BaseModel):
    name: str
    staff_number: str
    email: str
    contact_number: str
    sex: str
    password: str


class CredentialsBody(BaseModel):
    staff_number: str
    password: str


class VerifyBody(BaseModel):
    code: str


class GrantBody(BaseModel):
    role: str


class SealBody(BaseModel):
    student_id: str
    kind: str
    document_b64: str


class LockdownBody(BaseModel):
    confirmation_code: Optional[str] = None


class MailLoginBody(BaseModel):
    email: str
    mail_password: str


class RateLimiter:
    """Sliding-window limit on unauthenticated requests per remote address."""

    def __init__(self, clock, per_second: int):
        self.clock = clock
        self.per_second = per_second
        self._hits: dict[str, deque] = defaultdict(deque)

    def check(self, remote: str) -> None:
        now = self.clock.now()
        window = self._hits[remote]
        while window and now - window[0] >= 1.0:
            window.popleft()
        if len(window) >= self.per_second:
            raise err.RateLimited()
        window.append(now)


def _audit_view(e) -> dict:
    return {
        "seq": e.seq,
        "timestamp_ms": e.timestamp_ms,
        "staff_number": e.staff_number,
        "action": e.action,
        "outcome": e.outcome,
        "detail": e.detail,
        "prev_hash": e.prev_hash.hex(),
        "entry_hash": e.entry_hash.hex(),
    }


def _session_view(s) -> dict:
    return {
        "session_id": s.session_id,
        "state": s.state,
        "staff_number": s.staff_number,
        "access_granted_at": s.access_granted_at,
        "failed_attempts": s.failed_attempts,
    }


def create_app(service: Service, console_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="drlia", docs_url=None, redoc_url=None)
    limiter = RateLimiter(service.clock, service.config.rate_limit_per_second)

    @app.exception_handler(err.DrliaError)
    async def on_error(request: Request, exc: err.DrliaError):
        status = STATUS_BY_CODE.get(exc.code, 500)
        return JSONResponse(status_code=status,
                            content={"error_code": exc.code,
                                     "message": exc.message})

    @app.middleware("http")
    async def rate_limit(request: Request, call_next):
        if request.url.path in UNAUTHENTICATED_PATHS:
            remote = request.client.host if request.client else "unknown"
            try:
                limiter.check(remote)
            except err.RateLimited as exc:
                return JSONResponse(status_code=429,
                                    content={"error_code": exc.code,
                                             "message": "too many requests"})
        return await call_next(request)

    def bearer_session(authorization: Optional[str]):
        if not authorization or not authorization.startswith("Bearer "):
            raise err.NotAuthenticated("missing bearer session")
        return service.resolve_session(authorization.removeprefix("Bearer ").strip())

    @app.get("/api/health")
    async def health():
        return {"status": "ok", "vault": service.vault.state()["state"],
                "journal_entries": len(service.journal)}

    # -- registration and privileges ----------------------------------
    @app.post("/api/register", status_code=201)
    async def register(body: RegisterBody):
        return service.register(body.name, body.staff_number, body.email,
                                body.contact_number, body.sex, body.password)

    # staff numbers contain a slash (EMP/00008), hence the :path converter
    @app.post("/api/staff/{staff_number:path}/grant")
    async def grant(staff_number: str, body: GrantBody,
                    authorization: Optional[str] = Header(default=None)):
        session = bearer_session(authorization)
        ident = service.grant_privilege(session, staff_number, body.role)
        return ident.public_view()

    @app.get("/api/staff")
    async def list_staff(authorization: Optional[str] = Header(default=None)):
        session = bearer_session(authorization)
        actor = service.resolve_session_identity(session)
        if actor.role != "Admin":
            raise err.NotAdmin(actor.staff_number)
        return [i.public_view() for i in service.registry.all_identities()]

    # -- two-step login -------------------------------------------------
    @app.post("/api/session", status_code=201)
    async def begin_session():
        session = service.engine.begin_session()
        return _session_view(session)

    @app.post("/api/session/{session_id}/credentials")
    async def credentials(session_id: str, body: CredentialsBody):
        session = service.resolve_session(session_id)
        session = service.engine.submit_credentials(
            session, body.staff_number, body.password)
        if session.state != "CredentialsVerified":
            return JSONResponse(status_code=401, content={
                "error_code": "BadCredentials",
                "message": "staff number or password not recognized",
                **_session_view(session)})
        return _session_view(session)

    @app.post("/api/session/{session_id}/token")
    async def request_token(session_id: str):
        session = service.resolve_session(session_id)
        ack = service.engine.request_token(session)
        return {**ack, **_session_view(session)}

    @app.post("/api/session/{session_id}/verify")
    async def verify(session_id: str, body: VerifyBody):
        session = service.resolve_session(session_id)
        session = service.engine.submit_token(session, body.code)
        if session.state != "Authenticated":
            return JSONResponse(status_code=401, content={
                "error_code": "BadToken",
                "message": "one-time code not accepted",
                **_session_view(session)})
        return _session_view(session)

    @app.delete("/api/session/{session_id}")
    async def terminate(session_id: str):
        session = service.resolve_session(session_id)
        return _session_view(service.engine.terminate_session(session))

    # -- records -----------------------------------------------------------
    @app.get("/api/records")
    async def list_records(student_id: Optional[str] = Query(default=None),
                           kind: Optional[str] = Query(default=None),
                           authorization: Optional[str] = Header(default=None)):
        session = bearer_session(authorization)
        return service.vault.list_records(session, student_id=student_id,
                                          kind=kind)

    @app.post("/api/records", status_code=201)
    async def seal(body: SealBody,
                   authorization: Optional[str] = Header(default=None)):
        session = bearer_session(authorization)
        document = base64.b64decode(body.document_b64.encode("ascii"))
        rec = service.vault.seal_record(session, body.student_id, body.kind,
                                        document)
        return rec.metadata()

    @app.get("/api/records/{record_id}")
    async def open_record(record_id: str,
                          authorization: Optional[str] = Header(default=None)):
        session = bearer_session(authorization)
        document = service.vault.open_record(session, record_id)
        return {"record_id": record_id,
                "document_b64": base64.b64encode(document).decode("ascii")}

    # -- lockdown --------------------------------------------------------------
    @app.post("/api/lockdown")
    async def lockdown(body: LockdownBody,
                       authorization: Optional[str] = Header(default=None)):
        session = bearer_session(authorization)
        if body.confirmation_code is None:
            ident = service.resolve_session_identity(session)
            if ident.role != "Admin":
                raise err.NotAdmin(ident.staff_number)
            ack = service.engine.issue_confirmation(session)
            return JSONResponse(status_code=202, content={
                "status": "confirmation_sent", **ack})
        return service.vault.lockdown(session, body.confirmation_code)

    # -- audit ---------------------------------------------------------------------
    @app.get("/api/audit")
    async def audit(staff_number: Optional[str] = Query(default=None),
                    action: Optional[str] = Query(default=None),
                    from_ms: Optional[int] = Query(default=None),
                    to_ms: Optional[int] = Query(default=None),
                    authorization: Optional[str] = Header(default=None)):
        session = bearer_session(authorization)
        entries = service.query_audit(session, staff_number=staff_number,
                                      action=action, from_ms=from_ms,
                                      to_ms=to_ms)
        return [_audit_view(e) for e in entries]

    # -- intranet mail ----------------------------------------------------------------
    @app.post("/api/mail/login")
    async def mail_login(body: MailLoginBody):
        handle = service.mail.login_mailbox(body.email, body.mail_password)
        return {"mail_handle": handle}

    @app.get("/api/mail/inbox")
    async def inbox(unread_only: bool = Query(default=False),
                    x_mail_handle: Optional[str] = Header(default=None)):
        if not x_mail_handle:
            raise err.StaleHandle("missing mail handle")
        messages = service.mail.read_inbox(x_mail_handle, unread_only)
        return [{
            "message_id": m.message_id,
            "delivered_at": m.delivered_at,
            "subject": m.subject,
            "body": m.body,
            "read": m.read,
        } for m in messages]

    if console_dir is not None and Path(console_dir).is_dir():
        app.mount("/console", StaticFiles(directory=console_dir, html=True),
                  name="console")

    return app
