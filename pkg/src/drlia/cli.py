"""Operator command line: serve the gateway, drive registration/approval
against a running instance, perform the confirmed lockdown, verify or export
audit journals offline, and run the survey statistics on CSV files."""

from __future__ import annotations

import re
import secrets
import sys
from pathlib import Path

import click
import httpx

from . import stats as st
from .audit import entry_from_payload, verify_entries
from .auth import LOCKDOWN_MAIL_SUBJECT
from .errors import DrliaError
from .journal import read_journal_file
from .service import Service, ServiceConfig

CODE_RE = re.compile(r"Your one-time code is: ([A-HJ-NP-Z2-9]{8})")


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _api(method: str, url: str, path: str, session_id: str | None = None,
         **kwargs) -> dict:
    headers = kwargs.pop("headers", {})
    if session_id:
        headers["Authorization"] = f"Bearer {session_id}"
    resp = httpx.request(method, url.rstrip("/") + path, headers=headers,
                         timeout=30.0, **kwargs)
    body = resp.json() if resp.content else {}
    if resp.status_code >= 400:
        _fail(f"{body.get('error_code', resp.status_code)}: "
              f"{body.get('message', resp.text)}")
    return body


def _load_master_key(path: str | None) -> bytes:
    if path is None:
        click.echo("warning: no --master-key-file given; using an ephemeral "
                   "key (records will be unreadable after restart)", err=True)
        return secrets.token_bytes(32)
    raw = Path(path).read_bytes().strip()
    if len(raw) == 64:
        return bytes.fromhex(raw.decode("ascii"))
    if len(raw) == 32:
        return raw
    raise click.ClickException("master key file must hold 32 raw bytes or 64 hex chars")


@click.group()
def main():
    """Secure examinations-and-records service."""


@main.command()
@click.option("--port", envvar="DRLIA_PORT", default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--journal", envvar="DRLIA_JOURNAL", type=click.Path(), default=None)
@click.option("--master-key-file", envvar="DRLIA_MASTER_KEY_FILE",
              type=click.Path(exists=True), default=None)
@click.option("--token-ttl", envvar="DRLIA_TOKEN_TTL", default=300,
              show_default=True, help="one-time code lifetime in seconds")
@click.option("--bootstrap-admin", envvar="DRLIA_BOOTSTRAP_ADMIN", default=None,
              help="staff number activated as Admin when no admin exists yet")
@click.option("--console-dir", envvar="DRLIA_CONSOLE_DIR",
              type=click.Path(), default=None)
@click.option("--rate-limit", envvar="DRLIA_RATE_LIMIT", default=10,
              show_default=True, help="unauthenticated requests/second/address")
def serve(port, host, journal, master_key_file, token_ttl, bootstrap_admin,
          console_dir, rate_limit):
    """Start the HTTP gateway."""
    import uvicorn
    from .gateway import create_app
    config = ServiceConfig(
        journal_path=Path(journal) if journal else None,
        master_key=_load_master_key(master_key_file),
        token_ttl=token_ttl,
        bootstrap_admin=bootstrap_admin,
        rate_limit_per_second=rate_limit,
    )
    try:
        service = Service(config)
    except DrliaError as exc:
        _fail(f"{exc.code}: {exc.message}")
    app = create_app(service, Path(console_dir) if console_dir else None)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option("--url", default="http://127.0.0.1:8080", show_default=True)
@click.option("--name", required=True)
@click.option("--staff-number", required=True)
@click.option("--email", required=True)
@click.option("--contact-number", required=True)
@click.option("--sex", type=click.Choice(["Male", "Female"]), required=True)
@click.option("--password", required=True)
def register(url, name, staff_number, email, contact_number, sex, password):
    """Register a new staff identity (pending admin approval)."""
    body = _api("POST", url, "/api/register", json={
        "name": name, "staff_number": staff_number, "email": email,
        "contact_number": contact_number, "sex": sex, "password": password,
    })
    click.echo(f"registered {body['identity']['staff_number']} "
               f"({body['identity']['status']})")
    click.echo(f"mail password (shown once): {body['mail_password']}")


@main.command()
@click.option("--url", default="http://127.0.0.1:8080", show_default=True)
@click.option("--session", "session_id", required=True,
              help="authenticated admin session id")
@click.option("--staff-number", required=True)
@click.option("--role", type=click.Choice(["Admin", "Officer", "ReadOnly"]),
              default="Officer", show_default=True)
def approve(url, session_id, staff_number, role):
    """Activate a pending identity with the given role (admin only)."""
    body = _api("POST", url, f"/api/staff/{staff_number}/grant",
                session_id=session_id, json={"role": role})
    click.echo(f"{body['staff_number']} is now {body['status']} ({body['role']})")


@main.command()
@click.option("--url", default="http://127.0.0.1:8080", show_default=True)
@click.option("--session", "session_id", required=True,
              help="authenticated admin session id")
@click.option("--mail-email", required=True, help="admin's intranet address")
@click.option("--mail-password", required=True)
def lockdown(url, session_id, mail_email, mail_password):
    """Two-step vault lockdown: request a confirmation code, fetch it from
    the intranet mailbox, then submit it. Irreversible."""
    _api("POST", url, "/api/lockdown", session_id=session_id, json={})
    handle = _api("POST", url, "/api/mail/login", json={
        "email": mail_email, "mail_password": mail_password})["mail_handle"]
    messages = _api("GET", url, "/api/mail/inbox",
                    headers={"X-Mail-Handle": handle})
    code = None
    for message in messages:  # newest first
        if message["subject"] == LOCKDOWN_MAIL_SUBJECT:
            match = CODE_RE.search(message["body"])
            if match:
                code = match.group(1)
                break
    if code is None:
        _fail("no lockdown confirmation code found in the mailbox")
    state = _api("POST", url, "/api/lockdown", session_id=session_id,
                 json={"confirmation_code": code})
    click.echo(f"vault state: {state['state']} "
               f"(revoked_by {state.get('revoked_by')})")


def _audit_entries_from(journal_path: str):
    entries = read_journal_file(Path(journal_path))
    return [entry_from_payload(e.payload) for e in entries
            if e.entry_type == "Audit"]


@main.command("audit-verify")
@click.option("--journal", required=True, type=click.Path(exists=True))
def audit_verify(journal):
    """Recompute the audit hash chain of a journal copy, offline."""
    try:
        entries = _audit_entries_from(journal)
    except DrliaError as exc:
        _fail(f"{exc.code}: {exc.message}")
    valid, first_bad = verify_entries(entries)
    if valid:
        click.echo(f"chain valid, {len(entries)} entries")
    else:
        _fail(f"chain broken at seq {first_bad}")


@main.command("audit-export")
@click.option("--journal", required=True, type=click.Path(exists=True))
def audit_export(journal):
    """Emit the audit log as tab-separated lines, hashes hex-encoded."""
    try:
        entries = _audit_entries_from(journal)
    except DrliaError as exc:
        _fail(f"{exc.code}: {exc.message}")
    for entry in entries:
        click.echo(entry.to_tsv())


@main.command()
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True), help="CSV of observed data")
@click.option("--likert", is_flag=True,
              help="input is a score,count Likert file")
@click.option("--chi", "expected_path", type=click.Path(exists=True),
              default=None, help="CSV of expected frequencies")
@click.option("--critical", default=st.DEFAULT_CRITICAL_VALUE,
              show_default=True, help="chi-square critical value")
def stats(input_path, likert, expected_path, critical):
    """Frequency/Likert/chi-square analysis of a CSV table."""
    text = Path(input_path).read_text()
    try:
        if likert:
            report = st.likert_report(st.read_likert_csv(text))
        elif expected_path:
            observed = st.read_frequency_csv(text)
            expected = st.read_frequency_csv(Path(expected_path).read_text())
            result = st.chi_square(observed.observed, expected.observed,
                                   critical_value=critical)
            report = st.chi_square_report(result)
        else:
            report = st.frequency_report(st.read_frequency_csv(text))
    except DrliaError as exc:
        _fail(f"{exc.code}: {exc.message}")
    click.echo(st.render_text(report))
    click.echo(st.to_json(report))


if __name__ == "__main__":
    main()
