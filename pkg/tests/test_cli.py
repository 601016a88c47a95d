import json
import re
import secrets
import shutil
import signal
import socket
import subprocess
import sys
import time

import httpx
import pytest
from click.testing import CliRunner

from drlia import ManualClock
from drlia.cli import main
from drlia.journal import Journal

from conftest import OFFICER, PASSWORD, add_staff, login, make_service

runner = CliRunner()


class TestStatsCommand:
    def test_frequency_table(self, tmp_path):
        csv = tmp_path / "gender.csv"
        csv.write_text("Male,Female\n26,14\n")
        result = runner.invoke(main, ["stats", "--input", str(csv)])
        assert result.exit_code == 0
        assert "65.0" in result.output and "35.0" in result.output

    def test_hypothesis_table_reproduced(self, tmp_path):
        observed = tmp_path / "table4.csv"
        observed.write_text("agree,disagree\n39,1\n")
        expected = tmp_path / "expected.csv"
        expected.write_text("agree,disagree\n20,20\n")
        result = runner.invoke(main, [
            "stats", "--input", str(observed), "--chi", str(expected),
            "--critical", "5.99"])
        assert result.exit_code == 0
        assert "X² = 36.1" in result.output
        assert "decision: Reject H0" in result.output
        # machine-readable document follows the table
        doc = json.loads(result.output[result.output.index("{"):])
        assert doc["statistic"] == pytest.approx(36.1)
        assert doc["decision"] == "RejectH0"

    def test_likert_report(self, tmp_path):
        csv = tmp_path / "q4.csv"
        csv.write_text("score,count\n5,28\n4,11\n1,1\n")
        result = runner.invoke(main, ["stats", "--input", str(csv), "--likert"])
        assert result.exit_code == 0
        assert "mean = 4.63" in result.output
        assert "agreed (mean > 3.00): yes" in result.output

    def test_empty_table_exit_1(self, tmp_path):
        csv = tmp_path / "empty.csv"
        csv.write_text("")
        result = runner.invoke(main, ["stats", "--input", str(csv)])
        assert result.exit_code == 1
        assert "EmptyTable" in result.output

    def test_unknown_verb_exit_2(self):
        assert runner.invoke(main, ["frobnicate"]).exit_code == 2

    def test_unknown_flag_exit_2(self, tmp_path):
        assert runner.invoke(main, ["stats", "--bogus"]).exit_code == 2


class TestAuditCommands:
    @pytest.fixture
    def journal_path(self, tmp_path):
        svc = make_service(journal_path=tmp_path / "ops.journal")
        add_staff(svc, OFFICER, "Officer")
        login(svc, OFFICER)
        svc.close()
        return tmp_path / "ops.journal"

    def test_verify_good_journal(self, journal_path):
        result = runner.invoke(main, ["audit-verify", "--journal",
                                      str(journal_path)])
        assert result.exit_code == 0
        assert re.search(r"chain valid, \d+ entries", result.output)

    def test_verify_tampered_journal(self, journal_path, tmp_path):
        from drlia.journal import read_journal_file
        entries = read_journal_file(journal_path)
        for e in entries:
            if e.entry_type == "Audit":
                e.payload["outcome"] = ("Failure"
                                        if e.payload["outcome"] == "Success"
                                        else "Success")
                break
        rewritten = Journal(tmp_path / "tampered.journal", ManualClock())
        for e in entries:
            rewritten.append(e.entry_type, e.payload)
        rewritten.close()
        result = runner.invoke(main, ["audit-verify", "--journal",
                                      str(tmp_path / "tampered.journal")])
        assert result.exit_code == 1
        assert "chain broken at seq 1" in result.output

    def test_export_tsv(self, journal_path):
        result = runner.invoke(main, ["audit-export", "--journal",
                                      str(journal_path)])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert all(len(line.split("\t")) == 8 for line in lines)
        assert any("AccessGranted" in line for line in lines)


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def wait_healthy(url: str, timeout: float = 15.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        try:
            if httpx.get(url + "/api/health", timeout=1.0).status_code == 200:
                return
        except httpx.HTTPError:
            time.sleep(0.1)
    raise AssertionError("server did not become healthy")


@pytest.mark.slow
class TestServerVerbsEndToEnd:
    """serve / register / approve / lockdown against a real subprocess."""

    def test_full_operator_workflow(self, tmp_path):
        port = free_port()
        url = f"http://127.0.0.1:{port}"
        journal = tmp_path / "ops.journal"
        key_file = tmp_path / "master.key"
        key_file.write_bytes(secrets.token_bytes(32).hex().encode())

        def start(extra=()):
            proc = subprocess.Popen(
                [sys.executable, "-m", "drlia.cli", "serve",
                 "--port", str(port), "--journal", str(journal),
                 "--master-key-file", str(key_file), *extra],
                stdout=subprocess.PIPE, stderr=subprocess.PIPE)
            wait_healthy(url)
            return proc

        server = start()
        try:
            # register the future admin, then an officer
            out = runner.invoke(main, [
                "register", "--url", url, "--name", "Root Admin",
                "--staff-number", "EMP/00001", "--email", "admin@intra.local",
                "--contact-number", "+2348000001", "--sex", "Female",
                "--password", "admin-password-1"])
            assert out.exit_code == 0, out.output
            admin_mail_pw = re.search(r"mail password \(shown once\): (\S+)",
                                      out.output).group(1)
            out = runner.invoke(main, [
                "register", "--url", url, "--name", "Officer One",
                "--staff-number", "EMP/00002", "--email", "off@intra.local",
                "--contact-number", "+2348000002", "--sex", "Male",
                "--password", "officer-password-1"])
            assert out.exit_code == 0, out.output
        finally:
            server.terminate()
            server.wait(timeout=10)

        # restart with bootstrap so the registered admin becomes active
        server = start(["--bootstrap-admin", "EMP/00001"])
        try:
            session = httpx.post(url + "/api/session").json()["session_id"]
            r = httpx.post(url + f"/api/session/{session}/credentials", json={
                "staff_number": "EMP/00001", "password": "admin-password-1"})
            assert r.status_code == 200, r.text
            httpx.post(url + f"/api/session/{session}/token")
            handle = httpx.post(url + "/api/mail/login", json={
                "email": "admin@intra.local",
                "mail_password": admin_mail_pw}).json()["mail_handle"]
            inbox = httpx.get(url + "/api/mail/inbox",
                              headers={"X-Mail-Handle": handle}).json()
            code = re.search(r"Your one-time code is: ([A-HJ-NP-Z2-9]{8})",
                             inbox[0]["body"]).group(1)
            r = httpx.post(url + f"/api/session/{session}/verify",
                           json={"code": code})
            assert r.json()["state"] == "Authenticated"

            out = runner.invoke(main, [
                "approve", "--url", url, "--session", session,
                "--staff-number", "EMP/00002", "--role", "Officer"])
            assert out.exit_code == 0, out.output
            assert "Active" in out.output

            out = runner.invoke(main, [
                "lockdown", "--url", url, "--session", session,
                "--mail-email", "admin@intra.local",
                "--mail-password", admin_mail_pw])
            assert out.exit_code == 0, out.output
            assert "Revoked" in out.output
            health = httpx.get(url + "/api/health").json()
            assert health["vault"] == "Revoked"
        finally:
            server.terminate()
            server.wait(timeout=10)

        # offline verification of the recovered journal copy
        copy = tmp_path / "recovered.journal"
        shutil.copy(journal, copy)
        out = runner.invoke(main, ["audit-verify", "--journal", str(copy)])
        assert out.exit_code == 0, out.output
