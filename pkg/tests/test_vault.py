import os
import secrets

import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from drlia import Service, errors
from drlia.vault import SealedRecord

from conftest import ADMIN, OFFICER, READONLY, add_staff, fast_config, login, \
    make_service


@pytest.fixture
def ctx():
    svc = make_service()
    add_staff(svc, ADMIN, "Admin")
    add_staff(svc, OFFICER, "Officer")
    add_staff(svc, READONLY, "ReadOnly")
    return svc


def lockdown(svc, admin_session):
    svc.engine.issue_confirmation(admin_session)
    code = svc.engine.live_token_for(admin_session.session_id, "Lockdown").code
    return svc.vault.lockdown(admin_session, code)


class TestSealAndOpen:
    def test_round_trip(self, ctx):
        s = login(ctx, OFFICER)
        doc = b"student grades: A A B"
        rec = ctx.vault.seal_record(s, "STU-1", "LevelResult", doc)
        assert rec.ciphertext != doc
        assert ctx.vault.open_record(s, rec.record_id) == doc

    def test_plaintext_absent_from_journal(self, ctx):
        s = login(ctx, OFFICER)
        marker = secrets.token_bytes(32)
        ctx.vault.seal_record(s, "STU-1", "LevelResult", marker * 4)
        assert marker not in ctx.journal.raw_bytes()

    def test_readonly_cannot_seal(self, ctx):
        s = login(ctx, READONLY)
        before = len(ctx.audit.query(action="Denied"))
        with pytest.raises(errors.Forbidden):
            ctx.vault.seal_record(s, "STU-1", "LevelResult", b"doc")
        assert len(ctx.audit.query(action="Denied")) == before + 1

    def test_role_policy_matrix(self, ctx):
        for staff, allowed in [(ADMIN, True), (OFFICER, True),
                               (READONLY, False)]:
            s = login(ctx, staff)
            if allowed:
                ctx.vault.seal_record(s, "STU-1", "LevelResult", b"doc")
            else:
                with pytest.raises(errors.Forbidden):
                    ctx.vault.seal_record(s, "STU-1", "LevelResult", b"doc")

    def test_unauthenticated_rejected(self, ctx):
        s = ctx.engine.begin_session()
        with pytest.raises(errors.NotAuthenticated):
            ctx.vault.seal_record(s, "STU-1", "LevelResult", b"doc")
        with pytest.raises(errors.NotAuthenticated):
            ctx.vault.open_record(s, "whatever")

    def test_oversize_document(self, ctx):
        s = login(ctx, OFFICER)
        with pytest.raises(errors.OversizeDocument):
            ctx.vault.seal_record(s, "STU-1", "LevelResult",
                                  b"x" * (16 * 1024 * 1024 + 1))
        with pytest.raises(errors.OversizeDocument):
            ctx.vault.seal_record(s, "STU-1", "LevelResult", b"")

    def test_unknown_record(self, ctx):
        s = login(ctx, OFFICER)
        with pytest.raises(errors.UnknownRecord):
            ctx.vault.open_record(s, "no-such-record")

    def test_distinct_data_keys_and_nonces(self, ctx):
        s = login(ctx, OFFICER)
        recs = [ctx.vault.seal_record(s, "STU-1", "LevelResult", b"same doc")
                for _ in range(10)]
        assert len({r.wrapped_data_key for r in recs}) == 10
        assert len({r.wrap_nonce for r in recs}) == 10
        assert len({r.ciphertext for r in recs}) == 10

    def test_access_is_audited(self, ctx):
        s = login(ctx, OFFICER)
        rec = ctx.vault.seal_record(s, "STU-1", "LevelResult", b"doc")
        ctx.vault.open_record(s, rec.record_id)
        sealed = ctx.audit.query(action="RecordSealed")
        opened = ctx.audit.query(action="RecordOpened")
        assert len(sealed) == 1 and len(opened) == 1
        assert opened[0].staff_number == OFFICER
        assert rec.record_id in opened[0].detail

    @settings(max_examples=25, deadline=None)
    @given(doc=hst.binary(min_size=1, max_size=4096))
    def test_round_trip_property(self, doc):
        svc = make_service()
        add_staff(svc, OFFICER, "Officer")
        s = login(svc, OFFICER)
        rec = svc.vault.seal_record(s, "STU-1", "CumulativeResult", doc)
        assert svc.vault.open_record(s, rec.record_id) == doc

    def test_round_trip_1mib(self, ctx):
        s = login(ctx, OFFICER)
        doc = os.urandom(1024 * 1024)
        rec = ctx.vault.seal_record(s, "STU-1", "TranscriptOutgoing", doc)
        assert ctx.vault.open_record(s, rec.record_id) == doc


class TestTamperEvidence:
    def _sealed(self, ctx):
        s = login(ctx, OFFICER)
        rec = ctx.vault.seal_record(s, "STU-1", "LevelResult",
                                    b"original document contents")
        return s, rec

    @staticmethod
    def _flip(data: bytes, bit: int) -> bytes:
        out = bytearray(data)
        out[bit // 8] ^= 1 << (bit % 8)
        return bytes(out)

    @pytest.mark.parametrize("field", ["ciphertext", "nonce",
                                       "wrapped_data_key", "wrap_nonce"])
    def test_single_bit_flips_detected(self, ctx, field):
        s, rec = self._sealed(ctx)
        original = getattr(rec, field)
        for bit in [0, 7, len(original) * 8 // 2, len(original) * 8 - 1]:
            tampered = SealedRecord(**{**rec.__dict__,
                                       field: self._flip(original, bit)})
            ctx.vault._records[rec.record_id] = tampered
            with pytest.raises(errors.IntegrityFailure):
                ctx.vault.open_record(s, rec.record_id)
        ctx.vault._records[rec.record_id] = rec
        assert ctx.vault.open_record(s, rec.record_id)

    @pytest.mark.parametrize("field,value", [
        ("student_id", "STU-2"),
        ("kind", "CumulativeResult"),
        ("record_id", "f" * 32),
    ])
    def test_associated_data_bound(self, ctx, field, value):
        s, rec = self._sealed(ctx)
        tampered = SealedRecord(**{**rec.__dict__, field: value})
        key = tampered.record_id
        ctx.vault._records[key] = tampered
        with pytest.raises(errors.IntegrityFailure):
            ctx.vault.open_record(s, key)


class TestListing:
    def test_filter_by_student(self, ctx):
        s = login(ctx, OFFICER)
        for kind in ("LevelResult", "CumulativeResult", "TranscriptIncoming"):
            ctx.vault.seal_record(s, "STU-1", kind, b"doc")
        ctx.vault.seal_record(s, "STU-2", "LevelResult", b"doc")
        assert len(ctx.vault.list_records(s, student_id="STU-1")) == 3

    def test_filter_by_kind(self, ctx):
        s = login(ctx, OFFICER)
        ctx.vault.seal_record(s, "STU-1", "TranscriptOutgoing", b"doc")
        ctx.vault.seal_record(s, "STU-1", "LevelResult", b"doc")
        out = ctx.vault.list_records(s, kind="TranscriptOutgoing")
        assert [r["kind"] for r in out] == ["TranscriptOutgoing"]

    def test_metadata_carries_no_plaintext(self, ctx):
        s = login(ctx, OFFICER)
        ctx.vault.seal_record(s, "STU-1", "LevelResult", b"secret-document")
        out = ctx.vault.list_records(s)
        assert b"secret-document" not in repr(out).encode()


class TestLockdown:
    def test_admin_lockdown_blocks_all_opens(self, ctx):
        officer = login(ctx, OFFICER)
        recs = [ctx.vault.seal_record(officer, f"STU-{i}", "LevelResult",
                                      f"doc {i}".encode()) for i in range(5)]
        admin = login(ctx, ADMIN)
        state = lockdown(ctx, admin)
        assert state["state"] == "Revoked"
        assert state["revoked_by"] == ADMIN
        for rec in recs:
            with pytest.raises(errors.VaultLocked):
                ctx.vault.open_record(admin, rec.record_id)

    def test_seal_after_lockdown(self, ctx):
        admin = login(ctx, ADMIN)
        lockdown(ctx, admin)
        with pytest.raises(errors.VaultLocked):
            ctx.vault.seal_record(admin, "STU-1", "LevelResult", b"doc")

    def test_listing_still_works_after_lockdown(self, ctx):
        officer = login(ctx, OFFICER)
        ctx.vault.seal_record(officer, "STU-1", "LevelResult", b"doc")
        admin = login(ctx, ADMIN)
        lockdown(ctx, admin)
        out = ctx.vault.list_records(admin)
        assert len(out) == 1

    def test_non_admin_denied_and_audited(self, ctx):
        officer = login(ctx, OFFICER)
        before = len(ctx.audit.query(action="Denied"))
        with pytest.raises(errors.NotAdmin):
            ctx.vault.lockdown(officer, "AAAAAAAA")
        assert len(ctx.audit.query(action="Denied")) == before + 1

    def test_bad_confirmation(self, ctx):
        admin = login(ctx, ADMIN)
        ctx.engine.issue_confirmation(admin)
        with pytest.raises(errors.BadConfirmation):
            ctx.vault.lockdown(admin, "AAAAAAAA")
        assert not ctx.vault.locked

    def test_confirmation_code_single_use(self, ctx):
        admin = login(ctx, ADMIN)
        ctx.engine.issue_confirmation(admin)
        code = ctx.engine.live_token_for(admin.session_id, "Lockdown").code
        ctx.vault.lockdown(admin, code)
        with pytest.raises(errors.AlreadyLocked):
            ctx.vault.lockdown(admin, code)

    def test_second_lockdown_refused_without_new_tombstone(self, ctx):
        admin = login(ctx, ADMIN)
        lockdown(ctx, admin)
        assert len(ctx.journal.entries("Tombstone")) == 1
        with pytest.raises(errors.AlreadyLocked):
            lockdown(ctx, admin)
        assert len(ctx.journal.entries("Tombstone")) == 1

    def test_master_key_zeroized(self, ctx):
        admin = login(ctx, ADMIN)
        lockdown(ctx, admin)
        assert bytes(ctx.vault._master) == b"\x00" * 32

    def test_lockdown_audited(self, ctx):
        admin = login(ctx, ADMIN)
        lockdown(ctx, admin)
        entries = ctx.audit.query(action="Lockdown")
        assert len(entries) == 1
        assert entries[0].staff_number == ADMIN


class TestUnreachabilityAfterTheft:
    def test_fresh_process_on_stolen_journal_yields_no_plaintext(self, tmp_path):
        """Copying the journal to a new service (even with the master key!)
        after lockdown must not reveal any document."""
        marker = secrets.token_bytes(32)
        key = secrets.token_bytes(32)
        path = tmp_path / "stolen.journal"
        svc = make_service(journal_path=path, master_key=key)
        add_staff(svc, ADMIN, "Admin")
        add_staff(svc, OFFICER, "Officer")
        officer = login(svc, OFFICER)
        rec = svc.vault.seal_record(officer, "STU-1", "LevelResult",
                                    marker + b" confidential result sheet")
        admin = login(svc, ADMIN)
        lockdown(svc, admin)
        svc.close()

        assert marker not in path.read_bytes()
        stolen = Service(fast_config(journal_path=path, master_key=key),
                         svc.clock)
        assert stolen.vault.locked
        add_staff(stolen, "EMP/00031", "Admin")
        thief = login(stolen, "EMP/00031")
        with pytest.raises(errors.VaultLocked):
            stolen.vault.open_record(thief, rec.record_id)
        with pytest.raises(errors.VaultLocked):
            stolen.vault.seal_record(thief, "X", "LevelResult", b"probe")
        # metadata remains, plaintext does not
        listing = stolen.vault.list_records(thief)
        assert marker not in repr(listing).encode()
        stolen.close()

    def test_sentinel_markers_never_persisted(self, tmp_path):
        markers = [secrets.token_bytes(32) for _ in range(3)]
        path = tmp_path / "life.journal"
        svc = make_service(journal_path=path)
        add_staff(svc, ADMIN, "Admin")
        add_staff(svc, OFFICER, "Officer")
        officer = login(svc, OFFICER)
        recs = [svc.vault.seal_record(officer, "STU-1", "LevelResult",
                                      m + b"-payload") for m in markers]
        for m in markers:
            assert m not in svc.journal.raw_bytes()
        for rec, m in zip(recs, markers):
            assert svc.vault.open_record(officer, rec.record_id).startswith(m)
        admin = login(svc, ADMIN)
        lockdown(svc, admin)
        for m in markers:
            assert m not in svc.journal.raw_bytes()
        svc.close()
