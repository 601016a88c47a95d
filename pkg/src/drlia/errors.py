"""Error hierarchy shared by every module.

Each error carries a stable ``code`` string so the HTTP gateway and the CLI
can map failures without string-matching messages.
"""

from __future__ import annotations


class DrliaError(Exception):
    """Base class; ``code`` is the machine-readable identifier."""

    code = "Error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


# -- registration / identity ------------------------------------------------

class MalformedField(DrliaError):
    code = "MalformedField"

    def __init__(self, field: str, message: str = ""):
        super().__init__(message or f"malformed field: {field}")
        self.field = field


class DuplicateStaffNumber(DrliaError):
    code = "DuplicateStaffNumber"


class DuplicateEmail(DrliaError):
    code = "DuplicateEmail"


class WeakPassword(DrliaError):
    code = "WeakPassword"


class UnknownStaff(DrliaError):
    code = "UnknownStaff"


# -- authentication ----------------------------------------------------------

class NotAuthenticated(DrliaError):
    code = "NotAuthenticated"


class NotAdmin(DrliaError):
    code = "NotAdmin"


class Forbidden(DrliaError):
    code = "Forbidden"

    def __init__(self, role: str = "", message: str = ""):
        super().__init__(message or f"role not permitted: {role}")
        self.role = role


class WrongState(DrliaError):
    code = "WrongState"


class IdentitySuspended(DrliaError):
    code = "IdentitySuspended"


class TokenExpired(DrliaError):
    code = "TokenExpired"


class EntropyUnavailable(DrliaError):
    code = "EntropyUnavailable"


# -- mail ---------------------------------------------------------------------

class UnknownMailbox(DrliaError):
    code = "UnknownMailbox"


class MailboxUnavailable(DrliaError):
    code = "MailboxUnavailable"


class BadMailCredentials(DrliaError):
    code = "BadMailCredentials"


class StaleHandle(DrliaError):
    code = "StaleHandle"


# -- vault ---------------------------------------------------------------------

class UnknownRecord(DrliaError):
    code = "UnknownRecord"


class VaultLocked(DrliaError):
    code = "VaultLocked"


class OversizeDocument(DrliaError):
    code = "OversizeDocument"


class IntegrityFailure(DrliaError):
    code = "IntegrityFailure"


class BadConfirmation(DrliaError):
    code = "BadConfirmation"


class AlreadyLocked(DrliaError):
    code = "AlreadyLocked"


# -- persistence / audit -------------------------------------------------------

class StorageFailure(DrliaError):
    code = "StorageFailure"


class JournalCorrupt(DrliaError):
    code = "JournalCorrupt"

    def __init__(self, first_bad_seq: int, message: str = ""):
        super().__init__(message or f"journal corrupt at entry {first_bad_seq}")
        self.first_bad_seq = first_bad_seq


class SecretInDetail(DrliaError):
    code = "SecretInDetail"


# -- statistics ------------------------------------------------------------------

class EmptyTable(DrliaError):
    code = "EmptyTable"


class EmptyCounts(DrliaError):
    code = "EmptyCounts"


class InsufficientData(DrliaError):
    code = "InsufficientData"


class LengthMismatch(DrliaError):
    code = "LengthMismatch"


class NonpositiveExpected(DrliaError):
    code = "NonpositiveExpected"


# -- gateway ------------------------------------------------------------------------

class RateLimited(DrliaError):
    code = "RateLimited"
