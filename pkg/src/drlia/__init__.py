"""Secure examinations-and-records service: two-step token authentication,
envelope-encrypted record vault with one-way lockdown, hash-chained audit
log, intranet mailbox, survey statistics, HTTP gateway and operator CLI."""

from .clock import Clock, ManualClock
from .service import Service, ServiceConfig

__all__ = ["Clock", "ManualClock", "Service", "ServiceConfig"]
__version__ = "0.1.0"
