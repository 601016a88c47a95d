"""Injectable clock so token expiry and session timeouts are testable."""

from __future__ import annotations

import time


class Clock:
    """Wall clock. ``now()`` returns epoch seconds as a float."""

    def now(self) -> float:
        return time.time()

    def now_ms(self) -> int:
        return int(self.now() * 1000)


class ManualClock(Clock):
    """Deterministic clock advanced explicitly by tests."""

    def __init__(self, start: float = 1_700_000_000.0):
        self._t = float(start)

    def now(self) -> float:
        return self._t

    def advance(self, seconds: float) -> None:
        self._t += seconds

    def set(self, t: float) -> None:
        self._t = float(t)
