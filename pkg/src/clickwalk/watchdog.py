"""Keep-alive watchdog timer with pluggable time sources.

The recording service arms a one-shot timer per session; every keep-alive
re-arms it with the full delay, and an expiry that was not re-armed fires
exactly once. Timers are scheduled through a backend so tests and offline
replays can run on virtual time instead of real sleeps.
"""

from __future__ import annotations

import itertools
import threading
from typing import Callable


class InvalidDelayError(ValueError):
    """The watchdog delay must be strictly positive."""


class ThreadTimerBackend:
    """Schedules callbacks on real threading.Timer objects."""

    def schedule(self, delay_ms: float, callback: Callable[[], None]):
        timer = threading.Timer(delay_ms / 1000.0, callback)
        timer.daemon = True
        timer.start()
        return timer

    def cancel(self, handle) -> None:
        handle.cancel()


class ManualTimerBackend:
    """Virtual-time scheduler: nothing fires until the clock is advanced.

    advance() releases the internal lock before invoking each due
    callback, so callbacks may freely schedule or cancel without
    deadlocking against concurrent callers.
    """

    def __init__(self):
        self.now_ms = 0.0
        self._lock = threading.Lock()
        self._counter = itertools.count()
        self._entries: dict[int, tuple[float, Callable[[], None]]] = {}

    def schedule(self, delay_ms: float, callback: Callable[[], None]) -> int:
        with self._lock:
            handle = next(self._counter)
            self._entries[handle] = (self.now_ms + delay_ms, callback)
            return handle

    def cancel(self, handle: int) -> None:
        with self._lock:
            self._entries.pop(handle, None)

    def advance(self, delta_ms: float) -> None:
        """Move the clock forward, firing due callbacks in time order."""
        target = self.now_ms + delta_ms
        while True:
            with self._lock:
                due = [
                    (fire_at, handle)
                    for handle, (fire_at, _) in self._entries.items()
                    if fire_at <= target
                ]
                if not due:
                    self.now_ms = target
                    return
                fire_at, handle = min(due)
                _, callback = self._entries.pop(handle)
                self.now_ms = fire_at
            callback()


class WatchdogTimer:
    """One-shot expiry timer with reset semantics.

    Each arm/reset starts a fresh full-delay countdown and invalidates
    any countdown still in flight, so expiry fires at most once per
    cycle even when a backend callback races a reset.
    """

    def __init__(self, delay_ms: float, on_expiry: Callable[[], None], backend=None):
        self.delay_ms = delay_ms
        self._on_expiry = on_expiry
        self._backend = backend if backend is not None else ThreadTimerBackend()
        self._lock = threading.Lock()
        self._generation = 0
        self._handle = None
        self._started = False

    def start(self) -> None:
        """Arm the timer; after the full delay with no reset, expiry fires.

        Raises InvalidDelayError on a non-positive delay.
        """
        if self.delay_ms <= 0:
            raise InvalidDelayError("timer delay must be greater than 0")
        with self._lock:
            self._arm_locked()
            self._started = True

    def reset(self) -> bool:
        """Cancel the pending expiry and re-arm with the full delay.

        Returns False when the timer was never started, True otherwise.
        """
        with self._lock:
            if not self._started:
                return False
            self._arm_locked()
            return True

    def cancel(self) -> None:
        """Drop any pending expiry without disturbing started-ness."""
        with self._lock:
            self._generation += 1
            if self._handle is not None:
                self._backend.cancel(self._handle)
                self._handle = None

    def _arm_locked(self) -> None:
        self._generation += 1
        generation = self._generation
        if self._handle is not None:
            self._backend.cancel(self._handle)
        self._handle = self._backend.schedule(
            self.delay_ms, lambda: self._fire(generation)
        )

    def _fire(self, generation: int) -> None:
        # Only the check is under the lock; the callback itself runs
        # outside so it may take coarser locks (e.g. the service guard).
        with self._lock:
            if generation != self._generation:
                return
            self._handle = None
        self._on_expiry()
