"""Automatic feedback cycles and hotkey dispatch.

The cycle scheduler turns wall (or simulated) time into auto triggers; the
hotkey dispatcher turns key chords into manual triggers. Both only emit into
a trigger sink — the pipeline decides what runs.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from typing import Callable, Protocol

CYCLE_VALUES = {"off": None, "30s": 30.0, "3m": 180.0, "5m": 300.0}

DEBOUNCE_S = 0.3


def parse_interval(value: str) -> float | None:
    """Map a cycle setting to seconds (None = off). Closed domain."""
    if value not in CYCLE_VALUES:
        raise ValueError(
            f"invalid cycle value {value!r}; expected one of {sorted(CYCLE_VALUES)}"
        )
    return CYCLE_VALUES[value]


@dataclass
class CycleConfig:
    voice: str = "3m"
    emoji: str = "off"

    def __post_init__(self):
        parse_interval(self.voice)
        parse_interval(self.emoji)


@dataclass(frozen=True)
class Trigger:
    kind: str  # "feedback" | "emoji"
    source: str  # "manual" | "auto"


class Clock(Protocol):
    def now(self) -> float: ...

    def sleep_until(self, t: float) -> None: ...


class MonotonicClock:
    def __init__(self):
        self._stop = threading.Event()

    def now(self) -> float:
        return time.monotonic()

    def sleep_until(self, t: float) -> None:
        remaining = t - self.now()
        if remaining > 0:
            self._stop.wait(remaining)

    def interrupt(self):
        self._stop.set()


class SimulatedClock:
    """Virtual clock: sleep_until jumps time forward instantly."""

    def __init__(self, start: float = 0.0):
        self._t = start

    def now(self) -> float:
        return self._t

    def sleep_until(self, t: float) -> None:
        if t > self._t:
            self._t = t

    def advance(self, dt: float) -> None:
        self._t += dt


class CycleScheduler:
    """Emits auto triggers on two independent intervals.

    Phase rule: the first trigger of each channel fires one full interval
    after start; changing an interval re-phases from the change time (next
    fire = change time + new interval), never emitting missed back-ticks.
    """

    def __init__(self, cfg: CycleConfig, clock: Clock, sink: Callable[[Trigger], None]):
        self._clock = clock
        self._sink = sink
        self._lock = threading.Lock()
        self._stopped = False
        t0 = clock.now()
        self._interval = {}
        self._next = {}
        for channel, value in (("feedback", cfg.voice), ("emoji", cfg.emoji)):
            self._set(channel, value, t0)

    def _set(self, channel: str, value: str, at: float):
        interval = parse_interval(value)
        self._interval[channel] = interval
        self._next[channel] = None if interval is None else at + interval

    def set_interval(self, channel: str, value: str):
        if channel not in ("feedback", "emoji"):
            raise ValueError(f"unknown cycle channel: {channel!r}")
        with self._lock:
            self._set(channel, value, self._clock.now())
        if isinstance(self._clock, MonotonicClock):
            self._clock.interrupt()

    def stop(self):
        with self._lock:
            self._stopped = True
        if isinstance(self._clock, MonotonicClock):
            self._clock.interrupt()

    def _due(self) -> float | None:
        pending = [t for t in self._next.values() if t is not None]
        return min(pending) if pending else None

    def run_until(self, horizon: float):
        """Drive the cycle up to an absolute clock time (inclusive).

        With a SimulatedClock this is deterministic and instant; intended for
        tests and bounded runs.
        """
        while True:
            with self._lock:
                if self._stopped:
                    return
                due = self._due()
            if due is None or due > horizon:
                self._clock.sleep_until(horizon)
                return
            self._clock.sleep_until(due)
            self._fire_due()

    def run(self, stop: threading.Event):
        """Drive the cycle until the stop event is set (real-time use)."""
        while not stop.is_set():
            with self._lock:
                if self._stopped:
                    return
                due = self._due()
            if due is None:
                stop.wait(0.2)
                continue
            self._clock.sleep_until(due)
            if stop.is_set():
                return
            self._fire_due()

    def _fire_due(self):
        now = self._clock.now()
        with self._lock:
            fired = []
            for channel, due in self._next.items():
                if due is not None and due <= now:
                    fired.append(channel)
                    self._next[channel] = due + self._interval[channel]
        for channel in fired:
            self._sink(Trigger(kind=channel, source="auto"))


@dataclass(frozen=True)
class HotkeyBinding:
    feedback: str = "primary+r"
    emoji: str = "primary+e"

    def __post_init__(self):
        if self.feedback == self.emoji:
            raise ValueError("feedback and emoji hotkeys must differ")


class HotkeyDispatcher:
    """Maps chord presses to manual triggers, debouncing key auto-repeat.

    Chord events arrive from any injector (a fake one in tests; a real OS
    listener can feed press() from its own thread).
    """

    def __init__(
        self,
        bindings: HotkeyBinding,
        sink: Callable[[Trigger], None],
        now: Callable[[], float] = time.monotonic,
    ):
        self._bindings = bindings
        self._sink = sink
        self._now = now
        self._last: dict[str, float] = {}
        self._lock = threading.Lock()

    def press(self, chord: str):
        kind = None
        if chord == self._bindings.feedback:
            kind = "feedback"
        elif chord == self._bindings.emoji:
            kind = "emoji"
        if kind is None:
            return
        t = self._now()
        with self._lock:
            last = self._last.get(chord)
            if last is not None and t - last < DEBOUNCE_S:
                return
            self._last[chord] = t
        self._sink(Trigger(kind=kind, source="manual"))
