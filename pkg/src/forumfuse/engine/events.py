"""Append-only event log backing the engine's state.

One JSON object per line with a strictly increasing ``seq``.  State is a
pure function of the event sequence, which is what makes replay exact.
"""
from __future__ import annotations

import json
import os
from typing import Callable, Iterator

from ..errors import ValidationError

EVENT_TYPES = ("process", "refer", "resolve")


def make_event(seq: int, at: float, event_type: str, payload: dict) -> dict:
    if event_type not in EVENT_TYPES:
        raise ValidationError(f"unknown event type {event_type!r}")
    event = {"seq": seq, "at": at, "type": event_type}
    event.update(payload)
    return event


def dump_event(event: dict) -> str:
    return json.dumps(event, sort_keys=True, separators=(",", ":"))


class EventLog:
    """Appender with optional file persistence.

    With a path, every append lands on disk before the call returns;
    without one the log is memory-only (useful for ephemeral engines).
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = os.fspath(path) if path is not None else None
        self.last_seq = 0
        self._fh = None
        if self.path is not None:
            if os.path.exists(self.path):
                for event in read_events(self.path):
                    self.last_seq = event["seq"]
            self._fh = open(self.path, "a", encoding="utf-8")
        self.events: list[dict] = []

    def append(self, at: float, event_type: str, payload: dict) -> dict:
        event = make_event(self.last_seq + 1, at, event_type, payload)
        if self._fh is not None:
            self._fh.write(dump_event(event))
            self._fh.write("\n")
            self._fh.flush()
        self.events.append(event)
        self.last_seq = event["seq"]
        return event

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_events(path: str | os.PathLike) -> Iterator[dict]:
    """Parse an event log, enforcing the monotonic sequence invariant."""
    expected = 1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                event = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"event log line {lineno}: invalid JSON: {exc}") from None
            if not isinstance(event, dict) or "seq" not in event or "type" not in event:
                raise ValidationError(f"event log line {lineno}: not an event record")
            if event["seq"] != expected:
                raise ValidationError(
                    f"event log line {lineno}: expected seq {expected}, got {event['seq']}"
                )
            if event["type"] not in EVENT_TYPES:
                raise ValidationError(
                    f"event log line {lineno}: unknown event type {event['type']!r}"
                )
            expected += 1
            yield event
