"""Replay log: one `tick,kind,payload` line per world event.

Kinds: FIRE (aid, bullets that hit), DMG (victim, fired tick, damage), KILL, HURT, DEATH, SPAWN.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import TextIO


class EventLog:
    def __init__(self, handle: TextIO | None = None) -> None:
        self._handle = handle
        self.counts: Counter[str] = Counter()

    @classmethod
    def open(cls, path: Path) -> "EventLog":
        path.parent.mkdir(parents=True, exist_ok=True)
        return cls(path.open("w", encoding="ascii", newline="\n"))

    def record(self, tick: int, kind: str, payload: str) -> None:
        self.counts[kind] += 1
        if self._handle is not None:
            self._handle.write(f"{tick},{kind},{payload}\n")

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None


def read_event_log(path: Path) -> list[tuple[int, str, str]]:
    records: list[tuple[int, str, str]] = []
    for line in path.read_text(encoding="ascii").splitlines():
        tick, kind, payload = line.split(",", 2)
        records.append((int(tick), kind, payload))
    return records
