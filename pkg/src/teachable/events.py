"""Append-only session event log: JSONL encoding, validation, replay.

One event per line, `{"seq": ..., "ts": ..., "kind": ..., "payload": ...}`,
with seq dense from 0. Everything the learner knows is reconstructible
from this stream: keyword events rebuild the KeywordStore record for
record, and article_advanced events mark the epoch boundaries the
evaluation curves are computed over.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import IO, Iterable

from .corpus import ClassLabel
from .learner import KeywordOrigin, KeywordPolarity, KeywordRecord, KeywordStore


class EventKind(str, Enum):
    UTTERANCE_IN = "utterance_in"
    AGENT_REPLY = "agent_reply"
    KEYWORD = "keyword"
    MODE_SWITCH = "mode_switch"
    CLASSIFY = "classify"
    ARTICLE_ADVANCED = "article_advanced"


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    ts: str
    kind: EventKind
    payload: dict

    def to_json(self) -> str:
        return json.dumps(
            {"seq": self.seq, "ts": self.ts, "kind": self.kind.value, "payload": self.payload},
            ensure_ascii=False,
        )


class ReplayError(Exception):
    """Log line that cannot be replayed; carries the offending event index."""

    def __init__(self, index: int, message: str) -> None:
        super().__init__(f"event {index}: {message}")
        self.index = index


def now_ts() -> str:
    return datetime.now(timezone.utc).isoformat()


def parse_event_line(line: str, index: int) -> SessionEvent:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ReplayError(index, f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ReplayError(index, "event line is not a JSON object")
    try:
        kind = EventKind(raw["kind"])
        seq = int(raw["seq"])
        ts = str(raw["ts"])
        payload = raw["payload"]
    except (KeyError, ValueError) as exc:
        raise ReplayError(index, f"malformed event: {exc}") from exc
    if not isinstance(payload, dict):
        raise ReplayError(index, "payload is not a JSON object")
    return SessionEvent(seq=seq, ts=ts, kind=kind, payload=payload)


def validate_sequence(events: Iterable[SessionEvent]) -> None:
    """Enforce seq dense and strictly increasing from 0."""
    for index, event in enumerate(events):
        if event.seq != index:
            raise ReplayError(index, f"expected seq {index}, found {event.seq}")


def read_log(source: str | Path | IO[str]) -> list[SessionEvent]:
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    events = [parse_event_line(line, i) for i, line in enumerate(lines) if line.strip()]
    validate_sequence(events)
    return events


def write_log(events: Iterable[SessionEvent], sink: str | Path | IO[str]) -> None:
    if hasattr(sink, "write"):
        for event in events:
            sink.write(event.to_json() + "\n")
        return
    with open(sink, "w", encoding="utf-8") as fh:
        for event in events:
            fh.write(event.to_json() + "\n")


class EventLog:
    """In-memory event list with optional write-through to a JSONL file."""

    def __init__(self, path: str | Path | None = None) -> None:
        self.events: list[SessionEvent] = []
        self._path = Path(path) if path is not None else None
        if self._path is not None and self._path.exists():
            self.events = read_log(self._path)

    def __len__(self) -> int:
        return len(self.events)

    def append(self, kind: EventKind, payload: dict, ts: str | None = None) -> SessionEvent:
        event = SessionEvent(
            seq=len(self.events), ts=ts if ts is not None else now_ts(), kind=kind, payload=payload
        )
        self.events.append(event)
        if self._path is not None:
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(event.to_json() + "\n")
        return event


def keyword_payload(record: KeywordRecord) -> dict:
    return {
        "lemma": record.lemma,
        "class": int(record.label),
        "polarity": record.polarity.value,
        "origin": record.origin.value,
    }


def apply_keyword(store: KeywordStore, event: SessionEvent, index: int) -> KeywordRecord:
    try:
        record = KeywordRecord(
            lemma=str(event.payload["lemma"]),
            label=ClassLabel(int(event.payload["class"])),
            polarity=KeywordPolarity(event.payload["polarity"]),
            origin=KeywordOrigin(event.payload["origin"]),
            sequence_number=store.next_sequence_number(),
        )
    except (KeyError, ValueError) as exc:
        raise ReplayError(index, f"bad keyword payload: {exc}") from exc
    store.append(record)
    return record


def replay_store(events: Iterable[SessionEvent]) -> KeywordStore:
    """Rebuild the final KeywordStore from a log.

    Store sequence numbers are re-derived from keyword-event order, which
    is exactly how the live session assigned them.
    """
    store = KeywordStore()
    for index, event in enumerate(events):
        if event.kind is EventKind.KEYWORD:
            apply_keyword(store, event, index)
    return store


def article_groups(events: Iterable[SessionEvent]) -> list[list[SessionEvent]]:
    """Split a log into per-article event groups (the evaluation epochs).

    A group closes at each article_advanced event; trailing events after
    the last marker form a final, implicitly closed group. Returns [] for
    a log with no keyword activity at all.
    """
    groups: list[list[SessionEvent]] = []
    current: list[SessionEvent] = []
    for event in events:
        if event.kind is EventKind.ARTICLE_ADVANCED:
            groups.append(current)
            current = []
        else:
            current.append(event)
    if any(e.kind is EventKind.KEYWORD for e in current):
        groups.append(current)
    return groups
