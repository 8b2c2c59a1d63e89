"""Trace container and JSONL serialization.

A trace is the total event log of one simulation: a header line holding
the config followed by one JSON object per event, in canonical form
(sorted keys, compact separators). Event timestamps are non-decreasing
and every event carries its kind under "kind" and its time under "t".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .config import ExecutionConfig

TRACE_FORMAT_VERSION = 1

EVENT_KINDS = frozenset(
    {
        "new_round",
        "elect",
        "lbr_start",
        "endorse",
        "certify",
        "lbr_return",
        "commit",
        "crash",
        "adversary_action",
    }
)


class TraceFormatError(ValueError):
    """A trace file or event stream is structurally invalid."""


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class Trace:
    """Config plus the time-ordered event list of one run."""

    config: ExecutionConfig
    events: list[dict] = field(default_factory=list)

    def by_kind(self, kind: str) -> list[tuple[int, dict]]:
        """(index, event) pairs for one event kind, in trace order."""
        return [(i, ev) for i, ev in enumerate(self.events) if ev["kind"] == kind]

    def to_jsonl(self) -> str:
        header = {
            "format_version": TRACE_FORMAT_VERSION,
            "kind": "trace_header",
            "config": self.config.to_json(),
        }
        lines = [canonical_dumps(header)]
        lines.extend(canonical_dumps(ev) for ev in self.events)
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")


def validate_events(events: list[dict]) -> None:
    last_t = 0
    for i, ev in enumerate(events):
        kind = ev.get("kind")
        if kind not in EVENT_KINDS:
            raise TraceFormatError(f"event {i}: unknown kind {kind!r}")
        t = ev.get("t")
        if not isinstance(t, int):
            raise TraceFormatError(f"event {i}: missing integer timestamp")
        if t < last_t:
            raise TraceFormatError(f"event {i}: timestamp decreases ({t} < {last_t})")
        last_t = t


def read_trace(path: str | Path) -> Trace:
    """Parse a trace file, validating structure but not protocol properties."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise TraceFormatError("empty trace file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"bad trace header: {exc}") from exc
    if not isinstance(header, dict) or header.get("kind") != "trace_header":
        raise TraceFormatError("first line is not a trace header")
    if header.get("format_version") != TRACE_FORMAT_VERSION:
        raise TraceFormatError(f"unsupported trace format_version {header.get('format_version')}")
    config = ExecutionConfig.from_json(header.get("config", {}))
    events = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            ev = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"line {lineno}: bad JSON: {exc}") from exc
        if not isinstance(ev, dict):
            raise TraceFormatError(f"line {lineno}: event is not an object")
        events.append(ev)
    validate_events(events)
    return Trace(config=config, events=events)
