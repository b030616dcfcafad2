"""Append-only JSONL session log and the usage analyzer.

One record per line; every file begins with a session start mark. The
analyzer reproduces per-session and aggregate usage statistics and the
per-session request timelines, rendered as SVG or a plain-text strip.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

SCHEMA_VERSION = 1

# Feedback runs that count as "requests" for the statistics: a request was
# made whether or not the provider succeeded or the user cancelled it.
REQUEST_STATUSES = {"ok", "provider_error", "cancelled"}


class LogError(RuntimeError):
    pass


class MonotonicityError(LogError):
    pass


class SessionLogWriter:
    """Single-writer JSONL appender with non-decreasing timestamps."""

    def __init__(self, path: Path, session_id: str, start_ts: float):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh: IO[str] = open(self.path, "a", encoding="utf-8")
        self._last_ts = float("-inf")
        self._pending: dict | None = None
        self.append(
            {
                "type": "session_mark",
                "mark": "start",
                "timestamp": start_ts,
                "session_id": session_id,
                "schema": SCHEMA_VERSION,
            }
        )

    def append(self, record: dict) -> None:
        ts = record.get("timestamp")
        if ts is None:
            raise LogError("record has no timestamp")
        if ts < self._last_ts:
            raise MonotonicityError(
                f"timestamp {ts} precedes previous {self._last_ts}"
            )
        line = json.dumps(record, ensure_ascii=False, separators=(",", ":"))
        try:
            self._fh.write(line + "\n")
            self._fh.flush()
        except OSError:
            self._pending = record  # preserved for retry
            raise
        self._last_ts = ts

    def retry_pending(self) -> bool:
        if self._pending is None:
            return False
        record, self._pending = self._pending, None
        self.append(record)
        return True

    def close(self, end_ts: float | None = None):
        if end_ts is not None:
            self.append(
                {
                    "type": "session_mark",
                    "mark": "end",
                    "timestamp": end_ts,
                    "session_id": None,
                }
            )
        self._fh.close()


def read_records(path: Path) -> list[dict]:
    """Parse one log file. A torn final line is dropped with a warning;
    malformed interior lines are hard errors naming file and line."""
    records = []
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            if i == len(lines) - 1:
                warnings.warn(f"{path}: dropping torn final line {i + 1}")
                continue
            raise LogError(f"{path}:{i + 1}: malformed record: {exc}") from exc
    return records


@dataclass
class SessionSummary:
    session_id: str
    total_events: int = 0  # feedback requests
    manual_count: int = 0
    auto_count: int = 0
    persona_counts: dict[str, int] = field(default_factory=dict)
    kind_counts: dict[str, int] = field(default_factory=dict)
    first_ts: float | None = None
    last_ts: float | None = None


@dataclass
class SessionStats:
    sessions: list[SessionSummary]

    @property
    def session_count(self) -> int:
        return len(self.sessions)

    @property
    def total_requests(self) -> int:
        return sum(s.total_events for s in self.sessions)

    @property
    def manual_total(self) -> int:
        return sum(s.manual_count for s in self.sessions)

    @property
    def auto_total(self) -> int:
        return sum(s.auto_count for s in self.sessions)

    @property
    def mean_total_per_session(self) -> float:
        if not self.sessions:
            return 0.0
        return self.total_requests / self.session_count

    @property
    def mean_manual_per_session(self) -> float:
        if not self.sessions:
            return 0.0
        return self.manual_total / self.session_count

    @property
    def persona_totals(self) -> dict[str, int]:
        totals: dict[str, int] = {}
        for s in self.sessions:
            for persona, n in s.persona_counts.items():
                totals[persona] = totals.get(persona, 0) + n
        return totals

    def manual_persona_totals(self) -> dict[str, int]:
        return dict(self._manual_persona)

    _manual_persona: dict[str, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "session_count": self.session_count,
            "total_requests": self.total_requests,
            "manual_total": self.manual_total,
            "auto_total": self.auto_total,
            "mean_total_per_session": self.mean_total_per_session,
            "mean_manual_per_session": self.mean_manual_per_session,
            "persona_totals": self.persona_totals,
            "manual_persona_totals": self.manual_persona_totals(),
            "sessions": [
                {
                    "session_id": s.session_id,
                    "total_events": s.total_events,
                    "manual_count": s.manual_count,
                    "auto_count": s.auto_count,
                    "persona_counts": s.persona_counts,
                    "kind_counts": s.kind_counts,
                    "first_ts": s.first_ts,
                    "last_ts": s.last_ts,
                }
                for s in self.sessions
            ],
        }


def _is_request(record: dict) -> bool:
    return (
        record.get("type") == "feedback_event"
        and record.get("kind") == "feedback"
        and record.get("status") in REQUEST_STATUSES
    )


def analyze(paths: Iterable[Path]) -> SessionStats:
    """Compute per-session and aggregate usage statistics over log files."""
    sessions: list[SessionSummary] = []
    manual_persona: dict[str, int] = {}
    for path in paths:
        records = read_records(path)
        session_id = str(path)
        for rec in records:
            if rec.get("type") == "session_mark" and rec.get("mark") == "start":
                session_id = rec.get("session_id") or session_id
                break
        summary = SessionSummary(session_id=session_id)
        for rec in records:
            if rec.get("type") != "feedback_event":
                continue
            kind = rec.get("kind", "feedback")
            summary.kind_counts[kind] = summary.kind_counts.get(kind, 0) + 1
            if not _is_request(rec):
                continue
            summary.total_events += 1
            persona = rec.get("persona", "?")
            summary.persona_counts[persona] = summary.persona_counts.get(persona, 0) + 1
            if rec.get("trigger") == "manual":
                summary.manual_count += 1
                manual_persona[persona] = manual_persona.get(persona, 0) + 1
            else:
                summary.auto_count += 1
            ts = rec.get("timestamp")
            if summary.first_ts is None or ts < summary.first_ts:
                summary.first_ts = ts
            if summary.last_ts is None or ts > summary.last_ts:
                summary.last_ts = ts
        sessions.append(summary)
    stats = SessionStats(sessions=sessions)
    stats._manual_persona = manual_persona
    return stats


@dataclass(frozen=True)
class TimelinePoint:
    offset_s: float
    persona: str
    trigger: str  # manual | auto


@dataclass
class Timeline:
    session_id: str
    points: list[TimelinePoint]


def timeline(path: Path) -> Timeline:
    """Per-session request timeline, offsets from the first feedback request."""
    records = read_records(path)
    session_id = str(path)
    for rec in records:
        if rec.get("type") == "session_mark" and rec.get("mark") == "start":
            session_id = rec.get("session_id") or session_id
            break
    requests = [r for r in records if _is_request(r)]
    if not requests:
        return Timeline(session_id=session_id, points=[])
    t0 = requests[0]["timestamp"]
    return Timeline(
        session_id=session_id,
        points=[
            TimelinePoint(r["timestamp"] - t0, r.get("persona", "?"), r.get("trigger", "auto"))
            for r in requests
        ],
    )


_PERSONA_COLORS = {
    "mentor": "#2d7dd2",
    "cheerleader": "#f2b705",
    "critic": "#d7263d",
    "designer": "#9852f9",
    "analyst": "#1b998b",
    "ceo": "#f46036",
    "friend": "#ec4b9b",
    "no_persona": "#6c757d",
}


def render_timeline_svg(timelines: list[Timeline], px_per_second: float = 0.5) -> str:
    """Squares = manual, circles = auto, color = persona; one row per session."""
    row_h, pad, r = 28, 60, 5
    max_t = max((p.offset_s for tl in timelines for p in tl.points), default=0.0)
    width = int(pad + max_t * px_per_second + 40)
    height = row_h * max(len(timelines), 1) + 20
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
    ]
    for i, tl in enumerate(timelines):
        cy = 20 + i * row_h
        parts.append(
            f'<text x="4" y="{cy + 4}" font-size="10">{tl.session_id}</text>'
        )
        parts.append(
            f'<line x1="{pad}" y1="{cy}" x2="{width - 10}" y2="{cy}" stroke="#ddd"/>'
        )
        for p in tl.points:
            cx = pad + p.offset_s * px_per_second
            color = _PERSONA_COLORS.get(p.persona, "#333")
            if p.trigger == "manual":
                parts.append(
                    f'<rect x="{cx - r:.1f}" y="{cy - r}" width="{2 * r}" height="{2 * r}" fill="{color}"/>'
                )
            else:
                parts.append(f'<circle cx="{cx:.1f}" cy="{cy}" r="{r}" fill="{color}"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def render_timeline_text(timelines: list[Timeline], bucket_s: float = 60.0) -> str:
    """Terminal strip: one row per session, `#` manual, `o` auto, `.` empty."""
    max_t = max((p.offset_s for tl in timelines for p in tl.points), default=0.0)
    buckets = int(max_t // bucket_s) + 1
    lines = []
    for tl in timelines:
        cells = ["."] * buckets
        for p in tl.points:
            idx = int(p.offset_s // bucket_s)
            mark = "#" if p.trigger == "manual" else "o"
            cells[idx] = "#" if cells[idx] == "#" else mark
        label = (tl.session_id or "?")[:16].ljust(16)
        row = label + " |" + "".join(cells) + "|"
        if not tl.points:
            row += " (empty)"
        lines.append(row)
    return "\n".join(lines)
