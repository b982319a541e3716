"""Core domain types shared by every agent: queries, routes, answers, traces.

All types are immutable value objects once constructed and safe to share
across threads. Turn assembly is single-writer per session.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Optional


class RouteLabel(Enum):
    """The six routing outcomes. UNKNOWN is internal only and must be
    resolved to CLARIFY before an answer is produced."""

    TEXT = "text_subagent"
    SQL = "sql_subagent"
    NOSQL = "nosql_subagent"
    MODEL = "model_subagent"
    CLARIFY = "clarify_subagent"
    UNKNOWN = "unknown"

    @classmethod
    def from_wire(cls, value: str) -> "RouteLabel":
        for label in cls:
            if label.value == value:
                return label
        raise ValueError(f"unknown route label: {value!r}")


#: Labels a finished turn may carry (everything except UNKNOWN).
FINAL_ROUTES = (
    RouteLabel.TEXT,
    RouteLabel.SQL,
    RouteLabel.NOSQL,
    RouteLabel.MODEL,
    RouteLabel.CLARIFY,
)


class ValidationError(ValueError):
    """A domain invariant was violated while constructing a value."""


def utc_now() -> datetime:
    """UTC wall-clock timestamp at millisecond precision."""
    now = datetime.now(timezone.utc)
    return now.replace(microsecond=(now.microsecond // 1000) * 1000)


@dataclass(frozen=True)
class UserQuery:
    text: str
    session_id: str
    received_at: datetime = field(default_factory=utc_now)

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValidationError("query text is empty after trimming")
        if not self.session_id:
            raise ValidationError("session_id is required")


@dataclass(frozen=True)
class Citation:
    title: str
    doi_or_url: str
    year: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.doi_or_url:
            raise ValidationError("citation needs a DOI or URL")

    def render(self) -> str:
        if self.year is not None:
            return f"{self.title} ({self.year}) – DOI: {self.doi_or_url}"
        return f"{self.title} – {self.doi_or_url}"


@dataclass(frozen=True)
class Attachment:
    """An answer artifact: a table snapshot, a curve-series JSON, or SVG."""

    attachment_id: str
    kind: str  # "table" | "series" | "svg"
    media_type: str
    payload: Any

    @classmethod
    def new(cls, kind: str, media_type: str, payload: Any) -> "Attachment":
        return cls(uuid.uuid4().hex[:12], kind, media_type, payload)


@dataclass(frozen=True)
class AgentAnswer:
    body: str
    route: RouteLabel
    citations: tuple[Citation, ...] = ()
    attachments: tuple[Attachment, ...] = ()
    elapsed: float = 0.0

    def __post_init__(self) -> None:
        if self.elapsed < 0:
            raise ValidationError("elapsed must be non-negative")


@dataclass(frozen=True)
class TraceSpan:
    span_id: str
    name: str
    started_at: float
    ended_at: float
    parent_id: Optional[str] = None
    payload: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.ended_at < self.started_at:
            raise ValidationError("span ended before it started")

    @property
    def duration(self) -> float:
        return self.ended_at - self.started_at


class SpanRecorder:
    """Builds the span tree of one turn. Times come from the monotonic
    clock so latency aggregation survives wall-clock steps."""

    def __init__(self) -> None:
        self.spans: list[TraceSpan] = []

    def record(
        self,
        name: str,
        started_at: float,
        parent_id: Optional[str] = None,
        payload: Optional[dict[str, Any]] = None,
    ) -> TraceSpan:
        span = TraceSpan(
            span_id=uuid.uuid4().hex[:12],
            name=name,
            started_at=started_at,
            ended_at=time.monotonic(),
            parent_id=parent_id,
            payload=payload or {},
        )
        self.spans.append(span)
        return span

    def open(self, name: str, parent_id: Optional[str] = None) -> "_OpenSpan":
        return _OpenSpan(self, name, parent_id)


class _OpenSpan:
    """A span being timed; close() freezes it into the recorder."""

    def __init__(self, recorder: SpanRecorder, name: str, parent_id: Optional[str]):
        self._recorder = recorder
        self.name = name
        self.parent_id = parent_id
        self.started_at = time.monotonic()
        self.span: Optional[TraceSpan] = None

    def close(self, **payload: Any) -> TraceSpan:
        self.span = self._recorder.record(
            self.name, self.started_at, self.parent_id, payload
        )
        return self.span

    @property
    def span_id(self) -> str:
        if self.span is None:
            raise RuntimeError("span not closed yet")
        return self.span.span_id


@dataclass(frozen=True)
class ConversationTurn:
    turn_id: str
    query: UserQuery
    route: RouteLabel = RouteLabel.UNKNOWN
    answer: Optional[AgentAnswer] = None
    spans: tuple[TraceSpan, ...] = ()

    def with_result(
        self, route: RouteLabel, answer: AgentAnswer, spans: tuple[TraceSpan, ...]
    ) -> "ConversationTurn":
        if route not in FINAL_ROUTES:
            raise ValidationError("finished turn must carry a final route")
        return replace(self, route=route, answer=answer, spans=spans)


def new_turn(query: UserQuery) -> ConversationTurn:
    """Start a turn: empty trace, route UNKNOWN, no answer."""
    return ConversationTurn(turn_id=uuid.uuid4().hex[:12], query=query)


def span_tree_root(spans: tuple[TraceSpan, ...]) -> TraceSpan:
    """The single root span of a recorded turn; raises if the tree is
    malformed (zero or multiple roots, or an orphaned parent)."""
    by_id = {s.span_id: s for s in spans}
    roots = [s for s in spans if s.parent_id is None]
    if len(roots) != 1:
        raise ValidationError(f"expected exactly one root span, got {len(roots)}")
    for s in spans:
        if s.parent_id is not None and s.parent_id not in by_id:
            raise ValidationError(f"span {s.span_id} has unknown parent {s.parent_id}")
    return roots[0]
