"""Supervisor routing and the intention-validation (clarify) subagent.

One gateway call classifies the question; the emitted label is parsed by
exact match first, then substring. Anything unparseable collapses to
CLARIFY, so routing is total and UNKNOWN never escapes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import SystemConfig
from .domain import AgentAnswer, RouteLabel, UserQuery
from .gateway import ChatGateway, ChatRequest
from .prompts import CLARIFY_TEMPLATE

#: Substring tie-break order: clarify first so safety-flagged outputs cannot
#: be hijacked by an incidental "sql" mention.
_SUBSTRING_ORDER = (
    RouteLabel.CLARIFY,
    RouteLabel.MODEL,
    RouteLabel.NOSQL,
    RouteLabel.SQL,
    RouteLabel.TEXT,
)


@dataclass(frozen=True)
class RouteDecision:
    label: RouteLabel
    raw_model_output: str
    fallback_applied: bool

    def __post_init__(self) -> None:
        if self.label is RouteLabel.UNKNOWN:
            raise ValueError("route decisions never carry UNKNOWN")


def parse_route_label(clean_text: str) -> tuple[RouteLabel, bool]:
    """Returns (label, fallback_applied). Exact match after lowercasing and
    trimming; substring match as a fallback; CLARIFY when both fail."""
    text = clean_text.strip().lower()
    for label in _SUBSTRING_ORDER:
        if text == label.value:
            return label, False
    for label in _SUBSTRING_ORDER:
        if label.value in text:
            return label, False
    return RouteLabel.CLARIFY, True


class Supervisor:
    def __init__(self, gateway: ChatGateway, config: SystemConfig):
        self.gateway = gateway
        self.config = config

    def classify(self, query: UserQuery) -> RouteDecision:
        req = ChatRequest(
            messages=(
                ("system", self.config.prompt("supervisor_system")),
                ("user", self.config.prompt("supervisor_user", question=query.text)),
            ),
            model_name=self.config.model_name,
            temperature=self.config.temperature,
            max_tokens=self.config.max_tokens,
        )
        resp = self.gateway.complete(req)
        label, fallback = parse_route_label(resp.clean_text)
        return RouteDecision(
            label=label, raw_model_output=resp.raw_text, fallback_applied=fallback
        )


def clarify_response() -> AgentAnswer:
    """The fixed intention-validation answer, byte-identical every call."""
    return AgentAnswer(body=CLARIFY_TEMPLATE, route=RouteLabel.CLARIFY)
