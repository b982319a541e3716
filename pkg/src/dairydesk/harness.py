"""Two-phase evaluation harness.

Phase 1 sends a small screening set directly to the owning subagent and
gates on error-free execution plus checker verdicts. Phase 2 runs the full
30-question benchmark through the supervisor and reports per-category
correctness (k/5 plus overall) and per-category total seconds. Expert
grading is modeled as rubric checkers with a `manual` escape hatch.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .domain import RouteLabel
from .service import Orchestrator, TurnResult
from .domain import UserQuery

CATEGORIES = ("literature", "web", "sql", "nosql", "model", "guard")

CATEGORY_TITLES = {
    "literature": "Literature Retrieval",
    "web": "Web Search",
    "sql": "SQL Database",
    "nosql": "NoSQL Database",
    "model": "Model Interaction",
    "guard": "Inappropriate Query",
}

CHECKER_KINDS = ("contains_any", "numeric_equals", "regex", "exact", "manual")


class HarnessError(Exception):
    pass


@dataclass(frozen=True)
class Checker:
    kind: str
    keywords: tuple[str, ...] = ()
    value: float = 0.0
    tolerance: float = 0.0
    pattern: str = ""
    text: str = ""

    def __post_init__(self) -> None:
        if self.kind not in CHECKER_KINDS:
            raise HarnessError(f"unknown checker kind: {self.kind}")

    def verdict(self, body: str) -> str:
        """"pass", "fail", or "needs_manual"."""
        if self.kind == "manual":
            return "needs_manual"
        if self.kind == "contains_any":
            lowered = body.lower()
            return "pass" if any(k.lower() in lowered for k in self.keywords) else "fail"
        if self.kind == "exact":
            return "pass" if body == self.text else "fail"
        if self.kind == "regex":
            return "pass" if re.search(self.pattern, body) else "fail"
        if self.kind == "numeric_equals":
            for token in re.findall(r"-?\d+(?:\.\d+)?", body.replace(",", "")):
                if abs(float(token) - self.value) <= self.tolerance:
                    return "pass"
            return "fail"
        raise HarnessError(f"unknown checker kind: {self.kind}")

    @classmethod
    def from_json(cls, data: dict) -> "Checker":
        return cls(
            kind=data["kind"],
            keywords=tuple(data.get("keywords", [])),
            value=float(data.get("value", 0.0)),
            tolerance=float(data.get("tolerance", 0.0)),
            pattern=data.get("pattern", ""),
            text=data.get("text", ""),
        )

    def to_json(self) -> dict:
        data: dict = {"kind": self.kind}
        if self.kind == "contains_any":
            data["keywords"] = list(self.keywords)
        elif self.kind == "numeric_equals":
            data["value"] = self.value
            data["tolerance"] = self.tolerance
        elif self.kind == "regex":
            data["pattern"] = self.pattern
        elif self.kind == "exact":
            data["text"] = self.text
        return data


@dataclass(frozen=True)
class EvalItem:
    item_id: str
    category: str
    question: str
    phase: int
    expected_route: RouteLabel
    expected_tool_spans: tuple[str, ...]
    checker: Checker

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise HarnessError(f"unknown category: {self.category}")
        if self.phase not in (1, 2):
            raise HarnessError("phase must be 1 or 2")

    @classmethod
    def from_json(cls, data: dict) -> "EvalItem":
        return cls(
            item_id=data["item_id"],
            category=data["category"],
            question=data["question"],
            phase=int(data["phase"]),
            expected_route=RouteLabel.from_wire(data["expected_route"]),
            expected_tool_spans=tuple(data.get("expected_tool_spans", [])),
            checker=Checker.from_json(data["checker"]),
        )

    def to_json(self) -> dict:
        return {
            "item_id": self.item_id,
            "category": self.category,
            "question": self.question,
            "phase": self.phase,
            "expected_route": self.expected_route.value,
            "expected_tool_spans": list(self.expected_tool_spans),
            "checker": self.checker.to_json(),
        }


def load_items(path: str | Path, phase: int) -> list[EvalItem]:
    items = [EvalItem.from_json(d) for d in json.loads(Path(path).read_text())]
    bad = [i.item_id for i in items if i.phase != phase]
    if bad:
        raise HarnessError(f"items with wrong phase in {path}: {bad}")
    counts = {c: sum(1 for i in items if i.category == c) for c in CATEGORIES}
    if phase == 1 and (len(items) != 5 or counts["literature"] != 2 or counts["web"] != 2 or counts["sql"] != 1):
        raise HarnessError("phase-1 fixture must hold 2 literature, 2 web, 1 sql items")
    if phase == 2 and (len(items) != 30 or any(counts[c] != 5 for c in CATEGORIES)):
        raise HarnessError("phase-2 fixture must hold 30 items, 5 per category")
    return items


@dataclass
class ItemOutcome:
    item: EvalItem
    route_correct: bool
    tool_correct: bool
    answer_verdict: str  # pass | fail | needs_manual
    elapsed: float
    error: Optional[str] = None  # failing stage name
    answer_body: str = ""

    @property
    def counts_as_correct(self) -> bool:
        return self.route_correct and self.answer_verdict == "pass"

    @property
    def gate_pass(self) -> bool:
        """Phase-1 screening gate: error-free and checker not failing."""
        return self.error is None and self.answer_verdict in ("pass", "needs_manual")


@dataclass
class PhaseReport:
    phase: int
    model_id: str
    outcomes: list[ItemOutcome] = field(default_factory=list)

    def categories(self) -> list[str]:
        return [c for c in CATEGORIES if any(o.item.category == c for o in self.outcomes)]

    def category_outcomes(self, category: str) -> list[ItemOutcome]:
        return [o for o in self.outcomes if o.item.category == category]

    def correctness(self, category: str) -> str:
        members = self.category_outcomes(category)
        return f"{sum(o.counts_as_correct for o in members)}/{len(members)}"

    def overall(self) -> str:
        return f"{sum(o.counts_as_correct for o in self.outcomes)}/{len(self.outcomes)}"

    def seconds(self, category: str) -> float:
        return sum(o.elapsed for o in self.category_outcomes(category))

    def pending(self) -> list[str]:
        return [o.item.item_id for o in self.outcomes if o.answer_verdict == "needs_manual"]

    def to_json(self) -> dict:
        return {
            "phase": self.phase,
            "model_id": self.model_id,
            "outcomes": [
                {
                    "item": o.item.to_json(),
                    "route_correct": o.route_correct,
                    "tool_correct": o.tool_correct,
                    "answer_verdict": o.answer_verdict,
                    "elapsed": o.elapsed,
                    "error": o.error,
                    "answer_body": o.answer_body,
                }
                for o in self.outcomes
            ],
            "correctness": {c: self.correctness(c) for c in self.categories()},
            "overall": self.overall(),
            "seconds": {c: round(self.seconds(c), 4) for c in self.categories()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "PhaseReport":
        report = cls(phase=int(data["phase"]), model_id=data["model_id"])
        for o in data["outcomes"]:
            report.outcomes.append(
                ItemOutcome(
                    item=EvalItem.from_json(o["item"]),
                    route_correct=o["route_correct"],
                    tool_correct=o["tool_correct"],
                    answer_verdict=o["answer_verdict"],
                    elapsed=o["elapsed"],
                    error=o["error"],
                    answer_body=o.get("answer_body", ""),
                )
            )
        return report


def _routed_label(result: TurnResult) -> Optional[RouteLabel]:
    for span in result.turn.spans:
        if span.name == "supervisor" and "route" in span.payload:
            return RouteLabel.from_wire(span.payload["route"])
    return None


def _failing_stage(result: TurnResult) -> Optional[str]:
    for span in result.turn.spans:
        if "error" in span.payload:
            return span.name
    return None


def _evaluate(item: EvalItem, result: TurnResult, check_route: bool) -> ItemOutcome:
    routed = _routed_label(result)
    route_correct = (routed == item.expected_route) if check_route else True
    span_names = [s.name for s in result.turn.spans]
    tool_correct = all(
        any(pattern in name for name in span_names) for pattern in item.expected_tool_spans
    )
    error = _failing_stage(result)
    body = result.answer.body if result.turn.answer else ""
    verdict = item.checker.verdict(body)
    if error is not None:
        verdict = "fail"
    return ItemOutcome(
        item=item,
        route_correct=route_correct,
        tool_correct=tool_correct,
        answer_verdict=verdict,
        elapsed=result.total_seconds,
        error=error,
        answer_body=body,
    )


def run_phase1(orchestrator: Orchestrator, items: list[EvalItem], model_id: str) -> PhaseReport:
    """Each screening item goes directly to its subagent; all failures are
    recorded outcomes, never raised."""
    report = PhaseReport(phase=1, model_id=model_id)
    for n, item in enumerate(items):
        query = UserQuery(text=item.question, session_id=f"phase1-{n}")
        result = orchestrator.handle_turn(query, mode="direct", route=item.expected_route)
        report.outcomes.append(_evaluate(item, result, check_route=False))
    return report


def run_phase2(orchestrator: Orchestrator, items: list[EvalItem], model_id: str) -> PhaseReport:
    """All 30 items run in supervised mode, strictly sequentially so gateway
    contention cannot distort latency."""
    report = PhaseReport(phase=2, model_id=model_id)
    for n, item in enumerate(items):
        query = UserQuery(text=item.question, session_id=f"phase2-{n}")
        result = orchestrator.handle_turn(query, mode="supervised")
        report.outcomes.append(_evaluate(item, result, check_route=True))
    return report


def render_report(report: PhaseReport, fmt: str = "table-text") -> str:
    if fmt == "json":
        return json.dumps(report.to_json(), indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        cats = report.categories()
        writer.writerow(["model", *[CATEGORY_TITLES[c] for c in cats], "Overall"])
        writer.writerow(
            [report.model_id, *[report.correctness(c) for c in cats], report.overall()]
        )
        writer.writerow(["seconds", *[f"{report.seconds(c):.2f}" for c in cats], ""])
        return buf.getvalue()
    if fmt == "table-text":
        cats = report.categories()
        headers = [CATEGORY_TITLES[c] for c in cats] + ["Overall"]
        correctness = [report.correctness(c) for c in cats] + [report.overall()]
        seconds = [f"{report.seconds(c):.2f}" for c in cats] + [""]
        widths = [
            max(len(h), len(v), len(s)) for h, v, s in zip(headers, correctness, seconds)
        ]
        label_width = max(len(report.model_id), len("Correctness"), len("Seconds"))

        def row(label: str, cells: list[str]) -> str:
            padded = [c.ljust(w) for c, w in zip(cells, widths)]
            return " | ".join([label.ljust(label_width), *padded]).rstrip()

        lines = [
            row(f"Phase {report.phase}", headers),
            row("Correctness", correctness),
            row("Seconds", seconds),
        ]
        pending = report.pending()
        if pending:
            lines.append(f"Pending manual grades: {', '.join(pending)}")
        return "\n".join(lines) + "\n"
    raise HarnessError(f"unknown report format: {fmt}")
