"""End-to-end wiring: supervisor -> team pipelines, session and trace
capture, and the HTTP API used by the CLI, the evaluation harness, and the
web UI.

Wire formats defined here are stable for the UI: TurnResult JSON, span-tree
JSON, and problem-detail errors {error, stage, detail}.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path
from typing import Any, Optional

from starlette.requests import Request

from .config import SystemConfig
from .docstore import Docstore, NoSqlTeam
from .domain import (
    AgentAnswer,
    Attachment,
    Citation,
    ConversationTurn,
    RouteLabel,
    SpanRecorder,
    TraceSpan,
    UserQuery,
    ValidationError,
    new_turn,
)
from .gateway import ChatGateway, GatewayError, backend_from_config
from .knowledge import (
    CorpusIndex,
    FixtureWebProvider,
    HttpWebProvider,
    TextTeam,
)
from .milkbot import ModelTeam, ParamTable
from .router import RouteDecision, Supervisor, clarify_response
from .sql_agent import SqlTeam, ingest_csv

TEAM_SPAN_NAMES = {
    RouteLabel.TEXT: "text team",
    RouteLabel.SQL: "sql team",
    RouteLabel.NOSQL: "nosql team",
    RouteLabel.MODEL: "model team",
    RouteLabel.CLARIFY: "customer service",
}


class ServiceError(Exception):
    pass


@dataclass
class Session:
    session_id: str
    turns: list[ConversationTurn] = field(default_factory=list)


@dataclass(frozen=True)
class TurnResult:
    turn: ConversationTurn
    total_seconds: float

    @property
    def answer(self) -> AgentAnswer:
        assert self.turn.answer is not None
        return self.turn.answer


# ---------------------------------------------------------------------------
# Wire format


def span_to_json(span: TraceSpan) -> dict:
    return {
        "span_id": span.span_id,
        "parent_id": span.parent_id,
        "name": span.name,
        "started_at": span.started_at,
        "ended_at": span.ended_at,
        "payload": span.payload,
    }


def span_from_json(data: dict) -> TraceSpan:
    return TraceSpan(
        span_id=data["span_id"],
        parent_id=data.get("parent_id"),
        name=data["name"],
        started_at=data["started_at"],
        ended_at=data["ended_at"],
        payload=data.get("payload", {}),
    )


def turn_to_json(turn: ConversationTurn) -> dict:
    answer = None
    if turn.answer is not None:
        answer = {
            "body": turn.answer.body,
            "route": turn.answer.route.value,
            "elapsed": turn.answer.elapsed,
            "citations": [
                {"title": c.title, "year": c.year, "doi_or_url": c.doi_or_url}
                for c in turn.answer.citations
            ],
            "attachments": [
                {
                    "attachment_id": a.attachment_id,
                    "kind": a.kind,
                    "media_type": a.media_type,
                    "payload": a.payload,
                }
                for a in turn.answer.attachments
            ],
        }
    return {
        "turn_id": turn.turn_id,
        "query": {
            "text": turn.query.text,
            "session_id": turn.query.session_id,
            "received_at": turn.query.received_at.isoformat(),
        },
        "route": turn.route.value,
        "answer": answer,
        "spans": [span_to_json(s) for s in turn.spans],
    }


def turn_from_json(data: dict) -> ConversationTurn:
    answer = None
    if data.get("answer") is not None:
        a = data["answer"]
        answer = AgentAnswer(
            body=a["body"],
            route=RouteLabel.from_wire(a["route"]),
            elapsed=a["elapsed"],
            citations=tuple(
                Citation(title=c["title"], year=c.get("year"), doi_or_url=c["doi_or_url"])
                for c in a["citations"]
            ),
            attachments=tuple(
                Attachment(x["attachment_id"], x["kind"], x["media_type"], x["payload"])
                for x in a["attachments"]
            ),
        )
    return ConversationTurn(
        turn_id=data["turn_id"],
        query=UserQuery(
            text=data["query"]["text"],
            session_id=data["query"]["session_id"],
            received_at=datetime.fromisoformat(data["query"]["received_at"]),
        ),
        route=RouteLabel.from_wire(data["route"]),
        answer=answer,
        spans=tuple(span_from_json(s) for s in data["spans"]),
    )


class TraceStore:
    """Append-only JSON-lines file per day plus an in-memory index."""

    def __init__(self, trace_dir: str | Path):
        self.trace_dir = Path(trace_dir)
        self.trace_dir.mkdir(parents=True, exist_ok=True)
        self._by_turn: dict[str, ConversationTurn] = {}
        self._lock = threading.Lock()

    def append(self, turn: ConversationTurn) -> None:
        line = json.dumps(turn_to_json(turn))
        with self._lock:
            path = self.trace_dir / f"{date.today().isoformat()}.jsonl"
            with path.open("a") as fh:
                fh.write(line + "\n")
            self._by_turn[turn.turn_id] = turn

    def get(self, turn_id: str) -> Optional[ConversationTurn]:
        return self._by_turn.get(turn_id)


class Orchestrator:
    """Builds teams from config and runs turns. Data stores are read-only
    at serve time; per-session turn processing is serialized."""

    def __init__(self, config: SystemConfig, gateway: Optional[ChatGateway] = None):
        self.config = config
        self.gateway = gateway or ChatGateway(
            backend_from_config(
                config.model_endpoint, config.mock_script_path, config.timeout
            )
        )
        self.supervisor = Supervisor(self.gateway, config)
        self.corpus = CorpusIndex()
        if config.web_provider == "http" and config.web_url_template:
            web = HttpWebProvider(config.web_url_template)
        else:
            web = FixtureWebProvider(config.web_fixture_path)
        self.text_team = TextTeam(self.gateway, config, self.corpus, web)
        self.sql_team = SqlTeam(self.gateway, config)
        self.docstore = Docstore()
        self.nosql_team = NoSqlTeam(self.gateway, config, self.docstore)
        self.param_table = ParamTable.load(config.milkbot_params_path)
        self.model_team = ModelTeam(self.gateway, config, self.param_table)
        self.traces = TraceStore(config.trace_dir)
        self.sessions: dict[str, Session] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._lock = threading.Lock()

    def ingest_all(self) -> None:
        self.corpus.ingest_abstracts(self.config.corpus_path)
        self.docstore.ingest_documents(self.config.nosql_path)
        if not Path(self.config.sql_db_path).exists():
            ingest_csv(self.config.sql_csv_path, self.config.sql_db_path)

    def _session_lock(self, session_id: str) -> threading.Lock:
        with self._lock:
            return self._session_locks.setdefault(session_id, threading.Lock())

    def handle_turn(
        self, query: UserQuery, mode: str = "supervised", route: Optional[RouteLabel] = None
    ) -> TurnResult:
        """Supervised mode classifies then runs the routed team; direct mode
        skips classification. Failures produce an error answer, never an
        unhandled crash."""
        if mode not in ("supervised", "direct"):
            raise ServiceError(f"unknown mode: {mode}")
        if mode == "direct" and route is None:
            raise ServiceError("direct mode requires a route")
        with self._session_lock(query.session_id):
            return self._run_turn(query, mode, route)

    def _run_turn(
        self, query: UserQuery, mode: str, route: Optional[RouteLabel]
    ) -> TurnResult:
        turn = new_turn(query)
        recorder = SpanRecorder()
        started = time.monotonic()
        root = recorder.open("supervisor")

        decision: Optional[RouteDecision] = None
        if mode == "supervised":
            try:
                decision = self.supervisor.classify(query)
                label = decision.label
            except GatewayError as exc:
                label = RouteLabel.CLARIFY
                answer = AgentAnswer(
                    body=f"Sorry, the model backend failed while routing: {exc}",
                    route=RouteLabel.CLARIFY,
                )
                root.close(error=str(exc), stage="route_from_supervisor")
                return self._finish(turn, label, answer, recorder, started)
        else:
            label = route

        root_payload: dict[str, Any] = {"mode": mode, "route": label.value}
        if label is RouteLabel.CLARIFY:
            # Clarify turns keep the two-span shape: supervisor + customer
            # service; the decision lands in the root payload.
            if decision is not None:
                root_payload["raw_model_output"] = decision.raw_model_output
                root_payload["fallback_applied"] = decision.fallback_applied
            root.close(**root_payload)
            team_span = recorder.open(TEAM_SPAN_NAMES[label], root.span_id)
            answer = clarify_response()
            team_span.close()
            return self._finish(turn, label, answer, recorder, started)

        root.close(**root_payload)
        if mode == "supervised" and decision is not None:
            recorder.open("route_from_supervisor", root.span_id).close(
                label=label.value,
                raw_model_output=decision.raw_model_output,
                fallback_applied=decision.fallback_applied,
            )

        team_span = recorder.open(TEAM_SPAN_NAMES[label], root.span_id)
        try:
            if label is RouteLabel.TEXT:
                answer = self.text_team.run(query, recorder, root.span_id)
            elif label is RouteLabel.SQL:
                answer = self.sql_team.run(query, recorder, root.span_id)
            elif label is RouteLabel.NOSQL:
                answer = self.nosql_team.run(query, recorder, root.span_id)
            elif label is RouteLabel.MODEL:
                answer = self.model_team.run(query, recorder, root.span_id)
            else:
                answer = clarify_response()
        except Exception as exc:  # crash containment: degrade, never raise
            answer = AgentAnswer(
                body=f"Sorry, something went wrong while answering ({exc}).",
                route=label,
            )
        team_span.close()
        return self._finish(turn, label, answer, recorder, started)

    def _finish(
        self,
        turn: ConversationTurn,
        label: RouteLabel,
        answer: AgentAnswer,
        recorder: SpanRecorder,
        started: float,
    ) -> TurnResult:
        total = time.monotonic() - started
        answer = AgentAnswer(
            body=answer.body,
            route=answer.route,
            citations=answer.citations,
            attachments=answer.attachments,
            elapsed=total,
        )
        spans = self._reparent(recorder.spans)
        turn = turn.with_result(label, answer, spans)
        session = self.sessions.setdefault(
            turn.query.session_id, Session(turn.query.session_id)
        )
        session.turns.append(turn)
        self.traces.append(turn)
        return TurnResult(turn=turn, total_seconds=total)

    @staticmethod
    def _reparent(spans: list[TraceSpan]) -> tuple[TraceSpan, ...]:
        """Attach any orphan tool spans to the root so every recorded turn
        forms a single supervisor-rooted tree."""
        roots = [s for s in spans if s.parent_id is None and s.name == "supervisor"]
        if not roots:
            return tuple(spans)
        root_id = roots[0].span_id
        by_id = {s.span_id for s in spans}
        fixed = []
        for s in spans:
            if s is not roots[0] and (s.parent_id is None or s.parent_id not in by_id):
                s = TraceSpan(
                    span_id=s.span_id,
                    name=s.name,
                    started_at=s.started_at,
                    ended_at=s.ended_at,
                    parent_id=root_id,
                    payload=s.payload,
                )
            fixed.append(s)
        return tuple(fixed)


# ---------------------------------------------------------------------------
# HTTP API


def create_app(orchestrator: Orchestrator):
    from fastapi import FastAPI
    from fastapi.responses import JSONResponse, Response

    app = FastAPI(title="dairydesk")

    def problem(status: int, error: str, stage: str, detail: str) -> JSONResponse:
        return JSONResponse(
            status_code=status,
            content={"error": error, "stage": stage, "detail": detail},
        )

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "model_endpoint": orchestrator.config.model_endpoint
            or ("mock" if orchestrator.config.mock_script_path else None),
        }

    @app.post("/chat")
    async def chat(request: Request):
        try:
            payload = await request.json()
        except Exception:
            return problem(400, "bad_request", "parse", "body must be JSON")
        if not isinstance(payload, dict):
            return problem(400, "bad_request", "parse", "body must be a JSON object")
        question = payload.get("question")
        session = payload.get("session", "default")
        mode = payload.get("mode", "supervised")
        route_name = payload.get("route")
        if not isinstance(question, str):
            return problem(400, "bad_request", "validate", "question must be a string")
        if not isinstance(session, str) or not session:
            return problem(400, "bad_request", "validate", "session must be a string")
        route = None
        if route_name is not None:
            try:
                route = RouteLabel.from_wire(str(route_name))
                mode = "direct"
            except ValueError:
                return problem(400, "bad_request", "validate", f"unknown route {route_name!r}")
        try:
            query = UserQuery(text=question, session_id=session)
        except ValidationError as exc:
            return problem(400, "bad_request", "validate", str(exc))
        try:
            result = orchestrator.handle_turn(query, mode=mode, route=route)
        except ServiceError as exc:
            return problem(400, "bad_request", "handle_turn", str(exc))
        body = turn_to_json(result.turn)
        body["total_seconds"] = result.total_seconds
        return JSONResponse(body)

    @app.get("/trace/{turn_id}")
    def trace(turn_id: str):
        turn = orchestrator.traces.get(turn_id)
        if turn is None:
            return problem(404, "not_found", "trace", f"unknown turn {turn_id}")
        return JSONResponse({"turn_id": turn_id, "spans": [span_to_json(s) for s in turn.spans]})

    @app.get("/turns")
    def turns(session: str = "default"):
        sess = orchestrator.sessions.get(session)
        items = [turn_to_json(t) for t in (sess.turns if sess else [])]
        return JSONResponse({"session": session, "turns": items})

    @app.get("/plot/{turn_id}/{attachment_id}")
    def plot(turn_id: str, attachment_id: str):
        turn = orchestrator.traces.get(turn_id)
        if turn is None or turn.answer is None:
            return problem(404, "not_found", "plot", f"unknown turn {turn_id}")
        for a in turn.answer.attachments:
            if a.attachment_id == attachment_id and a.kind == "svg":
                return Response(content=a.payload, media_type="image/svg+xml")
        return problem(404, "not_found", "plot", f"no SVG attachment {attachment_id}")

    return app


def serve(config: SystemConfig, host: str = "127.0.0.1", port: int = 8000) -> None:
    import uvicorn

    orchestrator = Orchestrator(config)
    orchestrator.ingest_all()
    uvicorn.run(create_app(orchestrator), host=host, port=port)
