"""The NoSQL subagent: flattens nested per-cow documents into an event
table, asks the model for a dataframe-chain program, parses it with the
closed DSL grammar, and interprets it against the table.

Executing arbitrary generated code is what makes this path unstable on
small models; the closed grammar keeps validation decidable while keeping
the dataframe surface syntax the model is asked to emit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .config import SystemConfig
from .domain import AgentAnswer, Attachment, RouteLabel, SpanRecorder, UserQuery
from .dsl import (
    DslError,
    DslSyntaxError,
    Frame,
    execute_dsl,
    parse_dsl,
)
from .gateway import ChatGateway, ChatRequest, ExtractionError, GatewayError, extract_code_block
from .sql_agent import ResultTable

#: Flattened projection of one EventRecord, parentage copied from the
#: enclosing document. Absent values are nulls.
EVENT_COLUMNS: tuple[str, ...] = (
    "AnimalId",
    "HerdId",
    "Parity",
    "EventType",
    "TestDate",
    "CalvingDate",
    "BirthDate",
    "DIM",
    "MilkYieldKg",
    "FatPct",
    "ProteinPct",
    "LactosePct",
    "SCC",
    "InseminationNumber",
    "BreedingType",
    "PregnancyResultCode",
    "CalvingEase",
)

_EVENT_FIELD_MAP = {
    "DIM": "days_in_milk",
    "MilkYieldKg": "MilkYieldKg",
    "FatPct": "FatPct",
    "ProteinPct": "ProteinPct",
    "LactosePct": "LactosePct",
    "SCC": "SomaticCellCount",
    "InseminationNumber": "InseminationNumber",
    "BreedingType": "BreedingType",
    "PregnancyResultCode": "PregnancyResultCode",
    "CalvingEase": "CalvingEase",
}


class DocstoreError(Exception):
    pass


class DocIngestionError(DocstoreError):
    pass


@dataclass
class DocstoreSummary:
    doc_count: int
    row_count: int
    rejected: int


class Docstore:
    """Flattened event table, immutable after ingestion."""

    def __init__(self) -> None:
        self.frame: Optional[Frame] = None
        self.doc_count = 0

    def ingest_documents(self, path: str | Path) -> DocstoreSummary:
        path = Path(path)
        if not path.exists():
            raise DocIngestionError(f"document file not found: {path}")
        text = path.read_text().strip()
        if not text:
            raise DocIngestionError(f"empty document file: {path}")
        if text.startswith("["):
            docs = json.loads(text)
        else:  # JSON-lines
            docs = [json.loads(line) for line in text.splitlines() if line.strip()]
        rows: list[tuple] = []
        accepted = 0
        rejected = 0
        for doc in docs:
            try:
                rows.extend(self._flatten(doc))
                accepted += 1
            except (KeyError, TypeError) as exc:
                rejected += 1
                print(f"warning: skipping malformed document: {exc}")
        if accepted == 0:
            raise DocIngestionError(f"no valid documents in {path}")
        self.frame = Frame(EVENT_COLUMNS, tuple(rows))
        self.doc_count = accepted
        return DocstoreSummary(doc_count=accepted, row_count=len(rows), rejected=rejected)

    @staticmethod
    def _flatten(doc: dict) -> list[tuple]:
        rows = []
        for lactation in doc["lactations"]:
            parity = int(lactation["parity"])
            if parity < 1:
                raise TypeError(f"parity must be >= 1, got {parity}")
            for event in lactation["events"]:
                if "event_type" not in event or "test_date" not in event:
                    raise KeyError("event needs event_type and test_date")
                row = {
                    "AnimalId": doc["animal_id"],
                    "HerdId": doc["herd_id"],
                    "Parity": parity,
                    "EventType": event["event_type"],
                    "TestDate": event["test_date"],
                    "CalvingDate": lactation.get("calving_date"),
                    "BirthDate": doc.get("birth_date"),
                }
                for column, key in _EVENT_FIELD_MAP.items():
                    row[column] = event.get(key)
                rows.append(tuple(row[c] for c in EVENT_COLUMNS))
        return rows


def frame_to_result_table(frame: Frame, cap: int) -> ResultTable:
    shown = frame.rows[:cap]
    return ResultTable(
        columns=frame.columns,
        rows=tuple(shown),
        total_row_count=len(frame.rows),
        truncated=len(frame.rows) > len(shown),
    )


class NoSqlTeam:
    def __init__(self, gateway: ChatGateway, config: SystemConfig, store: Docstore):
        self.gateway = gateway
        self.config = config
        self.store = store

    def _chat(self, user: str, system: Optional[str] = None) -> str:
        messages: list[tuple[str, str]] = []
        if system:
            messages.append(("system", system))
        messages.append(("user", user))
        return self.gateway.complete(
            ChatRequest(
                messages=tuple(messages),
                model_name=self.config.model_name,
                temperature=self.config.temperature,
                max_tokens=self.config.max_tokens,
            )
        ).clean_text

    def _generate_source(self, user_prompt: str) -> str:
        clean = self._chat(user_prompt, system=self.config.prompt("dsl_generate_system"))
        return extract_code_block(clean, "dsl")

    def run(self, query: UserQuery, recorder: SpanRecorder, parent_id: str) -> AgentAnswer:
        if self.store.frame is None:
            return _stage_error_answer("ingest_documents")
        columns = ", ".join(EVENT_COLUMNS)

        # One repair retry on syntax error, feeding the parser message back.
        program = None
        last_source = ""
        gen_span = recorder.open("generate_pyspark_code", parent_id)
        try:
            last_source = self._generate_source(
                self.config.prompt("dsl_generate_user", columns=columns, question=query.text)
            )
        except (ExtractionError, GatewayError) as exc:
            gen_span.close(error=str(exc))
            return _stage_error_answer("generate_pyspark_code")
        gen_span.close(source=last_source)
        try:
            program = parse_dsl(last_source, EVENT_COLUMNS)
        except DslSyntaxError as exc:
            repair_span = recorder.open("generate_pyspark_code", parent_id)
            try:
                last_source = self._generate_source(
                    self.config.prompt(
                        "dsl_repair_user",
                        error=str(exc),
                        columns=columns,
                        question=query.text,
                    )
                )
            except (ExtractionError, GatewayError) as exc2:
                repair_span.close(error=str(exc2))
                return _stage_error_answer("generate_pyspark_code")
            repair_span.close(source=last_source)
            try:
                program = parse_dsl(last_source, EVENT_COLUMNS)
            except DslSyntaxError as exc2:
                recorder.open("parse_code", parent_id).close(
                    error=str(exc2), source=last_source
                )
                return AgentAnswer(
                    body=(
                        "Sorry, I could not build a valid query for that question. "
                        f"Failing program: {last_source}"
                    ),
                    route=RouteLabel.NOSQL,
                )

        exec_span = recorder.open("execute_pyspark_code", parent_id)
        try:
            result = execute_dsl(program, self.store.frame)
        except DslError as exc:
            exec_span.close(error=str(exc))
            return _stage_error_answer("execute_pyspark_code")
        exec_span.close(rows=len(result.rows))

        table = frame_to_result_table(result, self.config.row_display_cap)
        try:
            body = self._chat(
                self.config.prompt(
                    "phrase_result_user", question=query.text, table=table.render()
                )
            )
        except GatewayError:
            body = table.render()
        return AgentAnswer(
            body=body,
            route=RouteLabel.NOSQL,
            attachments=(Attachment.new("table", "application/json", table.to_json()),),
        )


def _stage_error_answer(stage: str) -> AgentAnswer:
    return AgentAnswer(
        body=f"Sorry, I could not answer that from the farm documents ({stage} failed).",
        route=RouteLabel.NOSQL,
    )
