"""The SQL subagent: schema-aware generation, safety validation, read-only
execution against an embedded SQLite store, and capped result formatting.

Validation is keyword/shape-based rather than a full SQL grammar: one
statement, first keyword SELECT or WITH, no write/DDL keywords outside
string literals, no multi-statement smuggling. Engine errors remain the
backstop, and the store is opened read-only at serve time.
"""

from __future__ import annotations

import csv
import re
import sqlite3
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .config import SystemConfig
from .domain import AgentAnswer, Attachment, RouteLabel, SpanRecorder, UserQuery
from .gateway import ChatGateway, ChatRequest, ExtractionError, GatewayError, extract_code_block

TABLE_NAME = "milk_data_table"

#: Ordered (name, logical type, unit note) columns of the test-day table.
SCHEMA_COLUMNS: tuple[tuple[str, str, str], ...] = (
    ("AnimalIdentifier", "TEXT", ""),
    ("HerdIdentifier", "TEXT", ""),
    ("BirthDate", "TEXT", "ISO-8601 date"),
    ("CalvingDate", "TEXT", "ISO-8601 date"),
    ("SireBreed", "TEXT", ""),
    ("DamBreed", "TEXT", ""),
    ("DaysInMilk", "INTEGER", "days"),
    ("LactationNumber", "INTEGER", ""),
    ("MilkYieldKg", "REAL", "kg"),
    ("FatYieldKg", "REAL", "kg"),
    ("ProteinYieldKg", "REAL", "kg"),
    ("FatPct", "REAL", "%"),
    ("ProteinPct", "REAL", "%"),
    ("SomaticCellCount", "INTEGER", "cells/mL"),
)

_INT_COLUMNS = {"DaysInMilk", "LactationNumber", "SomaticCellCount"}
_REAL_COLUMNS = {"MilkYieldKg", "FatYieldKg", "ProteinYieldKg", "FatPct", "ProteinPct"}

FORBIDDEN_KEYWORDS = (
    "INSERT", "UPDATE", "DELETE", "DROP", "ALTER", "CREATE",
    "ATTACH", "PRAGMA", "REPLACE", "TRUNCATE",
)


class SqlAgentError(Exception):
    pass


class SqlIngestionError(SqlAgentError):
    pass


class SqlValidationError(SqlAgentError):
    """A statement was rejected; the message names the violated rule."""


class SqlExecutionError(SqlAgentError):
    pass


@dataclass(frozen=True)
class SqlPlan:
    statement: str
    validated: bool = False


@dataclass(frozen=True)
class ResultTable:
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    total_row_count: int
    truncated: bool

    def render(self) -> str:
        lines = [" | ".join(self.columns)]
        for row in self.rows:
            lines.append(" | ".join(str(v) for v in row))
        if self.truncated:
            lines.append(
                f"(first {len(self.rows)} of {self.total_row_count} total records)"
            )
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "columns": list(self.columns),
            "rows": [list(r) for r in self.rows],
            "total_row_count": self.total_row_count,
            "truncated": self.truncated,
        }


def render_schema() -> str:
    """CREATE-TABLE-style schema text for the generation prompt."""
    cols = []
    for name, sqltype, note in SCHEMA_COLUMNS:
        comment = f"  -- {note}" if note else ""
        cols.append(f"  {name} {sqltype}{comment}")
    return f"CREATE TABLE {TABLE_NAME} (\n" + ",\n".join(cols) + "\n);"


def _coerce(column: str, value: str):
    value = value.strip()
    if value == "":
        return None
    if column in _INT_COLUMNS:
        return int(value)
    if column in _REAL_COLUMNS:
        return float(value)
    return value


def ingest_csv(csv_path: str | Path, db_path: str | Path) -> int:
    """Load the test-day CSV into the embedded store. Header must contain
    every schema column (order-insensitive); unparseable cells reject the
    row with a warning."""
    csv_path = Path(csv_path)
    if not csv_path.exists():
        raise SqlIngestionError(f"CSV file not found: {csv_path}")
    expected = [c[0] for c in SCHEMA_COLUMNS]
    with csv_path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = set(expected) - set(header)
        if missing:
            raise SqlIngestionError(f"CSV header missing column: {sorted(missing)[0]}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            try:
                rows.append(tuple(_coerce(c, rec[c]) for c in expected))
            except (ValueError, TypeError) as exc:
                print(f"warning: rejecting CSV row {lineno}: {exc}")

    db_path = Path(db_path)
    if db_path.exists():
        db_path.unlink()
    conn = sqlite3.connect(db_path)
    try:
        conn.execute(
            f"CREATE TABLE {TABLE_NAME} ("
            + ", ".join(f"{n} {t}" for n, t, _ in SCHEMA_COLUMNS)
            + ")"
        )
        conn.executemany(
            f"INSERT INTO {TABLE_NAME} VALUES ({', '.join('?' * len(expected))})", rows
        )
        conn.commit()
    finally:
        conn.close()
    return len(rows)


_STRING_LITERAL_RE = re.compile(r"'(?:[^']|'')*'")
_LINE_COMMENT_RE = re.compile(r"--[^\n]*")
_BLOCK_COMMENT_RE = re.compile(r"/\*.*?\*/", re.DOTALL)


def validate_sql(statement: str) -> SqlPlan:
    """Grammar gate for model-generated SQL; every rejection names its rule."""
    if not statement.strip():
        raise SqlValidationError("empty statement")
    # Comments are stripped before any check so they cannot smuggle keywords.
    bare = _BLOCK_COMMENT_RE.sub(" ", statement)
    bare = _LINE_COMMENT_RE.sub(" ", bare)
    no_strings = _STRING_LITERAL_RE.sub("''", bare)

    first = re.match(r"\s*([A-Za-z]+)", no_strings)
    if not first or first.group(1).upper() not in ("SELECT", "WITH"):
        raise SqlValidationError("first keyword must be SELECT or WITH")

    semi = no_strings.find(";")
    if semi != -1 and no_strings[semi + 1 :].strip():
        raise SqlValidationError("multiple statements are not allowed")

    for keyword in FORBIDDEN_KEYWORDS:
        if re.search(rf"\b{keyword}\b", no_strings, re.IGNORECASE):
            raise SqlValidationError(f"forbidden keyword: {keyword}")
    return SqlPlan(statement=statement, validated=True)


class SqlTeam:
    def __init__(self, gateway: ChatGateway, config: SystemConfig):
        self.gateway = gateway
        self.config = config

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

    def generate_sql(self, query: UserQuery) -> SqlPlan:
        clean = self._chat(
            self.config.prompt(
                "sql_generate_user", schema=render_schema(), question=query.text
            ),
            system=self.config.prompt("sql_generate_system"),
        )
        return SqlPlan(statement=extract_code_block(clean, "sql"))

    def execute_sql(self, plan: SqlPlan) -> ResultTable:
        if not plan.validated:
            raise SqlExecutionError("refusing to execute an unvalidated plan")
        db_path = Path(self.config.sql_db_path)
        if not db_path.exists():
            raise SqlExecutionError(f"relational store not ingested: {db_path}")
        uri = f"file:{db_path}?mode=ro"
        try:
            conn = sqlite3.connect(uri, uri=True)
            try:
                cursor = conn.execute(plan.statement)
                columns = tuple(d[0] for d in cursor.description or ())
                all_rows = cursor.fetchall()
            finally:
                conn.close()
        except sqlite3.Error as exc:
            raise SqlExecutionError(f"engine error: {exc}") from exc
        cap = self.config.row_display_cap
        shown = tuple(tuple(r) for r in all_rows[:cap])
        return ResultTable(
            columns=columns,
            rows=shown,
            total_row_count=len(all_rows),
            truncated=len(all_rows) > len(shown),
        )

    def run(self, query: UserQuery, recorder: SpanRecorder, parent_id: str) -> AgentAnswer:
        gen_span = recorder.open("generate_sql", parent_id)
        try:
            plan = self.generate_sql(query)
        except ExtractionError as exc:
            gen_span.close(error="extraction", model_output=exc.clean_text)
            return _stage_error_answer("generate_sql")
        except GatewayError as exc:
            gen_span.close(error=str(exc))
            return _stage_error_answer("generate_sql")
        gen_span.close(statement=plan.statement)

        try:
            plan = validate_sql(plan.statement)
        except SqlValidationError as exc:
            recorder.open("validate_sql", parent_id).close(error=str(exc))
            return _stage_error_answer("validate_sql")

        exec_span = recorder.open("execute_query", parent_id)
        try:
            table = self.execute_sql(plan)
        except SqlExecutionError as exc:
            exec_span.close(error=str(exc))
            return _stage_error_answer("execute_query")
        exec_span.close(rows=len(table.rows), total=table.total_row_count)

        try:
            body = self._chat(
                self.config.prompt(
                    "phrase_result_user", question=query.text, table=table.render()
                )
            )
        except GatewayError:
            body = table.render()  # raw table when phrasing fails
        return AgentAnswer(
            body=body,
            route=RouteLabel.SQL,
            attachments=(Attachment.new("table", "application/json", table.to_json()),),
        )


def _stage_error_answer(stage: str) -> AgentAnswer:
    return AgentAnswer(
        body=f"Sorry, I could not answer that from the farm database ({stage} failed).",
        route=RouteLabel.SQL,
    )
