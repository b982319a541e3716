"""Command-line entry points: ingest fixtures, ask one question, serve the
HTTP API, and run the two evaluation phases.

Exit codes: 0 success, 1 evaluation below threshold or stage failure,
2 usage/configuration error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional

import click

from .config import SystemConfig
from .domain import RouteLabel, UserQuery
from .harness import load_items, render_report, run_phase1, run_phase2
from .service import Orchestrator, serve as serve_app, turn_to_json
from .sql_agent import SqlIngestionError, ingest_csv


def _load_config(config_path: Optional[str], mock_script: Optional[str]) -> SystemConfig:
    try:
        cfg = SystemConfig.load(config_path)
    except (OSError, TypeError, ValueError) as exc:
        raise click.ClickException(f"bad config: {exc}") from exc
    if mock_script:
        from dataclasses import replace

        cfg = replace(cfg, mock_script_path=mock_script)
    return cfg


@click.group()
def main() -> None:
    """Dairy decision-support engine."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--sql/--no-sql", default=True, help="Load the test-day CSV into SQLite.")
@click.option("--nosql/--no-nosql", default=True, help="Flatten the herd documents.")
@click.option("--corpus/--no-corpus", default=True, help="Index the abstract corpus.")
def ingest(config_path: Optional[str], sql: bool, nosql: bool, corpus: bool) -> None:
    """Load all data stores from the configured fixture files."""
    cfg = _load_config(config_path, None)
    try:
        if sql:
            n = ingest_csv(cfg.sql_csv_path, cfg.sql_db_path)
            click.echo(f"sql: {n} rows -> {cfg.sql_db_path}")
        if nosql or corpus:
            orch = Orchestrator(cfg)
            if corpus:
                summary = orch.corpus.ingest_abstracts(cfg.corpus_path)
                click.echo(
                    f"corpus: {summary.count} docs indexed "
                    f"({summary.rejected} rejected, dim {summary.dim})"
                )
            if nosql:
                doc_summary = orch.docstore.ingest_documents(cfg.nosql_path)
                click.echo(
                    f"nosql: {doc_summary.doc_count} documents, "
                    f"{doc_summary.row_count} event rows "
                    f"({doc_summary.rejected} rejected)"
                )
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.argument("question")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option(
    "--route",
    type=click.Choice(["text", "sql", "nosql", "model", "clarify"]),
    default=None,
    help="Skip the supervisor and send the question straight to one team.",
)
@click.option("--json", "as_json", is_flag=True, help="Print the full turn as JSON.")
def ask(
    question: str,
    config_path: Optional[str],
    mock_script: Optional[str],
    route: Optional[str],
    as_json: bool,
) -> None:
    """Answer one question and print the result."""
    cfg = _load_config(config_path, mock_script)
    orch = Orchestrator(cfg)
    try:
        orch.ingest_all()
    except Exception as exc:
        click.echo(f"error: ingestion failed: {exc}", err=True)
        sys.exit(1)
    label = RouteLabel.from_wire(f"{route}_subagent") if route else None
    mode = "direct" if label else "supervised"
    result = orch.handle_turn(UserQuery(text=question, session_id="cli"), mode, label)
    if as_json:
        body = turn_to_json(result.turn)
        body["total_seconds"] = result.total_seconds
        click.echo(json.dumps(body, indent=2))
    else:
        click.echo(f"[{result.answer.route.value}] {result.answer.body}")
        for c in result.answer.citations:
            click.echo(f"  - {c.render()}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(config_path: Optional[str], host: str, port: int) -> None:
    """Run the HTTP API."""
    cfg = _load_config(config_path, None)
    serve_app(cfg, host=host, port=port)


@main.command(name="eval")
@click.option("--phase", type=click.Choice(["1", "2"]), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option("--model", "model_id", default=None, help="Model id for the report row.")
@click.option("--items", "items_path", type=click.Path(exists=True), default=None)
@click.option(
    "--format", "fmt", type=click.Choice(["table-text", "json", "csv"]), default="table-text"
)
def evaluate(
    phase: str,
    config_path: Optional[str],
    mock_script: Optional[str],
    model_id: Optional[str],
    items_path: Optional[str],
    fmt: str,
) -> None:
    """Run a screening (phase 1) or full benchmark (phase 2) evaluation."""
    cfg = _load_config(config_path, mock_script)
    phase_n = int(phase)
    if items_path is None:
        fixtures = Path(cfg.corpus_path).parent
        items_path = str(fixtures / f"phase{phase_n}_items.json")
    if not Path(items_path).exists():
        click.echo(f"error: item fixture not found: {items_path}", err=True)
        sys.exit(2)
    items = load_items(items_path, phase_n)
    orch = Orchestrator(cfg)
    try:
        orch.ingest_all()
    except Exception as exc:
        click.echo(f"error: ingestion failed: {exc}", err=True)
        sys.exit(1)
    name = model_id or cfg.model_name
    if phase_n == 1:
        report = run_phase1(orch, items, name)
        ok = all(o.gate_pass for o in report.outcomes)
    else:
        report = run_phase2(orch, items, name)
        ok = all(o.error is None for o in report.outcomes)
    click.echo(render_report(report, fmt), nl=False)
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
