from __future__ import annotations

import json

import pytest

from dairydesk.config import SystemConfig
from dairydesk.datagen import EVENT_TYPES
from dairydesk.docstore import (
    EVENT_COLUMNS,
    DocIngestionError,
    Docstore,
    NoSqlTeam,
    frame_to_result_table,
)
from dairydesk.domain import SpanRecorder, UserQuery
from dairydesk.dsl import Frame
from dairydesk.gateway import ChatGateway, MockChatBackend, MockScript
from tests.conftest import FIXTURES


def _doc(animal="A1", herd="H1", parity=1, events=None):
    return {
        "animal_id": animal,
        "herd_id": herd,
        "birth_date": "2020-01-01",
        "lactations": [
            {
                "parity": parity,
                "calving_date": "2022-02-02",
                "events": events
                if events is not None
                else [{"event_type": "Calving", "test_date": "2022-02-02"}],
            }
        ],
    }


class TestDocstore:
    def test_ingest_fixture_covers_all_event_types(self, ground_truth):
        store = Docstore()
        summary = store.ingest_documents(FIXTURES / "herd_documents.json")
        assert summary.doc_count == 30
        assert summary.rejected == 0
        type_idx = EVENT_COLUMNS.index("EventType")
        types = {r[type_idx] for r in store.frame.rows}
        assert types == set(EVENT_TYPES)
        assert len(types) == 14
        assert sorted(types) == ground_truth["nosql"]["event_types"]

    def test_flatten_copies_parent_fields(self, tmp_path):
        path = tmp_path / "d.json"
        path.write_text(json.dumps([_doc()]))
        store = Docstore()
        store.ingest_documents(path)
        row = dict(zip(EVENT_COLUMNS, store.frame.rows[0]))
        assert row["AnimalId"] == "A1"
        assert row["HerdId"] == "H1"
        assert row["Parity"] == 1
        assert row["CalvingDate"] == "2022-02-02"
        assert row["BirthDate"] == "2020-01-01"
        assert row["MilkYieldKg"] is None  # absent metrics become nulls

    def test_malformed_document_skipped_with_warning(self, tmp_path, capsys):
        docs = [_doc(), {"animal_id": "X"}]  # missing lactations
        path = tmp_path / "d.json"
        path.write_text(json.dumps(docs))
        summary = Docstore().ingest_documents(path)
        assert summary.doc_count == 1
        assert summary.rejected == 1
        assert "skipping malformed document" in capsys.readouterr().out

    def test_bad_parity_rejected(self, tmp_path):
        path = tmp_path / "d.json"
        path.write_text(json.dumps([_doc(parity=0)]))
        with pytest.raises(DocIngestionError):
            Docstore().ingest_documents(path)

    def test_event_missing_required_fields_rejects_doc(self, tmp_path):
        path = tmp_path / "d.json"
        path.write_text(json.dumps([_doc(events=[{"event_type": "Calving"}])]))
        with pytest.raises(DocIngestionError):
            Docstore().ingest_documents(path)

    def test_jsonl_input_accepted(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text(json.dumps(_doc()) + "\n" + json.dumps(_doc(animal="A2")) + "\n")
        assert Docstore().ingest_documents(path).doc_count == 2

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "d.json"
        path.write_text("")
        with pytest.raises(DocIngestionError):
            Docstore().ingest_documents(path)


class TestFrameToResultTable:
    def test_caps_and_marks_truncation(self):
        frame = Frame(("x",), tuple((i,) for i in range(30)))
        table = frame_to_result_table(frame, 20)
        assert len(table.rows) == 20
        assert table.total_row_count == 30
        assert table.truncated


def _nosql_team(responses):
    store = Docstore()
    store.ingest_documents(FIXTURES / "herd_documents.json")
    gateway = ChatGateway(MockChatBackend(MockScript.sequence(responses)))
    return NoSqlTeam(gateway, SystemConfig(mock_script_path="unused"), store)


class TestNoSqlTeam:
    def test_distinct_event_types_returns_14(self, ground_truth):
        team = _nosql_team(['result = df.select("EventType").distinct()', "phrased"])
        recorder = SpanRecorder()
        answer = team.run(UserQuery(text="events?", session_id="s"), recorder, None)
        assert answer.body == "phrased"
        table = answer.attachments[0].payload
        assert table["total_row_count"] == 14
        assert sorted(r[0] for r in table["rows"]) == ground_truth["nosql"]["event_types"]
        assert [s.name for s in recorder.spans] == [
            "generate_pyspark_code",
            "execute_pyspark_code",
        ]

    def test_repair_retry_recovers(self):
        team = _nosql_team(
            [
                'result = df.select("EventTyp").distinct()',  # unknown column
                'result = df.select("EventType").distinct()',
                "phrased",
            ]
        )
        recorder = SpanRecorder()
        answer = team.run(UserQuery(text="events?", session_id="s"), recorder, None)
        assert answer.body == "phrased"
        gen_spans = [s for s in recorder.spans if s.name == "generate_pyspark_code"]
        assert len(gen_spans) == 2

    def test_double_parse_failure_reports_program(self):
        team = _nosql_team(["result = df.bogus()", "result = df.bogus()"])
        recorder = SpanRecorder()
        answer = team.run(UserQuery(text="events?", session_id="s"), recorder, None)
        assert "could not build a valid query" in answer.body
        assert "df.bogus()" in answer.body
        parse_spans = [s for s in recorder.spans if s.name == "parse_code"]
        assert parse_spans and "error" in parse_spans[0].payload

    def test_execution_error_contained(self):
        team = _nosql_team(['result = df.avg("EventType")', "unused"])
        recorder = SpanRecorder()
        answer = team.run(UserQuery(text="avg?", session_id="s"), recorder, None)
        assert "execute_pyspark_code failed" in answer.body

    def test_phrasing_failure_falls_back_to_raw_table(self):
        team = _nosql_team(["result = df.count()"])
        answer = team.run(UserQuery(text="how many?", session_id="s"), SpanRecorder(), None)
        assert "count" in answer.body
