#!/usr/bin/env python3
"""Capture TurnResult wire payloads for the frontend test fixtures.

Runs the demo questions through the orchestrator with the scripted mock
backend, normalizes ids and timestamps so the JSON is stable across runs,
and writes one file per turn under frontend/tests/fixtures/.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from dairydesk.config import SystemConfig  # noqa: E402
from dairydesk.datagen import EXEMPLAR_QUESTIONS  # noqa: E402
from dairydesk.domain import UserQuery  # noqa: E402
from dairydesk.service import Orchestrator, turn_to_json  # noqa: E402

OUT = REPO / "frontend" / "tests" / "fixtures"

CAPTURE = ("fig-text", "fig-sql", "fig-model", "fig-guard")


def normalize(data: dict, slug: str) -> dict:
    """Fixed ids and a synthetic clock so reruns produce identical bytes."""
    data["turn_id"] = f"turn-{slug}"
    data["query"]["received_at"] = "2026-08-24T12:00:00+00:00"
    id_map = {s["span_id"]: f"{slug}-s{i}" for i, s in enumerate(data["spans"])}
    for i, span in enumerate(data["spans"]):
        span["span_id"] = id_map[span["span_id"]]
        span["parent_id"] = id_map.get(span["parent_id"])
        span["started_at"] = round(i * 0.25, 2)
        span["ended_at"] = round(i * 0.25 + 0.2, 2)
    if data["answer"] is not None:
        data["answer"]["elapsed"] = 0.42
        for j, att in enumerate(data["answer"]["attachments"]):
            att["attachment_id"] = f"{slug}-a{j}"
    return data


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    config = dataclasses.replace(
        SystemConfig(),
        mock_script_path=str(REPO / "fixtures" / "mock_exemplars.json"),
        trace_dir=str(REPO / "traces"),
    )
    orchestrator = Orchestrator(config)
    orchestrator.ingest_all()
    for slug in CAPTURE:
        question = EXEMPLAR_QUESTIONS[slug]
        result = orchestrator.handle_turn(UserQuery(text=question, session_id="demo"))
        payload = normalize(turn_to_json(result.turn), slug)
        path = OUT / f"turn-{slug}.json"
        path.write_text(json.dumps(payload, indent=1) + "\n")
        print(f"{path.name}: route={payload['route']}, spans={len(payload['spans'])}")


if __name__ == "__main__":
    main()
