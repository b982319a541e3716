#!/usr/bin/env python3
"""Regenerate every committed fixture from the seeded generators.

Run from the repository root:

    python scripts/make_fixtures.py

Output is deterministic: rerunning without changing the generator specs
reproduces identical bytes, so `git status` stays clean.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from dairydesk import datagen  # noqa: E402
from dairydesk.sql_agent import ingest_csv  # noqa: E402

FIXTURES = REPO / "fixtures"


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)

    csv_bytes = datagen.generate_sql_fixture()
    (FIXTURES / "milk_data.csv").write_bytes(csv_bytes)
    sql_truth = datagen.sql_ground_truth(csv_bytes)
    rows = ingest_csv(FIXTURES / "milk_data.csv", FIXTURES / "milk_data.sqlite")
    print(f"milk_data.csv: {rows} rows, {sql_truth['above_43_count']} above 43 kg")

    doc_bytes = datagen.generate_nosql_fixture()
    (FIXTURES / "herd_documents.json").write_bytes(doc_bytes)
    nosql_truth = datagen.nosql_ground_truth(doc_bytes)
    print(
        f"herd_documents.json: {len(json.loads(doc_bytes))} cows, "
        f"{len(nosql_truth['event_types'])} event types"
    )

    (FIXTURES / "abstracts.jsonl").write_bytes(datagen.generate_corpus_fixture())
    (FIXTURES / "web_results.json").write_bytes(datagen.generate_web_fixture())
    (FIXTURES / "milkbot_params.json").write_bytes(datagen.generate_milkbot_params())

    for phase in (1, 2):
        items = datagen.build_eval_items(phase, sql_truth, nosql_truth)
        (FIXTURES / f"phase{phase}_items.json").write_text(
            json.dumps(items, indent=1) + "\n"
        )
        print(f"phase{phase}_items.json: {len(items)} items")

    mock = datagen.build_benchmark_mock(sql_truth, nosql_truth)
    (FIXTURES / "mock_benchmark.json").write_text(json.dumps(mock, indent=1) + "\n")
    print(f"mock_benchmark.json: {len(mock)} entries")

    exemplars = datagen.build_exemplar_mock(sql_truth, nosql_truth)
    (FIXTURES / "mock_exemplars.json").write_text(json.dumps(exemplars, indent=1) + "\n")
    print(f"mock_exemplars.json: {len(exemplars)} entries")

    truths = {"sql": sql_truth, "nosql": nosql_truth}
    (FIXTURES / "ground_truth.json").write_text(json.dumps(truths, indent=1) + "\n")
    print("ground_truth.json written")


if __name__ == "__main__":
    main()
