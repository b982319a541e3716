from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

import pytest

from dairydesk.config import SystemConfig
from dairydesk.service import Orchestrator

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


@pytest.fixture(scope="session")
def ground_truth() -> dict:
    return json.loads((FIXTURES / "ground_truth.json").read_text())


@pytest.fixture()
def make_config(tmp_path):
    """SystemConfig bound to the committed fixtures with a throwaway trace
    directory."""

    def factory(mock_script: str | None = None, **overrides) -> SystemConfig:
        cfg = SystemConfig(
            mock_script_path=str(FIXTURES / mock_script) if mock_script else None,
            trace_dir=str(tmp_path / "traces"),
        )
        return replace(cfg, **overrides) if overrides else cfg

    return factory


@pytest.fixture()
def make_orchestrator(make_config):
    def factory(mock_script: str = "mock_benchmark.json", **overrides) -> Orchestrator:
        orch = Orchestrator(make_config(mock_script, **overrides))
        orch.ingest_all()
        return orch

    return factory
