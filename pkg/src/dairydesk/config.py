"""System configuration: model endpoint, sampling, fixture paths, prompts.

Loaded from a YAML file with environment-variable overrides for the model
endpoint, so the same tree deploys unchanged across farm machines.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import yaml

from . import prompts

PACKAGE_ROOT = Path(__file__).resolve().parent
REPO_FIXTURES = PACKAGE_ROOT.parents[1] / "fixtures"

ENDPOINT_ENV_VAR = "DAIRYDESK_MODEL_ENDPOINT"


def default_prompt_templates() -> dict[str, str]:
    return {
        "supervisor_system": prompts.SUPERVISOR_SYSTEM,
        "supervisor_user": prompts.SUPERVISOR_USER,
        "text_answer_system": prompts.TEXT_ANSWER_SYSTEM,
        "text_answer_user": prompts.TEXT_ANSWER_USER,
        "grade_jds_user": prompts.GRADE_JDS_USER,
        "web_answer_user": prompts.WEB_ANSWER_USER,
        "grade_web_user": prompts.GRADE_WEB_USER,
        "sql_generate_system": prompts.SQL_GENERATE_SYSTEM,
        "sql_generate_user": prompts.SQL_GENERATE_USER,
        "phrase_result_user": prompts.PHRASE_RESULT_USER,
        "dsl_generate_system": prompts.DSL_GENERATE_SYSTEM,
        "dsl_generate_user": prompts.DSL_GENERATE_USER,
        "dsl_repair_user": prompts.DSL_REPAIR_USER,
        "extract_params_system": prompts.EXTRACT_PARAMS_SYSTEM,
        "extract_params_user": prompts.EXTRACT_PARAMS_USER,
        "extract_params_repair_user": prompts.EXTRACT_PARAMS_REPAIR_USER,
    }


@dataclass(frozen=True)
class SystemConfig:
    model_endpoint: Optional[str] = None
    model_name: str = "local"
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout: float = 120.0
    mock_script_path: Optional[str] = None

    corpus_path: str = str(REPO_FIXTURES / "abstracts.jsonl")
    sql_csv_path: str = str(REPO_FIXTURES / "milk_data.csv")
    sql_db_path: str = str(REPO_FIXTURES / "milk_data.sqlite")
    nosql_path: str = str(REPO_FIXTURES / "herd_documents.json")
    web_fixture_path: str = str(REPO_FIXTURES / "web_results.json")
    milkbot_params_path: str = str(REPO_FIXTURES / "milkbot_params.json")
    trace_dir: str = "traces"

    web_provider: str = "fixture"  # "fixture" | "http"
    web_url_template: Optional[str] = None
    row_display_cap: int = 20
    retrieval_top_k: int = 5
    prompt_templates: dict[str, str] = field(default_factory=default_prompt_templates)

    def __post_init__(self) -> None:
        if self.row_display_cap < 1:
            raise ValueError("row_display_cap must be >= 1")
        missing = set(default_prompt_templates()) - set(self.prompt_templates)
        if missing:
            raise ValueError(f"missing prompt templates: {sorted(missing)}")

    def prompt(self, name: str, **kwargs: str) -> str:
        return self.prompt_templates[name].format(**kwargs)

    @classmethod
    def load(cls, path: Optional[str | Path] = None) -> "SystemConfig":
        data: dict = {}
        if path is not None:
            data = yaml.safe_load(Path(path).read_text()) or {}
        templates = default_prompt_templates()
        templates.update(data.pop("prompt_templates", {}))
        cfg = cls(prompt_templates=templates, **data)
        env_endpoint = os.environ.get(ENDPOINT_ENV_VAR)
        if env_endpoint:
            cfg = replace(cfg, model_endpoint=env_endpoint)
        return cfg
