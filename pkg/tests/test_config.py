from __future__ import annotations

import pytest

from dairydesk.config import ENDPOINT_ENV_VAR, SystemConfig, default_prompt_templates


class TestSystemConfig:
    def test_defaults_point_at_fixtures(self):
        cfg = SystemConfig()
        assert cfg.corpus_path.endswith("abstracts.jsonl")
        assert cfg.row_display_cap == 20
        assert cfg.retrieval_top_k == 5
        assert cfg.temperature == 0.0

    def test_row_display_cap_must_be_positive(self):
        with pytest.raises(ValueError):
            SystemConfig(row_display_cap=0)

    def test_missing_prompt_template_rejected(self):
        templates = default_prompt_templates()
        templates.pop("supervisor_user")
        with pytest.raises(ValueError, match="missing prompt templates"):
            SystemConfig(prompt_templates=templates)

    def test_prompt_formatting(self):
        cfg = SystemConfig()
        text = cfg.prompt("supervisor_user", question="how many cows?")
        assert "how many cows?" in text
        assert cfg.prompt("extract_params_system")  # literal braces survive

    def test_load_yaml_with_overrides(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text(
            "model_name: tiny\n"
            "temperature: 0.2\n"
            "prompt_templates:\n"
            "  supervisor_user: 'Route: {question}'\n"
        )
        cfg = SystemConfig.load(path)
        assert cfg.model_name == "tiny"
        assert cfg.temperature == 0.2
        assert cfg.prompt("supervisor_user", question="x") == "Route: x"
        # Unspecified templates keep their defaults.
        assert cfg.prompt("sql_generate_system")

    def test_env_endpoint_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv(ENDPOINT_ENV_VAR, "http://farm-box:8080")
        cfg = SystemConfig.load(None)
        assert cfg.model_endpoint == "http://farm-box:8080"

    def test_load_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert SystemConfig.load(path).model_name == "local"
