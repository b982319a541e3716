from __future__ import annotations

import json
import math
import random

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from dairydesk.config import SystemConfig
from dairydesk.domain import SpanRecorder, UserQuery
from dairydesk.gateway import ChatGateway, MockChatBackend, MockScript
from dairydesk.milkbot import (
    DEFAULT_DIM_RANGE,
    CurveSeries,
    LactationParams,
    MissingParamsError,
    ModelTeam,
    ParamTable,
    curve,
    expected_production,
    parse_extraction,
    peak_dim,
    predict_yield,
    render_svg,
)
from tests.conftest import FIXTURES


def _random_params(rng) -> LactationParams:
    return LactationParams(
        scale=rng.uniform(15, 60),
        ramp=rng.uniform(5, 40),
        offset=rng.uniform(-10, 10),
        decay=rng.uniform(0.0005, 0.01),
    )


def _oracle_yield(p: LactationParams, t: float) -> float:
    """Arbitrary-precision evaluation of the same closed form."""
    with mpmath.workdps(60):
        a, b, c, d = (mpmath.mpf(repr(v)) for v in (p.scale, p.ramp, p.offset, p.decay))
        value = a * (1 - mpmath.e ** ((c - t) / b) / 2) * mpmath.e ** (-d * t)
        return float(max(mpmath.mpf(0), value))


class TestPredictYield:
    def test_against_arbitrary_precision_oracle(self):
        """1,000 random (params, DIM) samples within 1e-9 of the oracle."""
        rng = random.Random(11)
        for _ in range(1000):
            p = _random_params(rng)
            t = rng.uniform(0, 400)
            assert predict_yield(p, t) == pytest.approx(_oracle_yield(p, t), abs=1e-9)

    def test_scale_linearity(self):
        """Doubling the scale parameter doubles every unclamped daily yield:
        100 parameter sets x 305 DIM values at 1e-12 relative tolerance."""
        rng = random.Random(12)
        checked = 0
        for _ in range(100):
            p = _random_params(rng)
            doubled = LactationParams(
                scale=2 * p.scale, ramp=p.ramp, offset=p.offset, decay=p.decay
            )
            for t in range(1, 306):
                base = predict_yield(p, t)
                if base > 0:
                    assert predict_yield(doubled, t) == pytest.approx(
                        2 * base, rel=1e-12
                    )
                    checked += 1
        assert checked > 100 * 250

    def test_post_peak_monotone_decay(self):
        """Beyond the analytic peak, daily yields strictly decrease."""
        rng = random.Random(13)
        for _ in range(100):
            p = _random_params(rng)
            start = math.ceil(peak_dim(p)) + 1
            values = [predict_yield(p, t) for t in range(start, start + 100)]
            assert all(a > b for a, b in zip(values, values[1:]) if a > 0)

    def test_clamped_at_zero(self):
        p = LactationParams(scale=30, ramp=20, offset=15, decay=0.002)
        # At t=0 the ramp term is 1 - e^(c/b)/2 < 0 for c > b ln 2.
        assert predict_yield(p, 0) == 0.0

    def test_negative_dim_rejected(self):
        p = LactationParams(scale=30, ramp=20, offset=0, decay=0.002)
        with pytest.raises(ValueError):
            predict_yield(p, -1)

    def test_peak_dim_bounds_numeric_argmax(self):
        """peak_dim is a conservative decay threshold: the numeric argmax
        never lies beyond it, so yields past peak_dim always decrease."""
        rng = random.Random(14)
        for _ in range(20):
            p = _random_params(rng)
            t_star = peak_dim(p)
            grid = [t / 10 for t in range(0, 4001)]
            argmax = max(grid, key=lambda t: predict_yield(p, t))
            assert argmax <= t_star + 0.1


class TestExpectedProduction:
    def test_single_day_identity(self):
        """A one-day range must equal that day's predicted yield for every
        DIM 1..305."""
        p = LactationParams(scale=40, ramp=22, offset=-1, decay=0.002, label="L")
        table = ParamTable({"US:1": p})
        for t in range(1, 306):
            extraction = parse_extraction(
                {"region": ["US"], "parity": [1], "dim_range": [t]}
            )
            totals = expected_production(extraction, table)
            assert totals["L"] == pytest.approx(predict_yield(p, t), abs=0)

    def test_range_is_inclusive_daily_sum(self):
        p = LactationParams(scale=40, ramp=22, offset=-1, decay=0.002, label="L")
        table = ParamTable({"US:1": p})
        extraction = parse_extraction(
            {"region": ["US"], "parity": [1], "dim_range": [50, 55]}
        )
        expected = sum(predict_yield(p, t) for t in range(50, 56))
        assert expected_production(extraction, table)["L"] == pytest.approx(expected)


class TestParseExtraction:
    def test_defaults(self):
        e = parse_extraction({})
        assert e.region == ("US",)
        assert e.parity == (1,)
        assert e.dim_range == DEFAULT_DIM_RANGE

    def test_pair_expansion(self):
        e = parse_extraction({"dim_range": [50, 200]})
        assert e.dim_range == tuple(range(50, 201))

    def test_adjacent_pair_is_identity(self):
        assert parse_extraction({"dim_range": [5, 6]}).dim_range == (5, 6)

    def test_explicit_list_kept(self):
        e = parse_extraction({"dim_range": [50, 90, 120, 250]})
        assert e.dim_range == (50, 90, 120, 250)

    def test_region_uppercased_and_parity_coerced(self):
        e = parse_extraction({"region": ["US", "eu"], "parity": ["3"]})
        assert e.region == ("US", "EU")
        assert e.parity == (3,)

    def test_decreasing_range_rejected(self):
        with pytest.raises(ValueError):
            parse_extraction({"dim_range": [10, 5]})

    def test_zero_dim_rejected(self):
        with pytest.raises(ValueError):
            parse_extraction({"dim_range": [0, 10]})


class TestParamTable:
    def test_loads_fixture_and_labels(self):
        table = ParamTable.load(FIXTURES / "milkbot_params.json")
        p = table.get("US", 3)
        assert p.label == "US parity 3"
        assert p.scale > 0

    def test_missing_pair_raises(self):
        table = ParamTable.load(FIXTURES / "milkbot_params.json")
        with pytest.raises(MissingParamsError):
            table.get("MARS", 1)


class TestRenderSvg:
    def _series(self, n=2):
        return [
            CurveSeries(
                label=f"S{i}", points=tuple((t, 30.0 - i - t * 0.01) for t in range(1, 51))
            )
            for i in range(n)
        ]

    def test_one_polyline_per_series_with_legend(self):
        svg = render_svg(self._series(2))
        assert svg.count("<polyline") == 2
        assert svg.count('class="legend"') == 2
        assert "S0" in svg and "S1" in svg
        assert svg.startswith("<svg") and svg.endswith("</svg>")

    def test_axes_labels_present(self):
        svg = render_svg(self._series(1))
        assert "DIM (days)" in svg
        assert "Milk yield (kg/day)" in svg

    def test_empty_series_rejected(self):
        with pytest.raises(ValueError):
            render_svg([])


class TestModelTeam:
    def _team(self, responses):
        table = ParamTable.load(FIXTURES / "milkbot_params.json")
        gateway = ChatGateway(MockChatBackend(MockScript.sequence(responses)))
        return ModelTeam(gateway, SystemConfig(mock_script_path="unused"), table)

    def test_happy_path_two_series(self):
        team = self._team(['{"region": ["US", "EU"], "parity": [3], "dim_range": [50, 120]}'])
        recorder = SpanRecorder()
        answer = team.run(UserQuery(text="compare", session_id="s"), recorder, None)
        assert answer.body.startswith("Milk yield plot generated")
        kinds = [a.kind for a in answer.attachments]
        assert kinds == ["series", "svg"]
        assert answer.attachments[1].payload.count("<polyline") == 2
        names = [s.name for s in recorder.spans]
        assert names == ["extract_key_parameters", "generate_visuals"]

    def test_repair_retry_on_bad_json(self):
        team = self._team(
            ["not json at all {{", '{"region": ["US"], "parity": [1], "dim_range": [1, 10]}']
        )
        answer = team.run(UserQuery(text="curve", session_id="s"), SpanRecorder(), None)
        assert answer.body.startswith("Milk yield plot generated")

    def test_two_bad_extractions_degrade(self):
        team = self._team(["nope", "still nope"])
        recorder = SpanRecorder()
        answer = team.run(UserQuery(text="curve", session_id="s"), recorder, None)
        assert "could not extract" in answer.body
        assert any("error" in s.payload for s in recorder.spans)

    def test_missing_params_degrade(self):
        team = self._team(['{"region": ["MARS"], "parity": [1], "dim_range": [1, 10]}'])
        answer = team.run(UserQuery(text="curve", session_id="s"), SpanRecorder(), None)
        assert "no parameter set" in answer.body
