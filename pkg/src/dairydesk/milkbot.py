"""The model subagent: four-parameter lactation curves, expected production
over DIM ranges, and plot-ready series with an SVG line chart.

Daily yield at DIM t uses the scale/ramp/offset/decay form

    max(0, a * (1 - exp((c - t) / b) / 2) * exp(-d * t))

clamped at zero for early-lactation negativity. Shipped parameter sets are
fixtures fitted offline to synthetic lactation shapes and are explicitly
non-authoritative.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .config import SystemConfig
from .domain import AgentAnswer, Attachment, RouteLabel, SpanRecorder, UserQuery
from .gateway import ChatGateway, ChatRequest, GatewayError, extract_code_block, ExtractionError

DEFAULT_REGION = "US"
DEFAULT_PARITY = 1
DEFAULT_DIM_RANGE = tuple(range(1, 306))


class LactationError(Exception):
    pass


class MissingParamsError(LactationError):
    """No parameter set for a requested (region, parity) pair."""


@dataclass(frozen=True)
class LactationParams:
    scale: float  # kg/day
    ramp: float  # days
    offset: float  # days
    decay: float  # 1/day
    label: str = ""

    def __post_init__(self) -> None:
        if self.scale <= 0 or self.ramp <= 0 or self.decay < 0:
            raise ValueError("invalid lactation parameters")


@dataclass(frozen=True)
class ParamExtraction:
    region: tuple[str, ...]
    parity: tuple[int, ...]
    dim_range: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.dim_range:
            raise ValueError("dim_range must be non-empty")
        if any(d < 1 for d in self.dim_range):
            raise ValueError("dim values must be >= 1")
        if any(b <= a for a, b in zip(self.dim_range, self.dim_range[1:])):
            raise ValueError("dim_range must be strictly increasing")


@dataclass(frozen=True)
class CurveSeries:
    label: str
    points: tuple[tuple[int, float], ...]  # (dim, kg/day)


def predict_yield(p: LactationParams, t: float) -> float:
    """Daily milk yield in kg at DIM t, clamped at zero."""
    if t < 0:
        raise ValueError("t must be >= 0")
    value = (
        p.scale
        * (1.0 - math.exp((p.offset - t) / p.ramp) / 2.0)
        * math.exp(-p.decay * t)
    )
    return max(0.0, value)


def peak_dim(p: LactationParams) -> float:
    """Analytic DIM of peak yield; yields strictly decrease beyond it for
    decay > 0."""
    if p.decay == 0:
        return math.inf
    return p.offset + p.ramp * math.log(1.0 + 1.0 / (2.0 * p.ramp * p.decay))


class ParamTable:
    """Parameter sets keyed "REGION:parity", loaded from a JSON file."""

    def __init__(self, params: dict[str, LactationParams]):
        self.params = params

    @classmethod
    def load(cls, path: str | Path) -> "ParamTable":
        data = json.loads(Path(path).read_text())
        params = {}
        for key, p in data.items():
            region, parity = key.split(":")
            label = f"{region} parity {parity}"
            params[key] = LactationParams(
                scale=p["a"], ramp=p["b"], offset=p["c"], decay=p["d"], label=label
            )
        return cls(params)

    def get(self, region: str, parity: int) -> LactationParams:
        key = f"{region}:{parity}"
        if key not in self.params:
            raise MissingParamsError(f"no parameter set for {region} parity {parity}")
        return self.params[key]


def parse_extraction(payload: dict) -> ParamExtraction:
    """Normalize the model's extraction JSON: regions upper-cased, parities
    coerced to int, a two-value dim_range treated as an inclusive
    [start, end] pair."""
    regions = tuple(str(r).upper() for r in payload.get("region") or [DEFAULT_REGION])
    parities = tuple(int(p) for p in payload.get("parity") or [DEFAULT_PARITY])
    raw_range = payload.get("dim_range") or list(DEFAULT_DIM_RANGE)
    dims = [int(d) for d in raw_range]
    if len(dims) == 2 and dims[1] > dims[0] + 1:
        dims = list(range(dims[0], dims[1] + 1))
    return ParamExtraction(region=regions, parity=parities, dim_range=tuple(dims))


def curve(extraction: ParamExtraction, table: ParamTable) -> list[CurveSeries]:
    """One series per (region, parity) pair, evaluated at every DIM in the
    range."""
    series = []
    for region in extraction.region:
        for parity in extraction.parity:
            p = table.get(region, parity)
            points = tuple((t, predict_yield(p, t)) for t in extraction.dim_range)
            series.append(CurveSeries(label=p.label, points=points))
    return series


def expected_production(extraction: ParamExtraction, table: ParamTable) -> dict[str, float]:
    """Total kg per series: discrete daily sum over the DIM range,
    inclusive."""
    return {s.label: sum(y for _, y in s.points) for s in curve(extraction, table)}


_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def render_svg(series: list[CurveSeries], width: int = 640, height: int = 400) -> str:
    """Self-contained SVG line chart: DIM vs kg/day, one polyline per
    series, legend with labels."""
    if not series:
        raise ValueError("at least one series is required")
    margin = 50
    xs = [t for s in series for t, _ in s.points]
    ys = [y for s in series for _, y in s.points]
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = 0.0, max(ys) or 1.0
    x_span = (x_max - x_min) or 1
    y_span = (y_max - y_min) or 1

    def sx(t: float) -> float:
        return margin + (t - x_min) / x_span * (width - 2 * margin)

    def sy(y: float) -> float:
        return height - margin - (y - y_min) / y_span * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 10}" text-anchor="middle" '
        f'font-size="12">DIM (days)</text>',
        f'<text x="14" y="{height // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {height // 2})">Milk yield (kg/day)</text>',
    ]
    for i, s in enumerate(series):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        points = " ".join(f"{sx(t):.1f},{sy(y):.1f}" for t, y in s.points)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{points}"/>'
        )
        ly = margin + 16 * i
        parts.append(
            f'<rect x="{width - margin - 150}" y="{ly - 9}" width="10" height="10" '
            f'fill="{color}"/>'
            f'<text x="{width - margin - 135}" y="{ly}" font-size="12" '
            f'class="legend">{s.label}</text>'
        )
    parts.append("</svg>")
    return "".join(parts)


class ModelTeam:
    def __init__(self, gateway: ChatGateway, config: SystemConfig, table: ParamTable):
        self.gateway = gateway
        self.config = config
        self.table = table

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

    def extract_parameters(self, query: UserQuery) -> ParamExtraction:
        """One gateway call plus one JSON repair retry."""
        system = self.config.prompt("extract_params_system")
        clean = self._chat(
            self.config.prompt("extract_params_user", question=query.text), system=system
        )
        try:
            return parse_extraction(json.loads(self._json_payload(clean)))
        except (json.JSONDecodeError, ValueError, ExtractionError) as exc:
            clean = self._chat(
                self.config.prompt(
                    "extract_params_repair_user", error=str(exc), question=query.text
                ),
                system=system,
            )
            return parse_extraction(json.loads(self._json_payload(clean)))

    @staticmethod
    def _json_payload(clean: str) -> str:
        return extract_code_block(clean, "json")

    def run(self, query: UserQuery, recorder: SpanRecorder, parent_id: str) -> AgentAnswer:
        extract_span = recorder.open("extract_key_parameters", parent_id)
        try:
            extraction = self.extract_parameters(query)
        except (json.JSONDecodeError, ValueError, ExtractionError, GatewayError) as exc:
            extract_span.close(error=str(exc))
            return AgentAnswer(
                body="Sorry, I could not extract model parameters from that question.",
                route=RouteLabel.MODEL,
            )
        extract_span.close(
            region=list(extraction.region),
            parity=list(extraction.parity),
            dims=len(extraction.dim_range),
        )

        plot_span = recorder.open("generate_visuals", parent_id)
        try:
            series = curve(extraction, self.table)
        except MissingParamsError as exc:
            plot_span.close(error=str(exc))
            return AgentAnswer(body=f"Sorry: {exc}", route=RouteLabel.MODEL)
        totals = {s.label: sum(y for _, y in s.points) for s in series}
        svg = render_svg(series)
        plot_span.close(series=[s.label for s in series])

        summary = "; ".join(
            f"{label}: {total:.1f} kg total over DIM "
            f"{extraction.dim_range[0]}–{extraction.dim_range[-1]}"
            for label, total in totals.items()
        )
        series_json = [
            {"label": s.label, "points": [[t, y] for t, y in s.points]} for s in series
        ]
        return AgentAnswer(
            body=f"Milk yield plot generated. Expected production – {summary}.",
            route=RouteLabel.MODEL,
            attachments=(
                Attachment.new("series", "application/json", series_json),
                Attachment.new("svg", "image/svg+xml", svg),
            ),
        )
