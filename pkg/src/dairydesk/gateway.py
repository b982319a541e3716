"""Shared language-model access point.

Speaks the common local chat-completion wire protocol (POST to a
chat-completions path, JSON body with model/messages/temperature/max_tokens,
answer read from the first choice) and hides reasoning-token stripping and
fenced-code extraction from the agents. A deterministic scripted mock
backend stands in for a live server in tests.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import httpx

DEFAULT_REASONING_DELIMITERS = ("<think>", "</think>")
DEFAULT_TIMEOUT = 120.0

#: Statement keywords that let bare (unfenced) model output pass code
#: extraction, per language tag.
_BARE_KEYWORDS = {
    "sql": ("select", "with"),
    "dsl": ("result",),
    "json": ("{", "["),
}


class GatewayError(Exception):
    """Base class for model-gateway failures."""


class TransportError(GatewayError):
    """The model endpoint could not be reached or timed out."""

    def __init__(self, endpoint: str, detail: str):
        self.endpoint = endpoint
        super().__init__(f"model endpoint {endpoint} unreachable: {detail}")


class ScriptingError(GatewayError):
    """The mock backend had no (or more than one) response for a prompt."""


class ExtractionError(GatewayError):
    """No code block could be extracted; carries the full clean text."""

    def __init__(self, clean_text: str, language_tag: str):
        self.clean_text = clean_text
        self.language_tag = language_tag
        super().__init__(f"no {language_tag} code block in model output")


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[tuple[str, str], ...]  # (role, content)
    model_name: str = "local"
    temperature: float = 0.0
    max_tokens: int = 1024

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.messages[0][0] not in ("system", "user"):
            raise ValueError("first message must be system or user")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")

    @property
    def last_user_content(self) -> str:
        for role, content in reversed(self.messages):
            if role == "user":
                return content
        return ""


@dataclass(frozen=True)
class ChatResponse:
    raw_text: str
    clean_text: str
    latency: float


def strip_reasoning(
    raw: str, delimiters: tuple[str, str] = DEFAULT_REASONING_DELIMITERS
) -> str:
    """Remove every well-formed reasoning block (non-greedy, multiple
    allowed); an unclosed opening delimiter swallows the rest of the
    string. Idempotent; trims surrounding whitespace."""
    open_d, close_d = delimiters
    pattern = re.escape(open_d) + r".*?" + re.escape(close_d)
    text = re.sub(pattern, "", raw, flags=re.DOTALL)
    head, sep, _ = text.partition(open_d)
    if sep:
        text = head
    return text.strip()


_FENCE_RE = re.compile(r"```([A-Za-z0-9_+-]*)[ \t]*\n(.*?)```", re.DOTALL)


def extract_code_block(clean: str, language_tag: str) -> str:
    """First fenced block tagged `language_tag`, else the first untagged
    fenced block, else the bare text when it opens with a statement
    keyword for that tag."""
    untagged: Optional[str] = None
    for match in _FENCE_RE.finditer(clean):
        tag, body = match.group(1).lower(), match.group(2).strip()
        if tag == language_tag.lower():
            return body
        if not tag and untagged is None:
            untagged = body
    if untagged is not None:
        return untagged
    stripped = clean.strip()
    for keyword in _BARE_KEYWORDS.get(language_tag.lower(), ()):
        if stripped.lower().startswith(keyword):
            return stripped
    raise ExtractionError(clean, language_tag)


class HttpChatBackend:
    """Client for a local chat-completion server."""

    def __init__(
        self,
        endpoint: str,
        timeout: float = DEFAULT_TIMEOUT,
        path: str = "/v1/chat/completions",
    ):
        self.endpoint = endpoint.rstrip("/")
        self.path = path
        self._client = httpx.Client(timeout=timeout)

    def complete_raw(self, req: ChatRequest) -> str:
        body = {
            "model": req.model_name,
            "messages": [{"role": r, "content": c} for r, c in req.messages],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        try:
            resp = self._client.post(self.endpoint + self.path, json=body)
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise TransportError(self.endpoint, str(exc)) from exc
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise TransportError(self.endpoint, f"malformed response: {exc}") from exc


@dataclass
class MockScript:
    """Canned responses for the deterministic mock backend.

    `sequence` mode consumes entries strictly in order. `substring` mode
    matches each entry's `match` (a string, or a list whose parts must all
    be present) against the last user message; exactly one entry must
    match.
    """

    entries: list[dict] = field(default_factory=list)
    mode: str = "substring"  # "sequence" | "substring"

    @classmethod
    def from_file(cls, path: str | Path) -> "MockScript":
        data = json.loads(Path(path).read_text())
        if isinstance(data, dict):
            return cls(entries=list(data["entries"]), mode=data.get("mode", "substring"))
        return cls(entries=list(data))

    @classmethod
    def sequence(cls, responses: Sequence[str]) -> "MockScript":
        return cls(entries=[{"response": r} for r in responses], mode="sequence")


class MockChatBackend:
    """Deterministic scripted backend; single-threaded by contract."""

    def __init__(self, script: MockScript):
        self.script = script
        self._cursor = 0

    def complete_raw(self, req: ChatRequest) -> str:
        if self.script.mode == "sequence":
            if self._cursor >= len(self.script.entries):
                raise ScriptingError(
                    f"mock script exhausted after {self._cursor} calls; "
                    f"unmatched prompt: {req.last_user_content[:200]!r}"
                )
            entry = self.script.entries[self._cursor]
            self._cursor += 1
            return entry["response"]

        prompt = req.last_user_content
        hits = [e for e in self.script.entries if self._matches(e["match"], prompt)]
        if len(hits) != 1:
            raise ScriptingError(
                f"{len(hits)} mock entries matched prompt: {prompt[:200]!r}"
            )
        return hits[0]["response"]

    @staticmethod
    def _matches(match: str | list[str], prompt: str) -> bool:
        parts = [match] if isinstance(match, str) else match
        return all(p in prompt for p in parts)


class ChatGateway:
    """Serializes all model calls through one backend (FIFO, pool size 1 by
    default) and applies reasoning-token stripping to every response."""

    def __init__(
        self,
        backend,
        reasoning_delimiters: tuple[str, str] = DEFAULT_REASONING_DELIMITERS,
        pool_size: int = 1,
    ):
        self.backend = backend
        self.reasoning_delimiters = reasoning_delimiters
        self._lock = threading.Semaphore(pool_size)

    def complete(self, req: ChatRequest) -> ChatResponse:
        with self._lock:
            start = time.monotonic()
            raw = self.backend.complete_raw(req)
            latency = time.monotonic() - start
        return ChatResponse(
            raw_text=raw,
            clean_text=strip_reasoning(raw, self.reasoning_delimiters),
            latency=latency,
        )


def backend_from_config(
    endpoint: Optional[str], mock_script_path: Optional[str] = None, timeout: float = DEFAULT_TIMEOUT
):
    """Pick a backend: explicit mock script wins, then the endpoint, with
    DAIRYDESK_MODEL_ENDPOINT as the environment override."""
    if mock_script_path:
        return MockChatBackend(MockScript.from_file(mock_script_path))
    endpoint = os.environ.get("DAIRYDESK_MODEL_ENDPOINT", endpoint)
    if not endpoint:
        raise GatewayError("no model endpoint configured and no mock script given")
    return HttpChatBackend(endpoint, timeout=timeout)
