"""The text subagent: literature RAG with graded fallback to web search.

Retrieval runs over an in-memory corpus of journal abstracts (one chunk per
abstract) with cosine-ranked top-k search. Answers are graded for adequacy;
an inadequate literature answer falls back to a pluggable web-search
provider, and a second inadequate grade degrades to "I don't know.".
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol

import numpy as np

from .config import SystemConfig
from .domain import AgentAnswer, Citation, RouteLabel, SpanRecorder, UserQuery
from .gateway import ChatGateway, ChatRequest, GatewayError

UNKNOWN_ANSWER = "I don't know."
MAX_WEB_RESULTS = 10


class KnowledgeError(Exception):
    pass


class IngestionError(KnowledgeError):
    pass


class RetrievalError(KnowledgeError):
    pass


class WebSearchError(KnowledgeError):
    pass


@dataclass(frozen=True)
class AbstractDoc:
    doc_id: str
    title: str
    abstract_text: str
    year: int
    doi: str
    authors: tuple[str, ...] = ()
    source_tag: str = "JDS"

    def __post_init__(self) -> None:
        if not self.abstract_text:
            raise ValueError("abstract_text must be non-empty")


@dataclass(frozen=True)
class RetrievalHit:
    doc_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class WebResult:
    title: str
    url: str
    snippet: str

    def __post_init__(self) -> None:
        if not self.url:
            raise ValueError("url must be non-empty")


@dataclass(frozen=True)
class Grade:
    verdict: str  # "adequate" | "inadequate"
    raw_model_output: str

    @classmethod
    def from_model_output(cls, clean_text: str) -> "Grade":
        # Unparseable verdicts resolve to inadequate.
        verdict = "adequate" if clean_text.strip().lower().startswith("yes") else "inadequate"
        return cls(verdict=verdict, raw_model_output=clean_text)

    @property
    def adequate(self) -> bool:
        return self.verdict == "adequate"


class Embedder(Protocol):
    dim: int

    def embed(self, text: str) -> np.ndarray: ...


_TOKEN_RE = re.compile(r"[a-z0-9]+")


class HashingEmbedder:
    """Deterministic feature-hashing embedder: token hashing into signed
    buckets, L2-normalized. Fully offline; no model weights."""

    def __init__(self, dim: int = 256):
        self.dim = dim

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in _TOKEN_RE.findall(text.lower()):
            digest = hashlib.md5(token.encode()).digest()
            bucket = int.from_bytes(digest[:4], "little") % self.dim
            sign = 1.0 if digest[4] % 2 == 0 else -1.0
            vec[bucket] += sign
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec


class RemoteEmbedder:
    """Embedding endpoint of the same server family as the chat gateway."""

    def __init__(self, endpoint: str, model_name: str, dim: int, timeout: float = 120.0):
        import httpx

        self.endpoint = endpoint.rstrip("/")
        self.model_name = model_name
        self.dim = dim
        self._client = httpx.Client(timeout=timeout)

    def embed(self, text: str) -> np.ndarray:
        resp = self._client.post(
            self.endpoint + "/v1/embeddings",
            json={"model": self.model_name, "input": text},
        )
        resp.raise_for_status()
        return np.asarray(resp.json()["data"][0]["embedding"], dtype=np.float64)


@dataclass
class CorpusSummary:
    count: int
    rejected: int
    dim: int


class CorpusIndex:
    """Immutable after ingestion; concurrent reads are safe."""

    def __init__(self, embedder: Optional[Embedder] = None):
        self.embedder = embedder or HashingEmbedder()
        self.docs: dict[str, AbstractDoc] = {}
        self._order: list[str] = []
        self._matrix: Optional[np.ndarray] = None

    def ingest_abstracts(self, path: str | Path) -> CorpusSummary:
        """Load a JSON-lines corpus; malformed records are skipped with a
        warning and counted in the summary."""
        path = Path(path)
        if not path.exists():
            raise IngestionError(f"corpus file not found: {path}")
        rejected = 0
        docs: list[AbstractDoc] = []
        for lineno, line in enumerate(path.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                docs.append(
                    AbstractDoc(
                        doc_id=str(rec["id"]),
                        title=rec["title"],
                        abstract_text=rec["abstract"],
                        year=int(rec["year"]),
                        doi=rec["doi"],
                        authors=tuple(rec.get("authors", [])),
                        source_tag=rec.get("source", "JDS"),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                rejected += 1
                print(f"warning: skipping corpus line {lineno}: {exc}")
        if not docs:
            raise IngestionError(f"no valid records in corpus file {path}")
        self.docs = {d.doc_id: d for d in docs}
        self._order = sorted(self.docs)  # doc_id ascending for tie-breaks
        self._matrix = np.stack(
            [self.embedder.embed(self._doc_text(self.docs[i])) for i in self._order]
        )
        return CorpusSummary(count=len(docs), rejected=rejected, dim=self.embedder.dim)

    @staticmethod
    def _doc_text(doc: AbstractDoc) -> str:
        return f"{doc.title}\n{doc.abstract_text}"

    def __len__(self) -> int:
        return len(self.docs)

    def retrieve_topk(self, query: str, k: int) -> list[RetrievalHit]:
        """min(k, corpus size) hits, cosine-ranked, ties broken by doc_id
        ascending."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if self._matrix is None or not self.docs:
            raise RetrievalError("corpus not ingested")
        qvec = self.embedder.embed(query)
        scores = self._matrix @ qvec
        # Stable sort over the doc_id-ascending order gives the tie-break.
        ranked = sorted(range(len(self._order)), key=lambda i: -scores[i])
        hits = []
        for rank, idx in enumerate(ranked[: min(k, len(ranked))], start=1):
            hits.append(
                RetrievalHit(doc_id=self._order[idx], score=float(scores[idx]), rank=rank)
            )
        return hits


class FixtureWebProvider:
    """Offline provider: substring match against a canned-results file."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        if not self.path.exists():
            raise WebSearchError(f"web fixture file not found: {path}")
        self._entries = json.loads(self.path.read_text())

    def search(self, query: str) -> list[WebResult]:
        results: list[WebResult] = []
        lowered = query.lower()
        for entry in self._entries:
            if entry["match"].lower() in lowered:
                for r in entry["results"]:
                    results.append(WebResult(r["title"], r["url"], r["snippet"]))
        return results[:MAX_WEB_RESULTS]


class HttpWebProvider:
    """Generic JSON web-search endpoint configured by URL template; no
    commercial API is hardwired."""

    def __init__(self, url_template: str, timeout: float = 30.0):
        import httpx

        self.url_template = url_template
        self._client = httpx.Client(timeout=timeout)

    def search(self, query: str) -> list[WebResult]:
        import httpx
        from urllib.parse import quote

        try:
            resp = self._client.get(self.url_template.format(query=quote(query)))
            resp.raise_for_status()
            payload = resp.json()
        except httpx.HTTPError as exc:
            raise WebSearchError(f"web provider unreachable: {exc}") from exc
        return [
            WebResult(r.get("title", ""), r["url"], r.get("snippet", ""))
            for r in payload.get("results", [])
        ][:MAX_WEB_RESULTS]


class TextTeam:
    """Literature path first; graded fallback to web; then "I don't know."."""

    def __init__(
        self,
        gateway: ChatGateway,
        config: SystemConfig,
        corpus: CorpusIndex,
        web_provider,
    ):
        self.gateway = gateway
        self.config = config
        self.corpus = corpus
        self.web_provider = web_provider

    def _chat(self, user: str, system: Optional[str] = None) -> str:
        messages: list[tuple[str, str]] = []
        if system:
            messages.append(("system", system))
        messages.append(("user", user))
        resp = self.gateway.complete(
            ChatRequest(
                messages=tuple(messages),
                model_name=self.config.model_name,
                temperature=self.config.temperature,
                max_tokens=self.config.max_tokens,
            )
        )
        return resp.clean_text

    def answer_from_docs(
        self, query: UserQuery, hits: list[RetrievalHit], recorder: SpanRecorder, parent_id: str
    ) -> tuple[AgentAnswer, Grade]:
        if not hits:
            raise RetrievalError("answer_from_docs requires at least one hit")
        context = "\n\n".join(
            f"[{h.rank}] {self.corpus.docs[h.doc_id].title}\n"
            f"{self.corpus.docs[h.doc_id].abstract_text}"
            for h in hits
        )
        body = self._chat(
            self.config.prompt("text_answer_user", question=query.text, context=context),
            system=self.config.prompt("text_answer_system"),
        )
        citations = tuple(
            Citation(
                title=self.corpus.docs[h.doc_id].title,
                year=self.corpus.docs[h.doc_id].year,
                doi_or_url=self.corpus.docs[h.doc_id].doi,
            )
            for h in hits[: self.config.retrieval_top_k]
        )
        answer = AgentAnswer(body=body, route=RouteLabel.TEXT, citations=citations)
        grade_span = recorder.open("grade_jds_answer", parent_id)
        try:
            grade = Grade.from_model_output(
                self._chat(
                    self.config.prompt("grade_jds_user", question=query.text, answer=body)
                )
            )
        except GatewayError as exc:
            grade = Grade(verdict="inadequate", raw_model_output=f"error: {exc}")
        grade_span.close(verdict=grade.verdict)
        return answer, grade

    def web_search(self, query: str) -> list[WebResult]:
        return self.web_provider.search(query)

    def run(self, query: UserQuery, recorder: SpanRecorder, parent_id: str) -> AgentAnswer:
        retrieve_span = recorder.open("jds_retrieve", parent_id)
        try:
            hits = self.corpus.retrieve_topk(query.text, self.config.retrieval_top_k)
        except RetrievalError as exc:
            retrieve_span.close(error=str(exc))
            return AgentAnswer(body=UNKNOWN_ANSWER, route=RouteLabel.TEXT)
        retrieve_span.close(hits=[h.doc_id for h in hits])

        try:
            answer, grade = self.answer_from_docs(query, hits, recorder, parent_id)
        except GatewayError as exc:
            recorder.open("grade_jds_answer", parent_id).close(error=str(exc))
            answer, grade = None, Grade("inadequate", f"error: {exc}")
        if grade.adequate and answer is not None:
            return answer

        # Literature graded inadequate: fall back to the web path.
        web_span = recorder.open("web_search", parent_id)
        try:
            results = self.web_search(query.text)
        except WebSearchError as exc:
            web_span.close(error=str(exc))
            return AgentAnswer(body=UNKNOWN_ANSWER, route=RouteLabel.TEXT)
        web_span.close(results=[r.url for r in results])
        if not results:
            return AgentAnswer(body=UNKNOWN_ANSWER, route=RouteLabel.TEXT)

        context = "\n\n".join(f"{r.title}\n{r.url}\n{r.snippet}" for r in results)
        try:
            body = self._chat(
                self.config.prompt("web_answer_user", question=query.text, context=context)
            )
            grade_span = recorder.open("grade_web_answer", parent_id)
            web_grade = Grade.from_model_output(
                self._chat(
                    self.config.prompt("grade_web_user", question=query.text, answer=body)
                )
            )
            grade_span.close(verdict=web_grade.verdict)
        except GatewayError as exc:
            recorder.open("grade_web_answer", parent_id).close(error=str(exc))
            return AgentAnswer(body=UNKNOWN_ANSWER, route=RouteLabel.TEXT)
        if not web_grade.adequate:
            return AgentAnswer(body=UNKNOWN_ANSWER, route=RouteLabel.TEXT)
        citations = tuple(Citation(title=r.title, doi_or_url=r.url) for r in results[:5])
        return AgentAnswer(body=body, route=RouteLabel.TEXT, citations=citations)
