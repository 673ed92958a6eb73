"""Prompt analysis, context retrieval, prompt assembly, and response clients.

The pipeline: classify intent (retrieval vs computational) with a keyword
decision table, tag places against a gazetteer, parse coordinate-shaped
substrings, retrieve and filter context from the hybrid store, assemble a
cited prompt, and obtain a response from a pluggable client. The bundled
OfflineResponder is a pure template over the assembled prompt, so the whole
path is deterministic for a fixed store, prompt, and config.
"""

from __future__ import annotations

import json
import os
import re
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from typing import Protocol

from .config import DEFAULT_CONFIG, EngineConfig
from .errors import ClientError, EmptyPrompt, EmptyStore, ParseError
from .geomodel import GeoPoint, TimeWindow
from .geotext.coords import text_to_coord
from .geotext.gazetteer import Gazetteer, semantic_tag
from .geotext.tokens import Token
from .spatial_embed import query_vector
from .vectorstore import HybridIndex, QuerySpec

INTENT_RETRIEVAL = "retrieval"
INTENT_COMPUTATIONAL = "computational"

# Hemisphere-suffixed pairs anywhere; bare pairs only with decimal points so
# prose like "k=5, n=3" is not mistaken for coordinates.
_COORD_SHAPES = re.compile(
    r"[+-]?\d+(?:\.\d+)?\s*°\s*[NSns]\s*,\s*[+-]?\d+(?:\.\d+)?\s*°\s*[EWew]"
    r"|[+-]?\d{1,3}\.\d+\s*,\s*[+-]?\d{1,3}\.\d+"
)


@dataclass(frozen=True)
class PromptAnalysis:
    intent: str
    places: tuple[Token, ...]
    place_ids: tuple[str, ...]
    coords: tuple[GeoPoint, ...]
    time_hint: TimeWindow | None
    query_tokens: tuple[Token, ...]


def analyze_prompt(text: str, g: Gazetteer) -> PromptAnalysis:
    """Tokenize a prompt, tag gazetteer places, extract coordinates, and
    classify intent from the configured trigger keywords."""
    return analyze_prompt_cfg(text, g, DEFAULT_CONFIG)


def analyze_prompt_cfg(text: str, g: Gazetteer, config: EngineConfig) -> PromptAnalysis:
    if not text or not text.strip():
        raise EmptyPrompt("prompt must be non-empty")
    tokens = tuple(semantic_tag(text, g))
    places = tuple(t for t in tokens if t.kind != "plain")
    place_ids = []
    for t in places:
        entry = g.lookup(t.text)
        if entry is not None:
            place_ids.append(entry[0])

    coords = []
    for m in _COORD_SHAPES.finditer(text):
        try:
            coords.append(text_to_coord(m.group()))
        except ParseError:
            continue

    lowered = text.casefold()
    computational = any(kw in lowered for kw in config.computational_keywords)
    return PromptAnalysis(
        intent=INTENT_COMPUTATIONAL if computational else INTENT_RETRIEVAL,
        places=places,
        place_ids=tuple(place_ids),
        coords=tuple(coords),
        time_hint=None,
        query_tokens=tokens,
    )


@dataclass(frozen=True)
class Passage:
    doc_id: str
    text: str
    source: str
    score: float


@dataclass(frozen=True)
class ContextPackage:
    passages: tuple[Passage, ...]
    citations: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "citations", tuple((p.doc_id, p.source) for p in self.passages))


def retrieve_context(
    analysis: PromptAnalysis,
    store: HybridIndex,
    k: int,
    config: EngineConfig = DEFAULT_CONFIG,
    time: float | None = None,
) -> ContextPackage:
    """Run a hybrid search anchored at the first matched place (or first
    parsed coordinate), then credibility/redundancy filtering; passages carry
    the stored text and source for citation."""
    if len(store) == 0:
        raise EmptyStore("cannot retrieve from an empty store")
    point = None
    for place_id in analysis.place_ids:
        rec = store.get(place_id)
        if rec is not None and rec.point is not None:
            point = rec.point
            break
    if point is None and analysis.coords:
        point = analysis.coords[0]

    spec = QuerySpec(
        text_vector=query_vector(list(analysis.query_tokens), config),
        point=point,
        time=time,
        k=k,
        weights=config.weights,
        min_credibility=config.min_credibility,
    )
    hits = store.hybrid_search(spec)
    hits = store.relevance_filter(hits, config.min_credibility, config.dedup_cosine)
    passages = []
    for hit in hits:
        rec = store.get(hit.doc_id)
        passages.append(Passage(doc_id=hit.doc_id, text=rec.text, source=rec.source, score=hit.combined))
    return ContextPackage(passages=tuple(passages))


DEFAULT_PROMPT_TEMPLATE = "Context:\n{context}\n\nQuestion: {prompt}"

_PASSAGE_LINE = re.compile(r"^\[(\d+)\] (.*) \[source: (.*)\]$")


def assemble_prompt(
    user_prompt: str,
    ctx: ContextPackage,
    template: str = DEFAULT_PROMPT_TEMPLATE,
    max_context_chars: int = DEFAULT_CONFIG.max_context_chars,
) -> str:
    """Render numbered passages with source markers above the user prompt.

    The context block is capped at max_context_chars by dropping whole
    passages from the bottom of the ranking; passages are never reordered or
    truncated mid-passage, and the prompt is always preserved verbatim.
    Passage text is flattened to one line so the numbered format stays
    machine-parsable.
    """
    if not user_prompt:
        raise EmptyPrompt("prompt must be non-empty")
    lines = [
        f"[{i}] {' '.join(p.text.split())} [source: {p.doc_id} | {p.source}]"
        for i, p in enumerate(ctx.passages, 1)
    ]
    while lines and len("\n".join(lines)) > max_context_chars:
        lines.pop()
    return template.format(context="\n".join(lines), prompt=user_prompt)


class LLMClient(Protocol):
    """Behavioral contract: turn an augmented prompt into a response string.
    Implementations declare whether they are deterministic."""

    deterministic: bool

    def complete(self, augmented_prompt: str) -> str: ...


class OfflineResponder:
    """Deterministic template responder: summarizes the first passage and
    lists every citation parsed from the assembled prompt."""

    deterministic = True

    def complete(self, augmented_prompt: str) -> str:
        passages = []
        for line in augmented_prompt.splitlines():
            m = _PASSAGE_LINE.match(line)
            if m:
                passages.append((m.group(2), m.group(3)))
        if not passages:
            return "No supporting context found."
        first_text = passages[0][0]
        sentence = re.split(r"(?<=[.!?])", first_text, maxsplit=1)[0].strip()
        lines = [f"Based on {len(passages)} sources: {sentence}", "Sources:"]
        lines += [f"[{i}] {marker}" for i, (_, marker) in enumerate(passages, 1)]
        return "\n".join(lines)


class HttpLLMClient:
    """POSTs {"prompt": ...} to an endpoint expecting {"response": ...}.

    Auth token comes from the GCE_LLM_TOKEN environment variable. Transport
    and payload failures are wrapped in ClientError.
    """

    deterministic = False

    def __init__(self, endpoint: str, timeout_s: float = 30.0):
        if not endpoint:
            raise ClientError("LLM endpoint is not configured")
        self.endpoint = endpoint
        self.timeout_s = timeout_s

    def complete(self, augmented_prompt: str) -> str:
        payload = json.dumps({"prompt": augmented_prompt}).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        token = os.environ.get("GCE_LLM_TOKEN")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        request = urllib.request.Request(self.endpoint, data=payload, headers=headers)
        try:
            with urllib.request.urlopen(request, timeout=self.timeout_s) as resp:
                body = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise ClientError(f"LLM request failed: {exc}") from exc
        if not isinstance(body, dict) or "response" not in body:
            raise ClientError("LLM reply missing 'response' field")
        return str(body["response"])


def respond(augmented: str, client: LLMClient) -> str:
    """Obtain a response, wrapping any client failure in ClientError."""
    try:
        return client.complete(augmented)
    except ClientError:
        raise
    except Exception as exc:
        raise ClientError(f"LLM client error: {exc}") from exc


def answer_prompt(
    store: HybridIndex,
    gazetteer: Gazetteer,
    prompt: str,
    k: int,
    config: EngineConfig = DEFAULT_CONFIG,
    time: float | None = None,
    client: LLMClient | None = None,
) -> dict:
    """Full retrieval pipeline; returns {"response", "citations"}.

    The same payload backs both the CLI query command and the HTTP service,
    so their outputs are identical for identical inputs.
    """
    analysis = analyze_prompt_cfg(prompt, gazetteer, config)
    ctx = retrieve_context(analysis, store, k, config, time=time)
    augmented = assemble_prompt(prompt, ctx, max_context_chars=config.max_context_chars)
    response = respond(augmented, client if client is not None else OfflineResponder())
    return {
        "response": response,
        "citations": [{"doc_id": doc_id, "source": source} for doc_id, source in ctx.citations],
    }


def payload_json(payload: dict) -> str:
    """Canonical JSON used by both the CLI --json output and the service."""
    return json.dumps(payload, sort_keys=True, ensure_ascii=False)
