"""Commit classification via a pluggable completion backend.

`classify` queries the backend `samples_k` times and aggregates by
self-consistency: majority vote on `bisect_mark`, confidence taken as
the mean self-reported `behaviour_confidence` of the majority samples.
Verdicts below the confidence threshold, compile-error majorities,
ties, and total backend failure all come back as Skip rather than a
guess.

Token-level probabilities are not available through chat-style
endpoints, so self-reported confidence plus agreement stands in for
them; the threshold gate is applied to that aggregate.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass

import requests

from .errors import SembisectError
from .prompting import PromptTemplate
from .schema import (
    CotResponse,
    NoDocumentFound,
    SchemaViolation,
    parse_response,
    serialize_response,
)

MARK_GOOD = "good"
MARK_BAD = "bad"
MARK_SKIP = "skip"

REASON_CONSENSUS = "consensus"
REASON_BELOW_THRESHOLD = "below-threshold"
REASON_COMPILE_ERROR = "compile-error"
REASON_TIE = "tie"
REASON_BACKEND_FAILURE = "backend-failure"

_BACKOFF_BASE_SECONDS = 0.05

API_KEY_ENV = "SEMBISECT_API_KEY"


class Timeout(SembisectError):
    pass


class TransportError(SembisectError):
    pass


class MalformedResponse(SembisectError):
    pass


class ScriptExhausted(SembisectError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    endpoint: str = ""
    model_name: str = ""
    samples_k: int = 3
    temperature: float | None = None  # resolved: 0.0 for k=1, 0.7 otherwise
    confidence_threshold: float = 0.8
    timeout: float = 60.0
    retries: int = 2
    api_key: str | None = None

    def __post_init__(self):
        if self.samples_k < 1 or self.samples_k % 2 == 0:
            raise ValueError("samples_k must be an odd positive integer")
        if not 0.0 <= self.confidence_threshold <= 1.0:
            raise ValueError("confidence_threshold must be within [0, 1]")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.retries < 0:
            raise ValueError("retries must be non-negative")

    def resolved_temperature(self) -> float:
        if self.temperature is not None:
            return self.temperature
        return 0.0 if self.samples_k == 1 else 0.7


@dataclass(frozen=True)
class Verdict:
    mark: str  # good | bad | skip
    confidence: float
    samples: tuple[CotResponse, ...]
    latency: float
    reason: str

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be within [0, 1]")
        if self.mark == MARK_SKIP and self.reason == REASON_CONSENSUS:
            raise ValueError("a skip verdict needs a skip reason")


class HttpChatBackend:
    """Minimal OpenAI-compatible chat-completions client."""

    def __init__(self, config: OracleConfig, session: requests.Session | None = None):
        self.config = config
        self._session = session or requests.Session()

    def complete(self, prompt_text: str) -> str:
        config = self.config
        payload = {
            "model": config.model_name,
            "messages": [{"role": "user", "content": prompt_text}],
            "temperature": config.resolved_temperature(),
        }
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(API_KEY_ENV, config.api_key)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            resp = self._session.post(
                config.endpoint,
                json=payload,
                headers=headers,
                timeout=config.timeout,
            )
        except requests.Timeout as exc:
            raise Timeout(str(exc)) from exc
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if resp.status_code != 200:
            raise TransportError(f"backend returned HTTP {resp.status_code}")
        try:
            body = resp.json()
            return body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedResponse(f"unexpected completion shape: {exc}") from exc


class MockBackend:
    """Replays canned outputs in order; used for offline runs and tests.

    Records every received prompt so tests can assert exact prompt bytes.
    """

    def __init__(self, script: list[str]):
        self._script = list(script)
        self._cursor = 0
        self.prompts: list[str] = []

    @classmethod
    def from_file(cls, path: str) -> "MockBackend":
        with open(path, encoding="utf-8") as fh:
            outputs = json.load(fh)
        if not isinstance(outputs, list) or not all(
            isinstance(s, str) for s in outputs
        ):
            raise ValueError("mock script file must hold a JSON list of strings")
        return cls(outputs)

    def complete(self, prompt_text: str) -> str:
        self.prompts.append(prompt_text)
        if self._cursor >= len(self._script):
            raise ScriptExhausted(
                f"mock script exhausted after {len(self._script)} outputs"
            )
        out = self._script[self._cursor]
        self._cursor += 1
        return out


def mock_backend(script: list[str]) -> MockBackend:
    return MockBackend(script)


def query_once(config: OracleConfig, prompt: PromptTemplate, backend=None) -> CotResponse:
    """One completion request, parsed into a response document.

    Transport and parse failures are retried up to config.retries times
    with exponential backoff; each retry re-requests the backend.
    """
    backend = backend or HttpChatBackend(config)
    last_error: Exception | None = None
    for attempt in range(config.retries + 1):
        if attempt:
            time.sleep(_BACKOFF_BASE_SECONDS * (2 ** (attempt - 1)))
        try:
            raw = backend.complete(prompt.text)
        except (Timeout, TransportError) as exc:
            last_error = exc
            continue
        try:
            return parse_response(raw)
        except (NoDocumentFound, SchemaViolation) as exc:
            last_error = exc
            continue
    if isinstance(last_error, (Timeout, TransportError)):
        raise last_error
    raise MalformedResponse(
        f"no parseable response after {config.retries + 1} attempts: {last_error}"
    )


def classify(config: OracleConfig, prompt: PromptTemplate, backend=None) -> Verdict:
    """Aggregate up to samples_k responses into a single verdict.

    Samples are sorted canonically before voting, so the outcome depends
    only on the multiset of responses, never their arrival order.
    """
    backend = backend or HttpChatBackend(config)
    started = time.perf_counter()
    collected: list[CotResponse] = []
    for _ in range(config.samples_k):
        try:
            collected.append(query_once(config, prompt, backend))
        except (Timeout, TransportError, MalformedResponse, ScriptExhausted):
            continue  # a failed sample is dropped, not resampled
    latency = time.perf_counter() - started
    if not collected:
        return Verdict(MARK_SKIP, 0.0, (), latency, REASON_BACKEND_FAILURE)
    samples = tuple(sorted(collected, key=serialize_response))
    compile_errors = sum(1 for s in samples if s.has_compile_error)
    if compile_errors * 2 > len(samples):
        return Verdict(MARK_SKIP, 0.0, samples, latency, REASON_COMPILE_ERROR)
    good = sum(1 for s in samples if s.bisect_mark == MARK_GOOD)
    bad = len(samples) - good
    if good == bad:
        return Verdict(MARK_SKIP, 0.0, samples, latency, REASON_TIE)
    mark = MARK_GOOD if good > bad else MARK_BAD
    majority = [s for s in samples if s.bisect_mark == mark]
    confidence = sum(s.behaviour_confidence for s in majority) / len(majority) / 100.0
    if confidence < config.confidence_threshold:
        return Verdict(MARK_SKIP, confidence, samples, latency, REASON_BELOW_THRESHOLD)
    return Verdict(mark, confidence, samples, latency, REASON_CONSENSUS)
