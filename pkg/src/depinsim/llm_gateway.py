"""Uniform completion interface over two backends.

ScriptedBackend maps prompts to canned replies for reproducible tests;
HttpBackend speaks the OpenAI-compatible completions protocol.  Both return
raw text; parse_yes_no turns it into a verdict without ever matching inside
longer words.
"""

from __future__ import annotations

import fnmatch
import json
import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Optional, Union

import requests

ENDPOINT_ENV = "DEPIN_LLM_ENDPOINT"
API_KEY_ENV = "DEPIN_LLM_KEY"

DEFAULT_MODEL = "EleutherAI/gpt-neo-125M"


class GatewayError(Exception):
    """Base class for completion-backend failures."""


class BackendUnavailableError(GatewayError):
    """Transport failed after exhausting the retry budget."""


class ProtocolError(GatewayError):
    """The endpoint answered, but not with a usable completion."""

    def __init__(self, status: int, body_excerpt: str):
        super().__init__(f"completion endpoint returned status {status}: {body_excerpt}")
        self.status = status
        self.body_excerpt = body_excerpt


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    max_tokens: int = 8
    temperature: float = 0.0  # 0 for determinism
    model_name: str = DEFAULT_MODEL

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be >= 1, got {self.max_tokens}")
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    latency: float  # seconds
    backend: str  # "scripted" | "http"


class ScriptedBackend:
    """Deterministic stand-in for a language-model endpoint.

    `script` may be a mapping from prompts (exact strings or fnmatch
    patterns, checked in insertion order) to replies, or a callable
    computing the reply from the prompt.  Unmatched prompts get `default`.
    """

    name = "scripted"

    def __init__(
        self,
        script: Union[Mapping[str, str], Callable[[str], str], None] = None,
        default: str = "",
    ):
        self._callable = script if callable(script) else None
        self._table = dict(script) if script is not None and not callable(script) else {}
        self._default = default

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        start = time.perf_counter()
        text = self._reply(request.prompt)
        return CompletionResponse(text=text, latency=time.perf_counter() - start, backend=self.name)

    def _reply(self, prompt: str) -> str:
        if self._callable is not None:
            return self._callable(prompt)
        if prompt in self._table:
            return self._table[prompt]
        for pattern, reply in self._table.items():
            if fnmatch.fnmatchcase(prompt, pattern):
                return reply
        return self._default


class HttpBackend:
    """OpenAI-compatible completions client with a bounded retry budget.

    Transport failures are retried with exponential backoff and surface as
    BackendUnavailableError once the budget is spent; non-2xx answers raise
    ProtocolError immediately.
    """

    name = "http"

    def __init__(
        self,
        endpoint: str,
        api_key: Optional[str] = None,
        timeout: float = 10.0,
        retries: int = 2,
        backoff: float = 0.5,
    ):
        if not endpoint:
            raise ValueError("endpoint must be non-empty")
        self.url = endpoint.rstrip("/") + "/v1/completions"
        self.api_key = api_key
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        payload = {
            "model": request.model_name,
            "prompt": request.prompt,
            "max_tokens": request.max_tokens,
            "temperature": request.temperature,
        }
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        start = time.perf_counter()
        last_error: Optional[Exception] = None
        for attempt in range(self.retries + 1):
            try:
                resp = requests.post(self.url, json=payload, headers=headers, timeout=self.timeout)
            except requests.RequestException as err:
                last_error = err
                if attempt < self.retries:
                    time.sleep(self.backoff * 2**attempt)
                continue
            if not 200 <= resp.status_code < 300:
                raise ProtocolError(resp.status_code, resp.text[:200])
            try:
                text = resp.json()["choices"][0]["text"]
            except (ValueError, KeyError, IndexError, TypeError) as err:
                raise ProtocolError(resp.status_code, f"malformed completion body: {resp.text[:200]}") from err
            return CompletionResponse(text=text, latency=time.perf_counter() - start, backend=self.name)
        raise BackendUnavailableError(
            f"{self.url} unreachable after {self.retries + 1} attempts: {last_error}"
        )


_YES_NO = re.compile(r"\b(yes|no)\b", re.IGNORECASE)


def parse_yes_no(text: str) -> Optional[bool]:
    """First standalone 'yes'/'no' token in `text`, or None if neither occurs.

    Word-boundary matching only: 'nothing' and 'yesterday' never count.
    Parse failure is a value (None), not an exception.
    """
    match = _YES_NO.search(text or "")
    if match is None:
        return None
    return match.group(1).lower() == "yes"


class AuditLog:
    """Append-only JSON-lines record of every prompt/response exchange."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._lock = threading.Lock()

    def record(self, request: CompletionRequest, response: CompletionResponse) -> None:
        entry = {
            "prompt": request.prompt,
            "model": request.model_name,
            "response": response.text,
            "backend": response.backend,
            "latency_s": response.latency,
        }
        line = json.dumps(entry, ensure_ascii=False)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")


@dataclass
class LlmSettings:
    """Backend configuration as read from the run-config file."""

    backend: str = "scripted"  # "scripted" | "http"
    script: Optional[dict] = None  # inline prompt-pattern -> reply map
    script_file: Optional[str] = None
    default_reply: str = ""
    endpoint: Optional[str] = None
    api_key: Optional[str] = None
    model_name: str = DEFAULT_MODEL
    max_tokens: int = 8
    temperature: float = 0.0
    timeout: float = 10.0
    retries: int = 2

    _FIELDS = (
        "backend", "script", "script_file", "default_reply", "endpoint",
        "api_key", "model_name", "max_tokens", "temperature", "timeout", "retries",
    )

    @classmethod
    def from_dict(cls, data: Mapping) -> "LlmSettings":
        unknown = sorted(set(data) - set(cls._FIELDS))
        if unknown:
            raise ValueError(f"unknown llm config keys: {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self._FIELDS}


def build_backend(settings: LlmSettings):
    """Construct the configured backend, resolving endpoint/key from env."""
    if settings.backend == "scripted":
        script = settings.script
        if settings.script_file:
            with open(settings.script_file, encoding="utf-8") as fh:
                script = json.load(fh)
        if script is None:
            raise ValueError("scripted llm backend needs a script or script_file")
        return ScriptedBackend(script, default=settings.default_reply)
    if settings.backend == "http":
        endpoint = settings.endpoint or os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            raise ValueError(f"http llm backend needs an endpoint (config or ${ENDPOINT_ENV})")
        api_key = settings.api_key or os.environ.get(API_KEY_ENV)
        return HttpBackend(
            endpoint,
            api_key=api_key,
            timeout=settings.timeout,
            retries=settings.retries,
        )
    raise ValueError(f"unknown llm backend {settings.backend!r} (expected scripted or http)")
