"""Minimal chat-completions client with an offline stub mode."""
from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import dataclass
from typing import Callable, Union

import httpx

from phantomtok.errors import (
    HttpError,
    LlmTimeout,
    LlmUnavailable,
    MalformedResponse,
    MissingApiKey,
    StubFail,
)

logger = logging.getLogger(__name__)

DEFAULT_KEY_ENV = "TRAPDOC_LLM_API_KEY"
RETRY_STATUS = frozenset({429, 500, 502, 503, 504})
BACKOFF_BASE = 1.0
BACKOFF_FACTOR = 2.0
MAX_CONCURRENT = 4


@dataclass(frozen=True)
class EchoWithMarker:
    marker: str


@dataclass(frozen=True)
class FixedResponse:
    text: str


@dataclass(frozen=True)
class Fail:
    message: str = "stub configured to fail"


Stub = Union[EchoWithMarker, FixedResponse, Fail]


@dataclass(frozen=True)
class LlmConfig:
    endpoint_url: str | None = None
    model_name: str = ""
    api_key_env: str = DEFAULT_KEY_ENV
    temperature: float = 1.0
    max_output_tokens: int = 1024
    timeout: float = 60.0
    retries: int = 2
    stub: Stub | None = None

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be positive")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if self.stub is None and not self.endpoint_url:
            raise ValueError("either endpoint_url or stub is required")


def backoff_delays(retries: int, base: float = BACKOFF_BASE, factor: float = BACKOFF_FACTOR) -> list[float]:
    return [base * factor**i for i in range(retries)]


def _stub_reply(stub: Stub, messages: list[tuple[str, str]]) -> str:
    if isinstance(stub, FixedResponse):
        return stub.text
    if isinstance(stub, EchoWithMarker):
        user = [content for role, content in messages if role == "user"]
        return stub.marker + (user[-1] if user else "")
    raise StubFail(stub.message)


class LlmClient:
    """Thread-safe client; at most ``max_concurrent`` requests are in flight."""

    def __init__(
        self,
        config: LlmConfig,
        *,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        max_concurrent: int = MAX_CONCURRENT,
    ):
        self.config = config
        self._transport = transport
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(max_concurrent)

    def complete(self, messages: list[tuple[str, str]]) -> str:
        if not messages:
            raise ValueError("messages must not be empty")
        for role, _ in messages:
            if role not in ("system", "user"):
                raise ValueError(f"unsupported role {role!r}")
        cfg = self.config
        if cfg.stub is not None:
            return _stub_reply(cfg.stub, messages)
        key = os.environ.get(cfg.api_key_env)
        if not key:
            raise MissingApiKey(f"environment variable {cfg.api_key_env} is not set")
        body = {
            "model": cfg.model_name,
            "messages": [{"role": r, "content": c} for r, c in messages],
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_output_tokens,
        }
        headers = {"Authorization": f"Bearer {key}"}
        with self._slots:
            return self._post(body, headers)

    def _post(self, body: dict, headers: dict) -> str:
        cfg = self.config
        delays = backoff_delays(cfg.retries)
        last_error: Exception | None = None
        with httpx.Client(transport=self._transport, timeout=cfg.timeout) as http:
            for attempt in range(cfg.retries + 1):
                if attempt:
                    self._sleep(delays[attempt - 1])
                try:
                    resp = http.post(cfg.endpoint_url, json=body, headers=headers)
                except httpx.TimeoutException:
                    last_error = LlmTimeout(f"request timed out after {cfg.timeout}s")
                    logger.warning("LLM request timed out (attempt %d)", attempt + 1)
                    continue
                except httpx.TransportError as exc:
                    last_error = LlmUnavailable(f"transport error: {type(exc).__name__}")
                    logger.warning("LLM transport error %s (attempt %d)", type(exc).__name__, attempt + 1)
                    continue
                if resp.status_code in RETRY_STATUS:
                    last_error = HttpError(resp.status_code, resp.text[:200])
                    logger.warning("LLM endpoint returned %d (attempt %d)", resp.status_code, attempt + 1)
                    continue
                if resp.status_code >= 400:
                    raise HttpError(resp.status_code, resp.text[:200])
                return _first_choice(resp)
        assert last_error is not None
        raise last_error


def _first_choice(resp: httpx.Response) -> str:
    try:
        content = resp.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise MalformedResponse(f"unexpected completion body: {exc}") from exc
    if not isinstance(content, str):
        raise MalformedResponse("completion content is not a string")
    return content


def complete(messages: list[tuple[str, str]], config: LlmConfig) -> str:
    return LlmClient(config).complete(messages)
