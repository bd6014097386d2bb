from __future__ import annotations

import json
import logging
import threading
import time

import httpx
import pytest

from phantomtok.errors import HttpError, LlmUnavailable, MalformedResponse, MissingApiKey, StubFail
from phantomtok.llm import DEFAULT_KEY_ENV, EchoWithMarker, Fail, FixedResponse, LlmClient, LlmConfig, backoff_delays

URL = "https://llm.invalid/v1/chat/completions"
KEY = "sk-test-secret-value"


@pytest.fixture(autouse=True)
def api_key(monkeypatch):
    monkeypatch.setenv(DEFAULT_KEY_ENV, KEY)


def ok(text="hello"):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


def client(handler, retries=2, **kw):
    sleeps: list[float] = []
    cfg = LlmConfig(endpoint_url=URL, model_name="m", retries=retries)
    c = LlmClient(cfg, transport=httpx.MockTransport(handler), sleep=sleeps.append, **kw)
    return c, sleeps


def test_request_shape():
    seen = {}

    def handler(request):
        seen["auth"] = request.headers["authorization"]
        seen["body"] = json.loads(request.content)
        return ok("done")

    c, _ = client(handler)
    assert c.complete([("system", "rule"), ("user", "text")]) == "done"
    assert seen["auth"] == f"Bearer {KEY}"
    assert seen["body"]["messages"] == [{"role": "system", "content": "rule"}, {"role": "user", "content": "text"}]
    assert seen["body"]["temperature"] == 1.0 and seen["body"]["max_tokens"] == 1024


def test_retries_on_429_then_succeeds():
    calls = iter([httpx.Response(429), httpx.Response(503), ok()])
    c, sleeps = client(lambda r: next(calls))
    assert c.complete([("user", "x")]) == "hello"
    assert sleeps == [1.0, 2.0]


def test_gives_up_after_retries():
    c, sleeps = client(lambda r: httpx.Response(500, text="boom"), retries=1)
    with pytest.raises(HttpError) as info:
        c.complete([("user", "x")])
    assert info.value.status == 500 and sleeps == [1.0]


def test_client_errors_not_retried():
    c, sleeps = client(lambda r: httpx.Response(400, text="bad"))
    with pytest.raises(HttpError):
        c.complete([("user", "x")])
    assert sleeps == []


def test_transport_error_maps_to_unavailable():
    def handler(request):
        raise httpx.ConnectError("refused")

    c, _ = client(handler, retries=0)
    with pytest.raises(LlmUnavailable):
        c.complete([("user", "x")])


def test_malformed_body():
    c, _ = client(lambda r: httpx.Response(200, json={"choices": []}))
    with pytest.raises(MalformedResponse):
        c.complete([("user", "x")])


def test_missing_key(monkeypatch):
    monkeypatch.delenv(DEFAULT_KEY_ENV)
    c, _ = client(lambda r: ok())
    with pytest.raises(MissingApiKey):
        c.complete([("user", "x")])


def test_key_never_logged(caplog):
    caplog.set_level(logging.DEBUG)
    calls = iter([httpx.Response(502, text="gateway"), ok()])
    c, _ = client(lambda r: next(calls))
    c.complete([("user", "x")])
    assert KEY not in caplog.text


def test_concurrency_cap():
    active, peak = 0, 0
    lock = threading.Lock()

    def handler(request):
        nonlocal active, peak
        with lock:
            active += 1
            peak = max(peak, active)
        time.sleep(0.02)
        with lock:
            active -= 1
        return ok()

    c, _ = client(handler, max_concurrent=2)
    threads = [threading.Thread(target=c.complete, args=([("user", "x")],)) for _ in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert peak <= 2


def test_stubs():
    echo = LlmClient(LlmConfig(stub=EchoWithMarker(">> ")))
    assert echo.complete([("system", "s"), ("user", "u")]) == ">> u"
    assert LlmClient(LlmConfig(stub=FixedResponse("F"))).complete([("user", "u")]) == "F"
    with pytest.raises(StubFail):
        LlmClient(LlmConfig(stub=Fail())).complete([("user", "u")])


def test_config_validation():
    with pytest.raises(ValueError):
        LlmConfig()
    with pytest.raises(ValueError):
        LlmConfig(endpoint_url=URL, temperature=-1)
    assert backoff_delays(3) == [1.0, 2.0, 4.0]
