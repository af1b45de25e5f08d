"""Uniform chat-completion client with retries, structured output, and a
deterministic scripted mock for tests.

Providers expose one method, `send`, and signal retryable transport failures
with `TransientProviderError`. Structured output is enforced by named schema
validators registered via `register_schema`; a failed validation triggers a
repair round-trip that appends the error text and re-asks.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol

ROLE_TAGS = (
    "planner", "styler", "executor_text", "executor_viz",
    "evaluator", "judge", "editor",
)


class GatewayError(Exception):
    pass


class ProviderUnavailable(GatewayError):
    pass


class Timeout(GatewayError):
    pass


class CredentialMissing(GatewayError):
    pass


class TransientProviderError(Exception):
    """Retryable transport failure (connection reset, 5xx, rate limit)."""


class SchemaValidationError(Exception):
    """Output failed the requested schema; message is sent back for repair."""


class StructuredOutputFailed(GatewayError):
    def __init__(self, last_error: str):
        self.last_error = last_error
        super().__init__(f"structured output failed after repairs: {last_error}")


class MockScriptError(GatewayError):
    pass


@dataclass
class CompletionRequest:
    role_tag: str
    system: str
    user: str
    schema: str | None = None
    temperature: float = 0.0
    max_output_chars: int = 40000
    seed: int | None = None

    def __post_init__(self):
        if self.role_tag not in ROLE_TAGS:
            raise ValueError(f"unknown role tag {self.role_tag!r}")


@dataclass
class UsageRecord:
    latency: float
    attempts: int
    output_chars: int


@dataclass
class CompletionResult:
    text: str
    parsed: Any = None
    usage: UsageRecord = field(default_factory=lambda: UsageRecord(0.0, 1, 0))


class Provider(Protocol):
    def send(self, req: CompletionRequest, extra_messages: list[dict]) -> str: ...


_SCHEMAS: dict[str, Callable[[str], Any]] = {}


def register_schema(name: str, validator: Callable[[str], Any]) -> None:
    _SCHEMAS[name] = validator


def registered_schemas() -> tuple[str, ...]:
    return tuple(_SCHEMAS)


class HttpChatProvider:
    """Chat-completions HTTP provider configured by base URL, model id, and a
    key environment variable."""

    def __init__(self, base_url: str | None = None, model: str | None = None,
                 api_key_env: str = "DOCWEAVE_API_KEY", timeout: float = 120.0):
        self.base_url = base_url or os.environ.get("DOCWEAVE_BASE_URL", "")
        self.model = model or os.environ.get("DOCWEAVE_MODEL", "")
        self.api_key_env = api_key_env
        self.timeout = timeout

    def send(self, req: CompletionRequest, extra_messages: list[dict]) -> str:
        import httpx

        api_key = os.environ.get(self.api_key_env)
        if not api_key:
            raise CredentialMissing(f"environment variable {self.api_key_env} not set")
        if not self.base_url:
            raise ProviderUnavailable("no provider base URL configured")
        messages = [
            {"role": "system", "content": req.system},
            {"role": "user", "content": req.user},
            *extra_messages,
        ]
        payload: dict[str, Any] = {
            "model": self.model,
            "messages": messages,
            "temperature": req.temperature,
        }
        if req.seed is not None:
            payload["seed"] = req.seed
        try:
            resp = httpx.post(
                self.base_url.rstrip("/") + "/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {api_key}"},
                timeout=self.timeout,
            )
        except httpx.TimeoutException as exc:
            raise Timeout(str(exc)) from exc
        except httpx.TransportError as exc:
            raise TransientProviderError(str(exc)) from exc
        if resp.status_code >= 500 or resp.status_code == 429:
            raise TransientProviderError(f"provider returned {resp.status_code}")
        if resp.status_code != 200:
            raise ProviderUnavailable(f"provider returned {resp.status_code}: {resp.text[:500]}")
        return resp.json()["choices"][0]["message"]["content"]


class MockProvider:
    """Scripted provider: responses resolve by (role_tag, call ordinal).

    Script entries are strings, exceptions to raise (for fault injection), or
    callables receiving the request and extra messages. Unmatched calls fail
    loudly so fixture drift never passes silently.
    """

    def __init__(self, script: dict[str, list]):
        self.script = {role: list(entries) for role, entries in script.items()}
        self._cursors: dict[str, int] = {}
        self.captured: list[dict] = []
        self._lock = threading.Lock()

    def send(self, req: CompletionRequest, extra_messages: list[dict]) -> str:
        with self._lock:
            idx = self._cursors.get(req.role_tag, 0)
            self._cursors[req.role_tag] = idx + 1
            self.captured.append({
                "role_tag": req.role_tag,
                "ordinal": idx,
                "system": req.system,
                "user": req.user,
                "extra": list(extra_messages),
            })
            entries = self.script.get(req.role_tag)
            if entries is None:
                raise MockScriptError(f"no mock script for role {req.role_tag!r}")
            if idx >= len(entries):
                raise MockScriptError(
                    f"mock script for role {req.role_tag!r} exhausted at call {idx}")
            entry = entries[idx]
        if isinstance(entry, Exception):
            raise entry
        if callable(entry):
            return entry(req, extra_messages)
        return entry

    def prompts_for(self, role_tag: str) -> list[dict]:
        return [c for c in self.captured if c["role_tag"] == role_tag]

    @classmethod
    def from_file(cls, path: str) -> "MockProvider":
        """Load a JSONL script of {"role": ..., "response": ...} records."""
        script: dict[str, list] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                script.setdefault(rec["role"], []).append(rec["response"])
        return cls(script)


class Gateway:
    def __init__(self, provider: Provider, *,
                 max_transport_retries: int = 3,
                 backoff_base: float = 1.0,
                 max_repairs: int = 3,
                 max_in_flight: int | None = None,
                 transcript_path: str | None = None,
                 sleep: Callable[[float], None] = time.sleep):
        self.provider = provider
        self.max_transport_retries = max_transport_retries
        self.backoff_base = backoff_base
        self.max_repairs = max_repairs
        self.transcript_path = transcript_path
        self._sleep = sleep
        self._semaphore = (threading.Semaphore(max_in_flight)
                           if max_in_flight else None)
        self._transcript_lock = threading.Lock()

    # -- low level -----------------------------------------------------------

    def _send_once(self, req: CompletionRequest, extra: list[dict],
                   attempts_so_far: int) -> tuple[str, int]:
        """One logical exchange with transport retries; returns (text, attempts)."""
        attempts = attempts_so_far
        delay = self.backoff_base
        while True:
            attempts += 1
            try:
                if self._semaphore:
                    with self._semaphore:
                        return self.provider.send(req, extra), attempts
                return self.provider.send(req, extra), attempts
            except TransientProviderError as exc:
                if attempts - attempts_so_far > self.max_transport_retries:
                    raise ProviderUnavailable(str(exc)) from exc
                self._sleep(delay)
                delay *= 2

    def _log(self, req: CompletionRequest, text: str, seconds: float) -> None:
        if not self.transcript_path:
            return
        entry = {
            "stage": req.role_tag,
            "prompt_sha256": hashlib.sha256(
                (req.system + "\x00" + req.user).encode("utf-8")).hexdigest(),
            "output_chars": len(text),
            "seconds": round(seconds, 6),
        }
        with self._transcript_lock:
            with open(self.transcript_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry) + "\n")

    # -- public surface ------------------------------------------------------

    def complete(self, req: CompletionRequest) -> CompletionResult:
        start = time.monotonic()
        text, attempts = self._send_once(req, [], 0)
        elapsed = time.monotonic() - start
        self._log(req, text, elapsed)
        return CompletionResult(
            text=text,
            usage=UsageRecord(latency=elapsed, attempts=attempts,
                              output_chars=len(text)))

    def complete_checked(self, req: CompletionRequest,
                         check: Callable[[str], str | None],
                         max_repairs: int | None = None) -> CompletionResult:
        """Like `complete`, but re-asks with the checker's error message until
        the output passes or repairs are exhausted."""
        budget = self.max_repairs if max_repairs is None else max_repairs
        start = time.monotonic()
        extra: list[dict] = []
        attempts = 0
        last_error = "no attempts made"
        for _ in range(budget + 1):
            text, attempts = self._send_once(req, extra, attempts)
            error = check(text)
            if error is None:
                elapsed = time.monotonic() - start
                self._log(req, text, elapsed)
                return CompletionResult(
                    text=text,
                    usage=UsageRecord(latency=elapsed, attempts=attempts,
                                      output_chars=len(text)))
            last_error = error
            extra = extra + [
                {"role": "assistant", "content": text},
                {"role": "user",
                 "content": f"Your previous output was rejected: {error}\n"
                            "Produce a corrected output."},
            ]
        raise StructuredOutputFailed(last_error)

    def complete_structured(self, req: CompletionRequest,
                            max_repairs: int | None = None) -> CompletionResult:
        if req.schema not in _SCHEMAS:
            raise GatewayError(f"schema {req.schema!r} is not registered")
        validator = _SCHEMAS[req.schema]
        parsed_box: list[Any] = []

        def check(text: str) -> str | None:
            try:
                parsed_box[:] = [validator(text)]
                return None
            except SchemaValidationError as exc:
                return str(exc)

        result = self.complete_checked(req, check, max_repairs=max_repairs)
        result.parsed = parsed_box[0]
        return result
