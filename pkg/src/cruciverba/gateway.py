"""Client for chat-completion-compatible HTTP endpoints.

One client serves hosted and self-hosted models through the common
chat-completions JSON shape; ``top_k`` goes on the wire only when the
endpoint is flagged as accepting it. A record/replay fixture store makes the
whole generation path runnable offline, and every outbound request is logged
to the transcript file before it is sent.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import requests

from .errors import (AuthFailure, EmptyContext, MalformedResponse, NetworkError,
                     RateLimited, ReplayMiss, Timeout)
from .records import ClueRecord
from .styles import ClueStyle, parse_clue_list, render_prompt
from .wiki import ArticleRecord

log = logging.getLogger(__name__)

MODE_LIVE = "live"
MODE_REPLAY = "replay"
MODE_RECORD = "record"


@dataclass(frozen=True)
class GenerationParams:
    """Sampling configuration; defaults mirror the reference inference setup."""
    temperature: float = 0.1
    top_p: float = 0.95
    top_k: int = 50
    max_tokens: int = 512
    model_id: str = "gpt-4o"

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.top_k < 1 or self.max_tokens < 1:
            raise ValueError("top_k and max_tokens must be positive")


@dataclass(frozen=True)
class GenerationTranscript:
    prompt: str
    raw_response: str
    params: GenerationParams
    latency_ms: int
    endpoint: str
    timestamp: str
    retries: int = 0


def request_fingerprint(prompt: str, params: GenerationParams) -> str:
    """Stable key for the fixture store; identical inputs map to one fixture."""
    payload = json.dumps({
        "prompt": prompt,
        "model": params.model_id,
        "temperature": params.temperature,
        "top_p": params.top_p,
        "top_k": params.top_k,
        "max_tokens": params.max_tokens,
    }, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:24]


class LLMGateway:
    def __init__(self, endpoint: str = "", api_key: str | None = None,
                 mode: str = MODE_LIVE, fixture_dir: str | Path | None = None,
                 transcript_path: str | Path | None = None, send_top_k: bool = False,
                 retries: int = 3, timeout: float = 120.0, max_in_flight: int = 2,
                 session: requests.Session | None = None, sleeper=time.sleep,
                 rng: random.Random | None = None):
        if mode not in (MODE_LIVE, MODE_REPLAY, MODE_RECORD):
            raise ValueError(f"unknown gateway mode {mode!r}")
        if mode in (MODE_REPLAY, MODE_RECORD) and fixture_dir is None:
            raise ValueError(f"{mode} mode needs a fixture_dir")
        self.endpoint = endpoint or os.environ.get("CRUCIVERBA_LLM_BASE_URL", "")
        self.api_key = api_key if api_key is not None else os.environ.get(
            "CRUCIVERBA_LLM_API_KEY")
        self.mode = mode
        self.fixture_dir = Path(fixture_dir) if fixture_dir else None
        self.transcript_path = Path(transcript_path) if transcript_path else None
        self.send_top_k = send_top_k
        self.retries = retries
        self.timeout = timeout
        self.session = session or requests.Session()
        self.sleeper = sleeper
        self.rng = rng or random.Random(0)
        self._semaphore = threading.Semaphore(max_in_flight)
        self._log_lock = threading.Lock()

    # -- transcript log --

    def _append_log(self, record: dict) -> None:
        if self.transcript_path is None:
            return
        with self._log_lock:
            self.transcript_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.transcript_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                fh.flush()
                os.fsync(fh.fileno())

    # -- fixtures --

    def _fixture_path(self, key: str) -> Path:
        assert self.fixture_dir is not None
        return self.fixture_dir / f"{key}.json"

    def _replay(self, key: str, prompt: str) -> str:
        path = self._fixture_path(key)
        if not path.exists():
            raise ReplayMiss(f"no fixture {key} for prompt starting "
                             f"{prompt[:60]!r}")
        data = json.loads(path.read_text(encoding="utf-8"))
        return data["response_text"]

    def _record_fixture(self, key: str, prompt: str, response_text: str) -> None:
        assert self.fixture_dir is not None
        self.fixture_dir.mkdir(parents=True, exist_ok=True)
        path = self._fixture_path(key)
        payload = {"prompt": prompt, "response_text": response_text}
        path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n",
                        encoding="utf-8")

    # -- wire --

    def _request_body(self, prompt: str, params: GenerationParams) -> dict:
        body = {
            "model": params.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_tokens": params.max_tokens,
        }
        if self.send_top_k:
            body["top_k"] = params.top_k
        return body

    def _post_once(self, body: dict) -> requests.Response:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            return self.session.post(self.endpoint, json=body, headers=headers,
                                     timeout=self.timeout)
        except requests.Timeout as exc:
            raise Timeout(f"no response within {self.timeout}s") from exc

    def _post_with_retries(self, body: dict) -> tuple[str, int]:
        attempts = 0
        last_error: Exception | None = None
        while attempts < self.retries:
            try:
                resp = self._post_once(body)
            except requests.RequestException as exc:
                attempts += 1
                last_error = exc
                self.sleeper(0.5 * (2 ** attempts) * (1 + self.rng.random()))
                continue
            if resp.status_code in (401, 403):
                raise AuthFailure(f"endpoint rejected credentials ({resp.status_code})")
            if resp.status_code == 429 or resp.status_code >= 500:
                attempts += 1
                last_error = RateLimited(f"HTTP {resp.status_code}") \
                    if resp.status_code == 429 else NetworkError(f"HTTP {resp.status_code}")
                self.sleeper(0.5 * (2 ** attempts) * (1 + self.rng.random()))
                continue
            if resp.status_code >= 400:
                raise MalformedResponse(f"HTTP {resp.status_code}: {resp.text[:200]}")
            return self._extract_text(resp), attempts
        if isinstance(last_error, (RateLimited, NetworkError)):
            raise last_error
        raise NetworkError(f"request failed after {attempts} attempts: {last_error}")

    @staticmethod
    def _extract_text(resp: requests.Response) -> str:
        try:
            payload = resp.json()
            return payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedResponse(f"unexpected response shape: {exc}") from exc

    # -- operations --

    def generate(self, prompt: str, params: GenerationParams) -> GenerationTranscript:
        """One completion; the intent record is on disk before the request leaves."""
        if not prompt.strip():
            raise ValueError("prompt must be non-empty")
        key = request_fingerprint(prompt, params)
        self._append_log({
            "kind": "request", "key": key, "mode": self.mode,
            "endpoint": self.endpoint, "prompt": prompt,
            "model": params.model_id,
            "ts": datetime.now(timezone.utc).isoformat(),
        })
        started = time.monotonic()
        retries = 0
        if self.mode == MODE_REPLAY:
            text = self._replay(key, prompt)
            latency_ms = 0
        else:
            if not self.endpoint:
                raise AuthFailure("no endpoint configured (set CRUCIVERBA_LLM_BASE_URL)")
            with self._semaphore:
                text, retries = self._post_with_retries(self._request_body(prompt, params))
            latency_ms = int((time.monotonic() - started) * 1000)
            if self.mode == MODE_RECORD:
                self._record_fixture(key, prompt, text)
        transcript = GenerationTranscript(
            prompt=prompt, raw_response=text, params=params, latency_ms=latency_ms,
            endpoint=self.endpoint if self.mode != MODE_REPLAY else f"replay:{key}",
            timestamp=datetime.now(timezone.utc).isoformat(), retries=retries,
        )
        self._append_log({
            "kind": "response", "key": key, "latency_ms": latency_ms,
            "retries": retries, "response": text,
            "ts": transcript.timestamp,
        })
        return transcript


def generate_clues(article: ArticleRecord, keyword: str, style: ClueStyle, n: int,
                   params: GenerationParams, gateway: LLMGateway,
                   template_dir: str | Path | None = None) -> list[ClueRecord]:
    """Render the style prompt, call the endpoint, and wrap each parsed clue
    in an unvalidated, unrated draft record."""
    if not article.intro_text.strip():
        raise EmptyContext(f"article {article.title!r} has no intro text")
    prompt = render_prompt(article.intro_text, keyword, n, style,
                           template_dir=template_dir)
    transcript = gateway.generate(prompt, params)
    clues = parse_clue_list(transcript.raw_response, n)
    if len(clues) < n:
        log.warning("model returned %d of %d requested clues for %r (%s)",
                    len(clues), n, keyword, style.value)
    drafts = []
    for clue in clues:
        drafts.append(ClueRecord(
            id="", title=article.title, url=article.url,
            category=article.categories[0] if article.categories else "",
            context=article.intro_text, keyword=keyword, style=style, clue=clue,
            model_id=params.model_id,
        ))
    return drafts
