"""Italian Wikipedia ingestion: fetch, cache, and extract article intros.

Pages come from the MediaWiki Action API (``action=parse``, rendered HTML);
monthly view counts from the Wikimedia pageviews REST API. Every successful
fetch lands in a local one-file-per-title cache so later runs (and the test
suite) never touch the network.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
import urllib.parse
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from html.parser import HTMLParser

import requests

from .errors import NetworkError, NotFound, ParseFailure, RateLimited

log = logging.getLogger(__name__)

DEFAULT_API_BASE = "https://it.wikipedia.org/w/api.php"
DEFAULT_PAGEVIEWS_BASE = (
    "https://wikimedia.org/api/rest_v1/metrics/pageviews/per-article/it.wikipedia.org"
)
DEFAULT_USER_AGENT = "cruciverba/0.1 (educational crossword pipeline; contact: local)"

_HEADING_TAGS = {"h2", "h3", "h4", "h5", "h6"}
_SKIP_TAGS = {"table", "style", "script", "figure", "ol", "ul"}
_FOOTNOTE_RE = re.compile(r"\[\d+\]|\[[a-zA-Z] \d+\]")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class RawArticle:
    title: str
    html: str
    fetched_at: str
    source_url: str

    def __post_init__(self):
        if not self.title:
            raise ValueError("title must be non-empty")


@dataclass(frozen=True)
class ArticleRecord:
    title: str
    intro_text: str
    bold_keywords: list[str]
    view_count: int
    summary: str
    categories: list[str]
    url: str
    pageviews_available: bool = True
    # undefined in the source material; stored when supplied, never computed
    relevance: str | None = None
    headlines: list[str] = field(default_factory=list)
    related_terms: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "title": self.title,
            "intro_text": self.intro_text,
            "bold_keywords": list(self.bold_keywords),
            "view_count": self.view_count,
            "summary": self.summary,
            "categories": list(self.categories),
            "url": self.url,
            "pageviews_available": self.pageviews_available,
            "relevance": self.relevance,
            "headlines": list(self.headlines),
            "related_terms": list(self.related_terms),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ArticleRecord":
        return cls(
            title=data["title"],
            intro_text=data["intro_text"],
            bold_keywords=list(data.get("bold_keywords", [])),
            view_count=int(data.get("view_count", 0)),
            summary=data.get("summary", ""),
            categories=list(data.get("categories", [])),
            url=data.get("url", ""),
            pageviews_available=bool(data.get("pageviews_available", True)),
            relevance=data.get("relevance"),
            headlines=list(data.get("headlines", [])),
            related_terms=list(data.get("related_terms", [])),
        )


class _IntroParser(HTMLParser):
    """Collects paragraph text and bold spans that appear before the first
    section heading, skipping tables, lists, and reference superscripts."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.paragraphs: list[str] = []
        self.bolds: list[str] = []
        self._done = False
        self._skip_depth = 0
        self._sup_depth = 0
        self._in_p = False
        self._p_parts: list[str] = []
        self._bold_depth = 0
        self._bold_parts: list[str] = []

    def handle_starttag(self, tag, attrs):
        if self._done:
            return
        if tag in _HEADING_TAGS:
            self._done = True
            return
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
            return
        if self._skip_depth:
            return
        if tag == "sup":
            self._sup_depth += 1
        elif tag == "p":
            self._in_p = True
            self._p_parts = []
        elif tag in ("b", "strong") and self._in_p and not self._sup_depth:
            self._bold_depth += 1
            if self._bold_depth == 1:
                self._bold_parts = []
        elif tag == "br" and self._in_p:
            self._p_parts.append(" ")

    def handle_endtag(self, tag):
        if self._done:
            return
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
            return
        if self._skip_depth:
            return
        if tag == "sup":
            self._sup_depth = max(0, self._sup_depth - 1)
        elif tag == "p" and self._in_p:
            self._in_p = False
            text = _normalize_ws("".join(self._p_parts))
            if text:
                self.paragraphs.append(text)
        elif tag in ("b", "strong") and self._bold_depth:
            self._bold_depth -= 1
            if self._bold_depth == 0:
                bold = _normalize_ws("".join(self._bold_parts))
                if bold:
                    self.bolds.append(bold)

    def handle_data(self, data):
        if self._done or self._skip_depth or self._sup_depth or not self._in_p:
            return
        self._p_parts.append(data)
        if self._bold_depth:
            self._bold_parts.append(data)


def _normalize_ws(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


def _parse_intro(raw: RawArticle) -> _IntroParser:
    if not raw.html.strip():
        raise ParseFailure(f"empty HTML for {raw.title!r}")
    parser = _IntroParser()
    try:
        parser.feed(raw.html)
        parser.close()
    except Exception as exc:  # html.parser is lenient; guard anyway
        raise ParseFailure(f"cannot parse HTML for {raw.title!r}: {exc}") from exc
    return parser


def extract_intro(raw: RawArticle) -> str:
    """Plain text of the paragraphs before the first section heading,
    footnote markers removed and whitespace collapsed."""
    parser = _parse_intro(raw)
    text = " ".join(parser.paragraphs)
    return _normalize_ws(_FOOTNOTE_RE.sub("", text))

def extract_bold_keywords(raw: RawArticle) -> list[str]:
    """Bold spans inside the intro paragraphs, deduplicated in first-seen order."""
    parser = _parse_intro(raw)
    seen = {}
    for bold in parser.bolds:
        kw = _FOOTNOTE_RE.sub("", bold).strip()
        if kw and kw not in seen:
            seen[kw] = None
    return list(seen)


def _cache_key(kind: str, name: str) -> str:
    return hashlib.sha256(f"{kind}:{name}".encode("utf-8")).hexdigest()


def _atomic_write(path: str, payload: dict) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class WikiClient:
    """HTTP client over the MediaWiki and pageviews APIs with a local cache.

    Cached entries are keyed by content hash of the title; a cache hit means
    zero network calls, which keeps the whole extraction path offline-pure.
    """

    def __init__(self, cache_dir: str, api_base: str | None = None,
                 pageviews_base: str | None = None, user_agent: str = DEFAULT_USER_AGENT,
                 session: requests.Session | None = None, retries: int = 3,
                 backoff: float = 0.5, timeout: float = 30.0, sleeper=time.sleep,
                 max_in_flight: int = 4):
        self.cache_dir = cache_dir
        self.api_base = api_base or os.environ.get("CRUCIVERBA_WIKI_API", DEFAULT_API_BASE)
        self.pageviews_base = pageviews_base or os.environ.get(
            "CRUCIVERBA_PAGEVIEWS_API", DEFAULT_PAGEVIEWS_BASE)
        self.user_agent = user_agent
        self.session = session or requests.Session()
        self.retries = retries
        self.backoff = backoff
        self.timeout = timeout
        self.sleeper = sleeper
        self._semaphore = threading.Semaphore(max_in_flight)
        os.makedirs(cache_dir, exist_ok=True)

    # -- cache plumbing --

    def _cache_path(self, kind: str, name: str) -> str:
        digest = _cache_key(kind, name)
        subdir = os.path.join(self.cache_dir, digest[:2])
        os.makedirs(subdir, exist_ok=True)
        return os.path.join(subdir, f"{digest}.json")

    def _cache_get(self, kind: str, name: str) -> dict | None:
        path = self._cache_path(kind, name)
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                return json.load(fh)
        return None

    def _cache_put(self, kind: str, name: str, payload: dict) -> None:
        _atomic_write(self._cache_path(kind, name), payload)

    # -- HTTP plumbing --

    def _get(self, url: str, params: dict | None = None) -> requests.Response:
        headers = {"User-Agent": self.user_agent}
        last_exc: Exception | None = None
        for attempt in range(self.retries):
            try:
                with self._semaphore:
                    resp = self.session.get(url, params=params, headers=headers,
                                            timeout=self.timeout)
            except requests.RequestException as exc:
                last_exc = exc
                self.sleeper(self.backoff * (2 ** attempt))
                continue
            if resp.status_code == 429:
                retry_after = resp.headers.get("Retry-After")
                delay = float(retry_after) if retry_after else self.backoff * (2 ** attempt)
                last_exc = RateLimited(f"429 from {url}")
                self.sleeper(delay)
                continue
            if resp.status_code >= 500:
                last_exc = NetworkError(f"{resp.status_code} from {url}")
                self.sleeper(self.backoff * (2 ** attempt))
                continue
            return resp
        if isinstance(last_exc, RateLimited):
            raise last_exc
        raise NetworkError(f"giving up on {url}: {last_exc}")

    # -- operations --

    def fetch_article(self, title: str) -> RawArticle:
        """Rendered page HTML, served from cache when available."""
        title = title.strip()
        if not title:
            raise NotFound("empty title")
        cached = self._cache_get("parse", title)
        if cached is not None:
            return RawArticle(title=cached["title"], html=cached["html"],
                              fetched_at=cached["fetched_at"],
                              source_url=cached["source_url"])
        params = {
            "action": "parse", "page": title, "prop": "text|categories",
            "format": "json", "formatversion": "2", "redirects": "1",
        }
        resp = self._get(self.api_base, params=params)
        try:
            payload = resp.json()
        except ValueError as exc:
            raise NetworkError(f"non-JSON API response for {title!r}") from exc
        if "error" in payload:
            code = payload["error"].get("code", "")
            if code in ("missingtitle", "pagecannotexist", "invalidtitle"):
                raise NotFound(f"page {title!r}: {code}")
            raise NetworkError(f"API error for {title!r}: {code}")
        parse = payload.get("parse", {})
        html = parse.get("text", "")
        if not html:
            raise NotFound(f"page {title!r} returned no HTML")
        entry = {
            "title": parse.get("title", title),
            "html": html,
            "fetched_at": datetime.now(timezone.utc).isoformat(),
            "source_url": self._page_url(parse.get("title", title)),
            "categories": [c.get("category", "") for c in parse.get("categories", [])],
        }
        self._cache_put("parse", title, entry)
        return RawArticle(title=entry["title"], html=entry["html"],
                          fetched_at=entry["fetched_at"], source_url=entry["source_url"])

    def _page_url(self, title: str) -> str:
        host = urllib.parse.urlsplit(self.api_base).netloc or "it.wikipedia.org"
        return f"https://{host}/wiki/{urllib.parse.quote(title.replace(' ', '_'))}"

    def cached_categories(self, title: str) -> list[str]:
        cached = self._cache_get("parse", title.strip())
        if cached:
            return [c for c in cached.get("categories", []) if c]
        return []

    def fetch_view_count(self, title: str) -> tuple[int, bool]:
        """Total views over the last full month; (0, False) when unavailable."""
        cached = self._cache_get("pageviews", title)
        if cached is not None:
            return int(cached["view_count"]), bool(cached["available"])
        today = datetime.now(timezone.utc).date().replace(day=1)
        end = today - timedelta(days=1)
        start = end.replace(day=1)
        url = "/".join([
            self.pageviews_base.rstrip("/"), "all-access", "user",
            urllib.parse.quote(title.replace(" ", "_"), safe=""),
            "monthly", start.strftime("%Y%m%d00"), end.strftime("%Y%m%d00"),
        ])
        try:
            resp = self._get(url)
            payload = resp.json()
            views = sum(int(item.get("views", 0)) for item in payload.get("items", []))
            available = resp.status_code == 200 and "items" in payload
        except (NetworkError, RateLimited, requests.RequestException, ValueError):
            views, available = 0, False
        if not available:
            views = 0
        self._cache_put("pageviews", title, {"view_count": views, "available": available})
        return views, available

    def extract_metadata(self, raw: RawArticle) -> ArticleRecord:
        """Assemble the full article record; missing metadata degrades to
        defaults instead of aborting."""
        intro = extract_intro(raw)
        bolds = extract_bold_keywords(raw)
        view_count, available = self.fetch_view_count(raw.title)
        return ArticleRecord(
            title=raw.title,
            intro_text=intro,
            bold_keywords=bolds,
            view_count=view_count,
            summary=_first_sentence(intro),
            categories=self.cached_categories(raw.title),
            url=raw.source_url,
            pageviews_available=available,
        )

    def article_record(self, title: str) -> ArticleRecord:
        return self.extract_metadata(self.fetch_article(title))


def _first_sentence(text: str) -> str:
    match = re.search(r"(?<=[.!?])\s", text)
    return text[: match.start()] if match else text
