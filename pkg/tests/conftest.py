import json
from datetime import datetime, timezone
from pathlib import Path

import pytest

from cruciverba.wiki import ArticleRecord, RawArticle

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def uzbekistan_html() -> str:
    return (DATA_DIR / "uzbekistan.html").read_text(encoding="utf-8")


@pytest.fixture()
def uzbekistan_raw(uzbekistan_html) -> RawArticle:
    return RawArticle(
        title="Uzbekistan",
        html=uzbekistan_html,
        fetched_at="2025-01-01T00:00:00+00:00",
        source_url="https://it.wikipedia.org/wiki/Uzbekistan",
    )


def make_article(title="Uzbekistan", intro=None, keywords=None, views=0,
                 categories=None) -> ArticleRecord:
    intro = intro if intro is not None else (
        "L'Uzbekistan è uno Stato dell'Asia centrale con capitale Tashkent. " * 10
    ).strip()
    return ArticleRecord(
        title=title,
        intro_text=intro,
        bold_keywords=keywords if keywords is not None else ["Uzbekistan"],
        view_count=views,
        summary=intro.split(". ")[0],
        categories=categories or ["Geografia"],
        url=f"https://it.wikipedia.org/wiki/{title}",
    )


def seed_wiki_cache(cache_dir: Path, title: str, html: str,
                    view_count: int = 1234, categories=("Geografia",)) -> None:
    """Pre-populate a WikiClient cache directory so no fetch hits the network."""
    from cruciverba.wiki import _cache_key

    for kind, payload in (
        ("parse", {
            "title": title, "html": html,
            "fetched_at": "2025-01-01T00:00:00+00:00",
            "source_url": f"https://it.wikipedia.org/wiki/{title}",
            "categories": list(categories),
        }),
        ("pageviews", {"view_count": view_count, "available": True}),
    ):
        digest = _cache_key(kind, title)
        subdir = cache_dir / digest[:2]
        subdir.mkdir(parents=True, exist_ok=True)
        (subdir / f"{digest}.json").write_text(
            json.dumps(payload, ensure_ascii=False), encoding="utf-8")


class FakeResponse:
    def __init__(self, status_code=200, payload=None, text="", headers=None):
        self.status_code = status_code
        self._payload = payload
        self.text = text or (json.dumps(payload) if payload is not None else "")
        self.headers = headers or {}

    def json(self):
        if self._payload is None:
            raise ValueError("no JSON body")
        return self._payload


class FakeSession:
    """Scripted requests.Session stand-in; queues one response per call."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def _next(self, method, url, **kwargs):
        self.calls.append({"method": method, "url": url, **kwargs})
        if not self.responses:
            raise AssertionError("FakeSession ran out of scripted responses")
        item = self.responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return item

    def get(self, url, **kwargs):
        return self._next("GET", url, **kwargs)

    def post(self, url, **kwargs):
        return self._next("POST", url, **kwargs)


def utcnow_iso() -> str:
    return datetime.now(timezone.utc).isoformat()
