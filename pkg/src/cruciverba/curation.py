"""Filtering rules for articles and keywords, plus popularity ranking.

Keywords must be 3-20 characters of letters (accented Italian letters
included) with at most one internal space between words and at most two
words. Articles with fewer than 50 words are rejected outright; a
configurable upper bound guards against overly long contexts.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .wiki import ArticleRecord


@dataclass(frozen=True)
class CurationConfig:
    min_words: int = 50
    max_words: int = 1200
    keyword_min_chars: int = 3
    keyword_max_chars: int = 20
    keyword_max_words: int = 2

    def __post_init__(self):
        if not (0 < self.min_words < self.max_words):
            raise ValueError("require 0 < min_words < max_words")
        if not (0 < self.keyword_min_chars <= self.keyword_max_chars):
            raise ValueError("require 0 < keyword_min_chars <= keyword_max_chars")
        if self.keyword_max_words < 1:
            raise ValueError("keyword_max_words must be positive")


@dataclass(frozen=True)
class CurationVerdict:
    accepted: bool
    reasons: list[str] = field(default_factory=list)
    kept_keywords: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.accepted != (not self.reasons):
            raise ValueError("accepted must hold exactly when reasons is empty")


REASON_TOO_SHORT = "TooShort"
REASON_TOO_LONG = "TooLong"
REASON_NO_VALID_KEYWORD = "NoValidKeyword"


def filter_keyword(keyword: str, cfg: CurationConfig | None = None) -> bool:
    """True iff the trimmed keyword is a valid crossword answer candidate.

    Characters count letters and internal single spaces; anything that is not
    a Unicode letter or a separating space (digits, hyphens, apostrophes,
    doubled spaces) disqualifies the keyword.
    """
    cfg = cfg or CurationConfig()
    kw = keyword.strip()
    if not (cfg.keyword_min_chars <= len(kw) <= cfg.keyword_max_chars):
        return False
    words = kw.split(" ")
    if len(words) > cfg.keyword_max_words:
        return False
    # empty parts mean leading/doubled spaces survived the split
    return all(part and part.isalpha() for part in words)


def filter_article(article: ArticleRecord, cfg: CurationConfig | None = None) -> CurationVerdict:
    """Accept or reject one article; accepted verdicts carry the surviving keywords."""
    cfg = cfg or CurationConfig()
    reasons = []
    word_count = len(article.intro_text.split())
    if word_count < cfg.min_words:
        reasons.append(REASON_TOO_SHORT)
    elif word_count > cfg.max_words:
        reasons.append(REASON_TOO_LONG)
    kept = [kw for kw in article.bold_keywords if filter_keyword(kw, cfg)]
    if not kept:
        reasons.append(REASON_NO_VALID_KEYWORD)
    return CurationVerdict(accepted=not reasons, reasons=reasons, kept_keywords=kept)


def curate_pool(pool: Iterable[ArticleRecord], cfg: CurationConfig | None = None
                ) -> tuple[list[ArticleRecord], list[tuple[str, list[str]]]]:
    """Split a pool into accepted articles (keywords narrowed to the survivors)
    and (title, reasons) pairs for the rejects."""
    accepted, rejected = [], []
    for article in pool:
        verdict = filter_article(article, cfg)
        if verdict.accepted:
            accepted.append(replace(article, bold_keywords=verdict.kept_keywords))
        else:
            rejected.append((article.title, verdict.reasons))
    return accepted, rejected


def rank_articles(pool: Sequence[ArticleRecord]) -> list[ArticleRecord]:
    """Descending view count; ties broken by title so the order is deterministic."""
    return sorted(pool, key=lambda a: (-a.view_count, a.title))
