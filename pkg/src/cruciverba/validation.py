"""Mechanical clue validation: structure classification, answer-leak
detection, and length checks.

Structure classification is a surface rule cascade on the clue's first token
(copula, definite article, other determiner, bare noun); it deliberately does
no parsing. Semantic quality levels B-D stay human judgments, entered through
the rating endpoints.
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .rouge import tokenize
from .styles import ClueStyle

# Clue token-length range observed across the generated dataset; violations
# are warnings, never failures.
CLUE_MIN_TOKENS = 4
CLUE_MAX_TOKENS = 55

ISSUE_ANSWER_LEAK = "AnswerLeak"
ISSUE_STYLE_MISMATCH = "StyleMismatch"
ISSUE_TOO_FEW_TOKENS = "TooFewTokens"
ISSUE_TOO_MANY_TOKENS = "TooManyTokens"
ISSUE_EMPTY_CLUE = "EmptyClue"

DETECTED_UNKNOWN = "unknown"


@dataclass(frozen=True)
class ItalianLexicon:
    """Closed, versioned word sets driving the first-token cascade."""
    definite_articles: frozenset[str]
    copula_forms: frozenset[str]
    other_determiners: frozenset[str]
    version: str = "1"

    @property
    def determiner_set(self) -> frozenset[str]:
        return self.definite_articles | self.other_determiners


def load_lexicon(path: str | Path | None = None) -> ItalianLexicon:
    """Lexicon from an override file, else the shipped asset."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = (resources.files("cruciverba") / "assets" / "lexicon_it.txt").read_text(
            encoding="utf-8")
    sections: dict[str, set[str]] = {}
    current: Optional[set[str]] = None
    version = "0"
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("# version:"):
            version = line.split(":", 1)[1].strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = sections.setdefault(line[1:-1], set())
        elif current is not None:
            current.add(line.lower())
    return ItalianLexicon(
        definite_articles=frozenset(sections.get("definite_articles", ())),
        copula_forms=frozenset(sections.get("copula_forms", ())),
        other_determiners=frozenset(sections.get("other_determiners", ())),
        version=version,
    )


DEFAULT_LEXICON = load_lexicon()


@dataclass(frozen=True)
class ValidationReport:
    detected_style: str  # a ClueStyle value or "unknown"
    style_matches_request: bool
    answer_leak: bool
    length_ok: bool
    issues: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.style_matches_request and not self.answer_leak

    def as_dict(self) -> dict:
        return {
            "detected_style": self.detected_style,
            "style_matches_request": self.style_matches_request,
            "answer_leak": self.answer_leak,
            "length_ok": self.length_ok,
            "issues": list(self.issues),
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ValidationReport":
        return cls(
            detected_style=data["detected_style"],
            style_matches_request=bool(data["style_matches_request"]),
            answer_leak=bool(data["answer_leak"]),
            length_ok=bool(data["length_ok"]),
            issues=list(data.get("issues", [])),
        )


def _normalize_clue(clue: str) -> str:
    text = clue.strip().strip("\"'«»“”‘’ \t")
    text = text.replace("’", "'")
    return re.sub(r"\s+", " ", text).lower()


def classify_structure(clue: str, lex: ItalianLexicon = DEFAULT_LEXICON
                       ) -> ClueStyle | str:
    """First-token cascade: copula, definite article, other determiner
    (unclassifiable), else bare noun phrase. Returns ``"unknown"`` for the
    determiner-headed leftovers and for empty input."""
    text = _normalize_clue(clue)
    if not text:
        return DETECTED_UNKNOWN
    first = text.split(" ", 1)[0]
    if first in lex.copula_forms:
        return ClueStyle.COPULAR_SENTENCE
    if first in lex.definite_articles or first.startswith("l'"):
        return ClueStyle.DEFINITE_DETERMINER_PHRASE
    if first in lex.determiner_set or first.startswith("un'"):
        return DETECTED_UNKNOWN
    return ClueStyle.BARE_NOUN_PHRASE


def _fold(text: str) -> list[str]:
    """Lowercased, accent-folded, punctuation-free tokens."""
    decomposed = unicodedata.normalize("NFKD", text.lower())
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return re.findall(r"[a-z0-9]+", stripped)


def _within_edit1(a: str, b: str) -> bool:
    if a == b:
        return True
    la, lb = len(a), len(b)
    if abs(la - lb) > 1:
        return False
    if la == lb:  # one substitution
        return sum(x != y for x, y in zip(a, b)) == 1
    # one insertion/deletion
    short, long_ = (a, b) if la < lb else (b, a)
    i = 0
    while i < len(short) and short[i] == long_[i]:
        i += 1
    return short[i:] == long_[i + 1:]


def contains_answer_leak(clue: str, answer: str) -> bool:
    """True when the clue contains the answer or a near variant of it.

    Operationalized as: any answer word of length >= 4 present among the clue
    tokens (exactly or within edit distance 1), or the full normalized answer
    occurring as a substring of the normalized clue.
    """
    if not answer.strip():
        raise ValueError("answer must be non-empty")
    clue_tokens = _fold(clue)
    answer_tokens = _fold(answer)
    full_answer = " ".join(answer_tokens)
    if full_answer and full_answer in " ".join(clue_tokens):
        return True
    significant = [w for w in answer_tokens if len(w) >= 4]
    for word in significant:
        for token in clue_tokens:
            if token == word or _within_edit1(token, word):
                return True
    return False


def validate(clue: str, answer: str, requested: ClueStyle,
             lex: ItalianLexicon = DEFAULT_LEXICON) -> ValidationReport:
    """Full mechanical check; deterministic and side-effect free."""
    issues: list[str] = []
    if not clue.strip():
        return ValidationReport(
            detected_style=DETECTED_UNKNOWN, style_matches_request=False,
            answer_leak=False, length_ok=False, issues=[ISSUE_EMPTY_CLUE])
    detected = classify_structure(clue, lex)
    detected_value = detected.value if isinstance(detected, ClueStyle) else detected
    matches = (requested is ClueStyle.UNRESTRICTED) or (detected == requested)
    if not matches:
        issues.append(ISSUE_STYLE_MISMATCH)
    leak = contains_answer_leak(clue, answer)
    if leak:
        issues.append(ISSUE_ANSWER_LEAK)
    n_tokens = len(tokenize(clue))
    length_ok = CLUE_MIN_TOKENS <= n_tokens <= CLUE_MAX_TOKENS
    if n_tokens < CLUE_MIN_TOKENS:
        issues.append(ISSUE_TOO_FEW_TOKENS)
    elif n_tokens > CLUE_MAX_TOKENS:
        issues.append(ISSUE_TOO_MANY_TOKENS)
    return ValidationReport(
        detected_style=detected_value,
        style_matches_request=matches,
        answer_leak=leak,
        length_ok=length_ok,
        issues=issues,
    )


RATING_CODES = ("A", "B", "C", "D", "E")

_RATING_DESCRIPTIONS = (
    ("A", "Coherent and valid: fits the context, the answer, and the requested structure."),
    ("B", "Generally acceptable, with minor phrasing or structural flaws."),
    ("C", "Relates to the answer but only vaguely to the context, or conveys correct information poorly."),
    ("D", "Sticks to the context but does not identify the answer unambiguously."),
    ("E", "Unacceptable: ungrammatical, reveals the answer or a variant of it, or fails to pick out the referent."),
)


def rating_codebook() -> list[tuple[str, str]]:
    """The five quality levels, best to worst, for UI display and storage."""
    return list(_RATING_DESCRIPTIONS)
