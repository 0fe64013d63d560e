"""The four clue formats and their generation prompts.

Templates are Italian text assets with ``{context}``, ``{keyword}`` and
``{n_clues}`` placeholders, chained as: role statement, reference text,
target word, structural constraint, output-format instruction. The copular
template additionally embeds one worked example, which that structure needs
to come out reliably.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .curation import filter_keyword
from .errors import EmptyContext, InvalidKeyword, MissingPlaceholder, UnparseableResponse


class ClueStyle(str, Enum):
    UNRESTRICTED = "unrestricted"
    BARE_NOUN_PHRASE = "bare_noun_phrase"
    DEFINITE_DETERMINER_PHRASE = "definite_determiner_phrase"
    COPULAR_SENTENCE = "copular_sentence"

    @classmethod
    def parse(cls, value: str) -> "ClueStyle":
        """Accepts canonical values plus common aliases (dash/space variants)."""
        norm = value.strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {
            "none": cls.UNRESTRICTED,
            "free": cls.UNRESTRICTED,
            "no_constraint": cls.UNRESTRICTED,
            "bare_np": cls.BARE_NOUN_PHRASE,
            "noun_phrase": cls.BARE_NOUN_PHRASE,
            "definite_dp": cls.DEFINITE_DETERMINER_PHRASE,
            "determiner_phrase": cls.DEFINITE_DETERMINER_PHRASE,
            "copular": cls.COPULAR_SENTENCE,
            "copular_sentences": cls.COPULAR_SENTENCE,
        }
        if norm in aliases:
            return aliases[norm]
        try:
            return cls(norm)
        except ValueError:
            raise ValueError(f"unknown clue style: {value!r}") from None


_DESCRIPTORS = {
    ClueStyle.UNRESTRICTED: (
        "La definizione può avere qualsiasi struttura sintattica, purché sia "
        "chiara, corretta e risolvibile."
    ),
    ClueStyle.BARE_NOUN_PHRASE: (
        "La definizione deve essere un sintagma nominale privo di articolo o di "
        "altro determinante iniziale, eventualmente arricchito da aggettivi, "
        "complementi preposizionali o frasi relative."
    ),
    ClueStyle.DEFINITE_DETERMINER_PHRASE: (
        "La definizione deve essere un sintagma nominale introdotto da un "
        "articolo determinativo (il, lo, la, i, gli, le, l'), eventualmente "
        "arricchito da aggettivi, complementi preposizionali o frasi relative."
    ),
    ClueStyle.COPULAR_SENTENCE: (
        "La definizione deve essere una frase copulare con soggetto sottinteso: "
        "inizia con una forma del verbo essere seguita dal predicato, senza mai "
        "nominare il soggetto."
    ),
}

COPULAR_EXEMPLAR = "è una salsa piccante tipica della Tunisia"

_TEMPLATE_FILES = {
    ClueStyle.UNRESTRICTED: "unrestricted.txt",
    ClueStyle.BARE_NOUN_PHRASE: "bare_noun_phrase.txt",
    ClueStyle.DEFINITE_DETERMINER_PHRASE: "definite_determiner_phrase.txt",
    ClueStyle.COPULAR_SENTENCE: "copular_sentence.txt",
}

PLACEHOLDERS = ("{context}", "{keyword}", "{n_clues}")


@dataclass(frozen=True)
class PromptTemplate:
    style: ClueStyle
    template_text: str
    includes_exemplar: bool

    def __post_init__(self):
        for ph in PLACEHOLDERS:
            if self.template_text.count(ph) != 1:
                raise MissingPlaceholder(
                    f"template for {self.style.value} must contain {ph} exactly once")
        if self.includes_exemplar != (self.style is ClueStyle.COPULAR_SENTENCE):
            raise ValueError("only the copular template carries an exemplar")


def style_descriptor(style: ClueStyle) -> str:
    """Italian instruction fragment describing the required clue structure."""
    return _DESCRIPTORS[style]


def load_template(style: ClueStyle, template_dir: str | Path | None = None) -> PromptTemplate:
    """Template from the optional override directory, else the shipped assets."""
    name = _TEMPLATE_FILES[style]
    if template_dir is not None:
        text = Path(template_dir, name).read_text(encoding="utf-8")
    else:
        text = (resources.files("cruciverba") / "assets" / "prompts" / name).read_text(
            encoding="utf-8")
    return PromptTemplate(
        style=style,
        template_text=text,
        includes_exemplar=COPULAR_EXEMPLAR in text,
    )


def render_prompt(context: str, keyword: str, n_clues: int, style: ClueStyle,
                  template_dir: str | Path | None = None) -> str:
    """Substitute inputs into the style's template; byte-deterministic."""
    if not context or not context.strip():
        raise EmptyContext("cannot render a prompt without context text")
    if not filter_keyword(keyword):
        raise InvalidKeyword(f"keyword {keyword!r} fails the keyword filter")
    if n_clues < 1:
        raise ValueError("n_clues must be >= 1")
    template = load_template(style, template_dir)
    out = template.template_text
    out = out.replace("{context}", context.strip())
    out = out.replace("{keyword}", keyword.strip())
    out = out.replace("{n_clues}", str(n_clues))
    return out


_LINE_MARKER_RE = re.compile(r"^\s*(?:\d{1,3}\s*[.)\]:-]\s*|[-*•–]\s+|[-*•–](?=\S))")
_QUOTE_CHARS = "\"'«»“”‘’"
_LETTER_RE = re.compile(r"[^\W\d_]", re.UNICODE)


def parse_clue_list(raw_llm_output: str, expected_n: int) -> list[str]:
    """Extract up to ``expected_n`` clue strings from a numbered or bulleted
    list. Never fabricates entries; fewer than requested is the caller's
    problem to flag."""
    clues: list[str] = []
    for line in raw_llm_output.splitlines():
        line = _LINE_MARKER_RE.sub("", line.strip())
        line = line.strip().strip(_QUOTE_CHARS).strip()
        line = line.strip("*_").strip()
        if not _LETTER_RE.search(line):
            continue
        clues.append(line)
        if len(clues) == expected_n:
            break
    if not clues:
        raise UnparseableResponse(
            f"no clues found in model output ({len(raw_llm_output)} chars)")
    return clues
