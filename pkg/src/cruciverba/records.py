"""The clue record: one generated clue with its provenance and assessments."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Optional

from .curation import filter_keyword
from .errors import InvariantViolation
from .styles import ClueStyle
from .validation import RATING_CODES, ValidationReport


@dataclass
class ClueRecord:
    id: str
    title: str
    url: str
    category: str
    context: str
    keyword: str  # the answer
    style: ClueStyle
    clue: str
    model_id: str
    rating: Optional[str] = None
    validation: Optional[ValidationReport] = None
    rouge1: Optional[float] = None
    rouge2: Optional[float] = None
    rougeL: Optional[float] = None
    created_at: str = ""

    def __post_init__(self):
        if not self.created_at:
            self.created_at = datetime.now(timezone.utc).isoformat()

    def check_invariants(self) -> None:
        if self.rating is not None and self.rating not in RATING_CODES:
            raise InvariantViolation(f"rating must be one of {RATING_CODES}, got {self.rating!r}")
        if not filter_keyword(self.keyword):
            raise InvariantViolation(f"keyword {self.keyword!r} fails the keyword filter")
        if not isinstance(self.style, ClueStyle):
            raise InvariantViolation(f"style must be a ClueStyle, got {self.style!r}")
        if not self.clue.strip():
            raise InvariantViolation("clue must be non-empty")
        if not self.context.strip():
            raise InvariantViolation("context must be non-empty")

    def with_clue(self, new_clue: str) -> "ClueRecord":
        return replace(self, clue=new_clue, validation=None,
                       rouge1=None, rouge2=None, rougeL=None)

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "url": self.url,
            "category": self.category,
            "context": self.context,
            "keyword": self.keyword,
            "style": self.style.value,
            "clue": self.clue,
            "model_id": self.model_id,
            "rating": self.rating,
            "validation": self.validation.as_dict() if self.validation else None,
            "rouge1": self.rouge1,
            "rouge2": self.rouge2,
            "rougeL": self.rougeL,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClueRecord":
        validation = data.get("validation")
        return cls(
            id=data["id"],
            title=data.get("title", ""),
            url=data.get("url", ""),
            category=data.get("category", ""),
            context=data["context"],
            keyword=data["keyword"],
            style=ClueStyle.parse(data["style"]),
            clue=data["clue"],
            model_id=data.get("model_id", ""),
            rating=data.get("rating"),
            validation=ValidationReport.from_dict(validation) if validation else None,
            rouge1=data.get("rouge1"),
            rouge2=data.get("rouge2"),
            rougeL=data.get("rougeL"),
            created_at=data.get("created_at", ""),
        )
