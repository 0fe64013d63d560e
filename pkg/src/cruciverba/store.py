"""JSONL-backed clue dataset: append-only records, tombstone deletion,
descriptive statistics, and fine-tuning exports.

The store is a single ``records.jsonl`` under a data directory; every line is
either a record or a tombstone. Ids are sequential and never reused. The
duplicate key is the normalized (context, keyword, style, clue) tuple, so
re-generating the same clue for the same context is rejected.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from .errors import DuplicateRecord, EmptySet, NotFound, SchemaError
from .records import ClueRecord
from .styles import ClueStyle, render_prompt

Tokenizer = Callable[[str], list[str]]

CONTEXT_BUCKET_WIDTH = 50
CLUE_BUCKET_WIDTH = 5

# Where the published clue dataset lives; the download helper and the
# network-marked tests use it.
PUBLISHED_DATASET_URL = "https://huggingface.co/datasets/Kamyar-zeinalipour/ita_cw_text"


def _whitespace_tokenizer(text: str) -> list[str]:
    return text.split()


@dataclass(frozen=True)
class DatasetStats:
    context_token_histogram: dict[int, int]
    clue_token_histogram: dict[int, int]
    category_counts: dict[str, int]
    min_context_tokens: int
    max_context_tokens: int
    min_clue_tokens: int
    max_clue_tokens: int
    record_count: int

    def as_dict(self) -> dict:
        return {
            "record_count": self.record_count,
            "context_tokens": {
                "min": self.min_context_tokens, "max": self.max_context_tokens,
                "histogram": {str(k): v for k, v in sorted(self.context_token_histogram.items())},
                "bucket_width": CONTEXT_BUCKET_WIDTH,
            },
            "clue_tokens": {
                "min": self.min_clue_tokens, "max": self.max_clue_tokens,
                "histogram": {str(k): v for k, v in sorted(self.clue_token_histogram.items())},
                "bucket_width": CLUE_BUCKET_WIDTH,
            },
            "categories": dict(sorted(self.category_counts.items())),
        }


def duplicate_key(record: ClueRecord) -> str:
    context_hash = hashlib.sha256(
        re.sub(r"\s+", " ", record.context.strip()).encode("utf-8")).hexdigest()
    raw = "␟".join([
        context_hash,
        record.keyword.strip().lower(),
        record.style.value,
        re.sub(r"\s+", " ", record.clue.strip()).lower(),
    ])
    return hashlib.sha256(raw.encode("utf-8")).hexdigest()


class ClueStore:
    """Single-writer append log with an in-memory index per open store."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.records_path = self.data_dir / "records.jsonl"
        self._lock = threading.Lock()
        self._records: dict[str, ClueRecord] = {}
        self._tombstoned: set[str] = set()
        self._keys: dict[str, str] = {}  # duplicate key -> id
        self._seq = 0
        self._load()

    def _load(self) -> None:
        if not self.records_path.exists():
            return
        with open(self.records_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                if entry.get("kind") == "tombstone":
                    rid = entry["id"]
                    self._tombstoned.add(rid)
                    record = self._records.get(rid)
                    if record is not None:
                        self._keys.pop(duplicate_key(record), None)
                else:
                    record = ClueRecord.from_dict(entry["record"])
                    previous = self._records.get(record.id)
                    if previous is not None:  # in-place update line
                        self._keys.pop(duplicate_key(previous), None)
                    self._records[record.id] = record
                    self._keys[duplicate_key(record)] = record.id
                    self._seq = max(self._seq, int(record.id[1:]))

    def _append_line(self, payload: dict) -> None:
        with open(self.records_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(payload, ensure_ascii=False) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    # -- write path --

    def append(self, record: ClueRecord) -> str:
        """Durably append one record and return its assigned id."""
        record.check_invariants()
        with self._lock:
            key = duplicate_key(record)
            if key in self._keys:
                raise DuplicateRecord(
                    f"(context, keyword, style, clue) already stored as {self._keys[key]}")
            self._seq += 1
            record.id = f"c{self._seq:06d}"
            self._append_line({"kind": "record", "record": record.as_dict()})
            self._records[record.id] = record
            self._keys[key] = record.id
            return record.id

    def update(self, record: ClueRecord) -> None:
        """Rewrite an existing record in place (decisions, ratings, edits)."""
        if record.id not in self._records or record.id in self._tombstoned:
            raise NotFound(f"no record {record.id}")
        with self._lock:
            old = self._records[record.id]
            old_key = duplicate_key(old)
            new_key = duplicate_key(record)
            owner = self._keys.get(new_key)
            if owner is not None and owner != record.id:
                raise DuplicateRecord(f"edit collides with record {owner}")
            self._append_line({"kind": "record", "record": record.as_dict()})
            self._records[record.id] = record
            self._keys.pop(old_key, None)
            self._keys[new_key] = record.id

    def delete(self, record_id: str) -> None:
        """Tombstone: the id stays burned, exports skip it by default."""
        if record_id not in self._records or record_id in self._tombstoned:
            raise NotFound(f"no record {record_id}")
        with self._lock:
            self._append_line({"kind": "tombstone", "id": record_id})
            self._tombstoned.add(record_id)
            self._keys.pop(duplicate_key(self._records[record_id]), None)

    # -- read path --

    def get(self, record_id: str) -> ClueRecord:
        if record_id not in self._records or record_id in self._tombstoned:
            raise NotFound(f"no record {record_id}")
        return self._records[record_id]

    def find_duplicate(self, record: ClueRecord) -> ClueRecord | None:
        """The live record holding this (context, keyword, style, clue), if any."""
        owner = self._keys.get(duplicate_key(record))
        return self._records[owner] if owner is not None else None

    def records(self, include_tombstoned: bool = False) -> list[ClueRecord]:
        return [r for rid, r in sorted(self._records.items())
                if include_tombstoned or rid not in self._tombstoned]

    def __len__(self) -> int:
        return len(self._records) - len(self._tombstoned)

    # -- import/export --

    def export_jsonl(self, path: str | Path,
                     filter: Callable[[ClueRecord], bool] | None = None,
                     include_tombstoned: bool = False) -> int:
        count = 0
        with open(path, "w", encoding="utf-8") as fh:
            for record in self.records(include_tombstoned=include_tombstoned):
                if filter is not None and not filter(record):
                    continue
                fh.write(json.dumps(record.as_dict(), ensure_ascii=False) + "\n")
                count += 1
        return count

    def import_jsonl(self, path: str | Path, skip_duplicates: bool = False
                     ) -> "ImportResult":
        """Validate and append each line; failures are collected per line
        number, never aborting the rest of the file."""
        imported = 0
        errors: list[SchemaError] = []
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = ClueRecord.from_dict(json.loads(line))
                    record.check_invariants()
                    self.append(record)
                    imported += 1
                except DuplicateRecord:
                    if not skip_duplicates:
                        errors.append(SchemaError(line_no, "duplicate record"))
                except (KeyError, ValueError, TypeError) as exc:
                    errors.append(SchemaError(line_no, str(exc)))
                except Exception as exc:  # invariant violations carry their code
                    errors.append(SchemaError(line_no, str(exc)))
        return ImportResult(imported=imported, errors=errors)


@dataclass(frozen=True)
class ImportResult:
    imported: int
    errors: list[SchemaError] = field(default_factory=list)


def download_published_dataset(dest: str | Path, url: str | None = None,
                               timeout: float = 120.0) -> Path:
    """Fetch the published clue dataset to a local file (network required).

    Hugging Face serves dataset files under ``resolve/main/<filename>``; pass
    a direct file URL when the default guess does not match the repo layout.
    """
    import requests

    target = Path(dest)
    target.parent.mkdir(parents=True, exist_ok=True)
    url = url or f"{PUBLISHED_DATASET_URL}/resolve/main/train.jsonl"
    resp = requests.get(url, timeout=timeout)
    resp.raise_for_status()
    target.write_bytes(resp.content)
    return target


# Column aliases seen across instruct-dataset releases; the published-dataset
# import maps through these. Confirm against the real download before relying
# on it for anything but smoke tests.
_PUBLISHED_ALIASES = {
    "context": ("context", "text", "input", "wiki_text"),
    "keyword": ("keyword", "answer", "solution", "word"),
    "clue": ("clue", "output", "target", "definition"),
    "style": ("style", "clue_type", "type", "structure"),
    "title": ("title", "page", "article"),
    "category": ("category", "topic"),
}


def map_published_row(row: dict) -> dict:
    """Best-effort mapping of one published-dataset row onto the record schema."""
    out: dict = {}
    lowered = {k.lower(): v for k, v in row.items()}
    for field_name, aliases in _PUBLISHED_ALIASES.items():
        for alias in aliases:
            if alias in lowered and lowered[alias] not in (None, ""):
                out[field_name] = lowered[alias]
                break
    if "style" in out:
        try:
            out["style"] = ClueStyle.parse(str(out["style"])).value
        except ValueError:
            out.pop("style")
    out.setdefault("style", ClueStyle.UNRESTRICTED.value)
    return out


# -- statistics --

def compute_stats(records: Sequence[ClueRecord],
                  tokenizer: Tokenizer | None = None) -> DatasetStats:
    """Histograms and ranges with a pluggable tokenizer (whitespace default;
    plug a subword tokenizer to reproduce published token ranges)."""
    if not records:
        raise EmptySet("no records to analyze")
    tokenizer = tokenizer or _whitespace_tokenizer
    ctx_hist: dict[int, int] = {}
    clue_hist: dict[int, int] = {}
    categories: dict[str, int] = {}
    ctx_counts, clue_counts = [], []
    for record in records:
        n_ctx = len(tokenizer(record.context))
        n_clue = len(tokenizer(record.clue))
        ctx_counts.append(n_ctx)
        clue_counts.append(n_clue)
        ctx_bucket = (n_ctx // CONTEXT_BUCKET_WIDTH) * CONTEXT_BUCKET_WIDTH
        clue_bucket = (n_clue // CLUE_BUCKET_WIDTH) * CLUE_BUCKET_WIDTH
        ctx_hist[ctx_bucket] = ctx_hist.get(ctx_bucket, 0) + 1
        clue_hist[clue_bucket] = clue_hist.get(clue_bucket, 0) + 1
        cat = record.category or "(uncategorized)"
        categories[cat] = categories.get(cat, 0) + 1
    return DatasetStats(
        context_token_histogram=ctx_hist,
        clue_token_histogram=clue_hist,
        category_counts=categories,
        min_context_tokens=min(ctx_counts),
        max_context_tokens=max(ctx_counts),
        min_clue_tokens=min(clue_counts),
        max_clue_tokens=max(clue_counts),
        record_count=len(records),
    )


# -- fine-tuning export --

TRAINING_HYPERPARAMETERS = {
    "lora_r": 16,
    "lora_alpha": 32,
    "epochs": 3,
    "batch": 64,
    "lr": 3e-4,
}

_SPLITS = (("train", 0, 90), ("val", 90, 95), ("test", 95, 100))


def split_bucket(record_id: str) -> str:
    """Deterministic 90/5/5 split by id hash."""
    h = int(hashlib.sha256(record_id.encode("utf-8")).hexdigest(), 16) % 100
    for name, lo, hi in _SPLITS:
        if lo <= h < hi:
            return name
    raise AssertionError("unreachable")


def export_training_manifest(records: Iterable[ClueRecord],
                             out_dir: str | Path) -> dict:
    """Write train/val/test chat-format JSONL plus the hyperparameter manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {name: open(out / f"{name}.jsonl", "w", encoding="utf-8")
             for name, _, _ in _SPLITS}
    counts = {name: 0 for name, _, _ in _SPLITS}
    try:
        for record in records:
            sample = {
                "id": record.id,
                "messages": [
                    {"role": "user",
                     "content": render_prompt(record.context, record.keyword, 1,
                                              record.style)},
                    {"role": "assistant", "content": f"1. {record.clue}"},
                ],
            }
            bucket = split_bucket(record.id)
            files[bucket].write(json.dumps(sample, ensure_ascii=False) + "\n")
            counts[bucket] += 1
    finally:
        for fh in files.values():
            fh.close()
    manifest = dict(TRAINING_HYPERPARAMETERS)
    manifest["splits"] = {name: {"fraction": (hi - lo) / 100, "count": counts[name],
                                 "file": f"{name}.jsonl"}
                          for name, lo, hi in _SPLITS}
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, ensure_ascii=False, indent=2) + "\n",
                             encoding="utf-8")
    return manifest
