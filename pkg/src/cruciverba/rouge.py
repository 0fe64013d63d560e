"""ROUGE-1/2/L scoring with Unicode-aware tokenization.

Per-pair scores report precision, recall and F1 (harmonic mean); corpus-level
reports average the per-pair F1 values. The reference side of a clue/context
pair is the full context text.
"""
from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import EmptyCorpus, KeyMismatch

# Letters and digits, underscore excluded; accented letters stay intact.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class CorpusReport:
    mean_rouge1: float
    mean_rouge2: float
    mean_rougeL: float
    pair_count: int

    def as_dict(self) -> dict:
        return {
            "rouge1": self.mean_rouge1,
            "rouge2": self.mean_rouge2,
            "rougeL": self.mean_rougeL,
            "pairs": self.pair_count,
        }


def tokenize(text: str) -> list[str]:
    """Lowercase NFC-normalized words; splits on any non-letter/non-digit."""
    if not text:
        return []
    return _TOKEN_RE.findall(unicodedata.normalize("NFC", text).lower())


def _score(overlap: int, cand_total: int, ref_total: int) -> RougeScore:
    p = overlap / cand_total if cand_total > 0 else 0.0
    r = overlap / ref_total if ref_total > 0 else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return RougeScore(p, r, f1)


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> RougeScore:
    """Clipped n-gram overlap between two token lists."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    overlap = sum((cand & ref).values())
    return _score(overlap, sum(cand.values()), sum(ref.values()))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Token-level longest common subsequence, O(len(a)*len(b))."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """LCS-based score over two token lists."""
    lcs = lcs_length(candidate, reference)
    return _score(lcs, len(candidate), len(reference))


def score_pair(candidate_text: str, reference_text: str) -> dict[str, RougeScore]:
    """ROUGE-1/2/L for one candidate/reference text pair."""
    cand = tokenize(candidate_text)
    ref = tokenize(reference_text)
    return {
        "rouge1": rouge_n(cand, ref, 1),
        "rouge2": rouge_n(cand, ref, 2),
        "rougeL": rouge_l(cand, ref),
    }


def score_corpus(pairs: Iterable[tuple[str, str]]) -> CorpusReport:
    """Mean per-pair F1 over (clue, context) pairs; the context is the reference."""
    sums = {"rouge1": 0.0, "rouge2": 0.0, "rougeL": 0.0}
    count = 0
    for clue, context in pairs:
        for name, score in score_pair(clue, context).items():
            sums[name] += score.f1
        count += 1
    if count == 0:
        raise EmptyCorpus("corpus scoring requires at least one pair")
    return CorpusReport(
        mean_rouge1=sums["rouge1"] / count,
        mean_rouge2=sums["rouge2"] / count,
        mean_rougeL=sums["rougeL"] / count,
        pair_count=count,
    )


def compare_cluesets(set_a: Mapping[str, str], set_b: Mapping[str, str]) -> CorpusReport:
    """Score one model's clues against another's over shared context ids.

    ``set_a`` supplies candidates and ``set_b`` references; both must be keyed
    by exactly the same context ids.
    """
    missing = set(set_a) ^ set(set_b)
    if missing:
        raise KeyMismatch(f"context ids differ between sets: {sorted(missing)[:5]}")
    if not set_a:
        raise EmptyCorpus("clue sets are empty")
    ordered = sorted(set_a)
    return score_corpus((set_a[k], set_b[k]) for k in ordered)
