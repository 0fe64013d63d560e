"""Italian educational crossword pipeline.

Ingests Wikipedia articles, generates syntactically-typed clues through an
LLM endpoint, validates and scores them, persists an instruct-format
dataset, and compiles accepted clues into criss-cross crossword layouts.
"""
from .curation import (CurationConfig, CurationVerdict, filter_article,
                       filter_keyword, rank_articles)
from .gateway import GenerationParams, GenerationTranscript, LLMGateway, generate_clues
from .grid import (BuildResult, CrosswordLayout, Entry, GridConfig, Placement,
                   build, normalize_answer, render, validate_layout)
from .records import ClueRecord
from .rouge import (CorpusReport, RougeScore, compare_cluesets, rouge_l, rouge_n,
                    score_corpus, score_pair, tokenize)
from .store import ClueStore, DatasetStats, compute_stats, export_training_manifest
from .styles import ClueStyle, PromptTemplate, parse_clue_list, render_prompt, style_descriptor
from .validation import (ItalianLexicon, ValidationReport, classify_structure,
                         contains_answer_leak, load_lexicon, rating_codebook, validate)
from .wiki import ArticleRecord, RawArticle, WikiClient, extract_bold_keywords, extract_intro

__version__ = "0.1.0"

__all__ = [
    "ArticleRecord", "BuildResult", "ClueRecord", "ClueStore", "ClueStyle",
    "CorpusReport", "CrosswordLayout", "CurationConfig", "CurationVerdict",
    "DatasetStats", "Entry", "GenerationParams", "GenerationTranscript",
    "GridConfig", "ItalianLexicon", "LLMGateway", "Placement", "PromptTemplate",
    "RawArticle", "RougeScore", "ValidationReport", "WikiClient", "build",
    "classify_structure", "compare_cluesets", "compute_stats",
    "contains_answer_leak", "export_training_manifest", "extract_bold_keywords",
    "extract_intro", "filter_article", "filter_keyword", "generate_clues",
    "load_lexicon", "normalize_answer", "parse_clue_list", "rank_articles",
    "rating_codebook", "render", "render_prompt", "rouge_l", "rouge_n",
    "score_corpus", "score_pair", "style_descriptor", "tokenize", "validate",
    "validate_layout",
]
