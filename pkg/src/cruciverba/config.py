"""Pipeline configuration: one YAML file covering curation, generation,
gateway, grid, and storage settings, with env-var overrides for credentials.

Env vars: ``CRUCIVERBA_LLM_BASE_URL``, ``CRUCIVERBA_LLM_API_KEY``,
``CRUCIVERBA_LLM_MODEL``, ``CRUCIVERBA_WIKI_API``, ``CRUCIVERBA_PAGEVIEWS_API``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .curation import CurationConfig
from .gateway import MODE_LIVE, GenerationParams, LLMGateway
from .grid import GridConfig
from .wiki import WikiClient


@dataclass
class GatewayConfig:
    mode: str = MODE_LIVE
    endpoint: str = ""
    api_key: str | None = None
    fixture_dir: str | None = None
    transcript_path: str | None = None
    send_top_k: bool = False


@dataclass
class WikiConfig:
    api_base: str | None = None
    pageviews_base: str | None = None
    cache_dir: str = "cache"
    user_agent: str | None = None


@dataclass
class PipelineConfig:
    data_dir: str = "data"
    curation: CurationConfig = field(default_factory=CurationConfig)
    generation: GenerationParams = field(default_factory=GenerationParams)
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    wiki: WikiConfig = field(default_factory=WikiConfig)
    templates_dir: str | None = None
    lexicon_path: str | None = None
    ui_dir: str | None = None
    n_clues_default: int = 3

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        cfg = cls()
        cfg.data_dir = data.get("data_dir", cfg.data_dir)
        cfg.templates_dir = data.get("templates_dir")
        cfg.lexicon_path = data.get("lexicon_path")
        cfg.ui_dir = data.get("ui_dir")
        cfg.n_clues_default = int(data.get("n_clues_default", cfg.n_clues_default))
        if "curation" in data:
            cfg.curation = CurationConfig(**data["curation"])
        if "generation" in data:
            cfg.generation = GenerationParams(**data["generation"])
        if "gateway" in data:
            cfg.gateway = GatewayConfig(**data["gateway"])
        if "grid" in data:
            cfg.grid = GridConfig(**data["grid"])
        if "wiki" in data:
            cfg.wiki = WikiConfig(**data["wiki"])
        return cfg

    @classmethod
    def load(cls, path: str | Path | None) -> "PipelineConfig":
        if path is None:
            return cls()
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        return cls.from_dict(data)

    def build_gateway(self) -> LLMGateway:
        endpoint = os.environ.get("CRUCIVERBA_LLM_BASE_URL", self.gateway.endpoint)
        api_key = os.environ.get("CRUCIVERBA_LLM_API_KEY", self.gateway.api_key)
        model = os.environ.get("CRUCIVERBA_LLM_MODEL")
        if model:
            self.generation = GenerationParams(
                temperature=self.generation.temperature, top_p=self.generation.top_p,
                top_k=self.generation.top_k, max_tokens=self.generation.max_tokens,
                model_id=model)
        transcript = self.gateway.transcript_path or str(
            Path(self.data_dir) / "transcripts.jsonl")
        return LLMGateway(
            endpoint=endpoint, api_key=api_key, mode=self.gateway.mode,
            fixture_dir=self.gateway.fixture_dir, transcript_path=transcript,
            send_top_k=self.gateway.send_top_k,
        )

    def build_wiki_client(self) -> WikiClient:
        kwargs: dict = {
            "cache_dir": self.wiki.cache_dir,
            "api_base": self.wiki.api_base,
            "pageviews_base": self.wiki.pageviews_base,
        }
        if self.wiki.user_agent:
            kwargs["user_agent"] = self.wiki.user_agent
        return WikiClient(**kwargs)
