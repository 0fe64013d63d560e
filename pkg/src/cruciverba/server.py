"""HTTP API consumed by the review client and scripting users.

All state transitions persist before the response goes out: clue records in
the dataset store, session and puzzle documents as atomically-written JSON
files under ``<data_dir>/sessions``.
"""
from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from . import grid as grid_mod
from .config import PipelineConfig
from .curation import filter_article, filter_keyword
from .errors import (AuthFailure, CruciverbaError, MalformedResponse, NetworkError,
                     NotFound, RateLimited, ReplayMiss, Timeout, UnparseableResponse)
from .gateway import generate_clues
from .records import ClueRecord
from .rouge import score_pair
from .store import ClueStore
from .styles import ClueStyle, style_descriptor
from .validation import (DEFAULT_LEXICON, load_lexicon, rating_codebook, validate)
from .wiki import ArticleRecord

_GATEWAY_ERRORS = (AuthFailure, RateLimited, Timeout, MalformedResponse,
                   NetworkError, ReplayMiss, UnparseableResponse)

PUZZLE_SET_DECISIONS = ("accepted", "edited")


class SessionRequest(BaseModel):
    text: Optional[str] = None
    title: Optional[str] = None


class ClueRequest(BaseModel):
    keyword: str
    styles: list[str] = Field(default_factory=lambda: ["unrestricted"])
    n: int = 3


class DecisionRequest(BaseModel):
    decision: str
    text: Optional[str] = None


class RatingRequest(BaseModel):
    rating: str


def _atomic_write_json(path: Path, payload: dict) -> None:
    tmp = path.with_suffix(f".tmp{os.getpid()}")
    tmp.write_text(json.dumps(payload, ensure_ascii=False, indent=2),
                   encoding="utf-8")
    os.replace(tmp, path)


class _Sessions:
    """Sequentially-numbered session documents, one JSON file each."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _next_id(self, prefix: str) -> str:
        existing = [p.stem for p in self.root.glob(f"{prefix}*.json")]
        seq = 0
        for stem in existing:
            try:
                seq = max(seq, int(stem[1:]))
            except ValueError:
                continue
        return f"{prefix}{seq + 1:06d}"

    def create(self, payload: dict) -> dict:
        with self._lock:
            payload["id"] = self._next_id("s")
            _atomic_write_json(self.root / f"{payload['id']}.json", payload)
        return payload

    def save(self, session: dict) -> None:
        with self._lock:
            _atomic_write_json(self.root / f"{session['id']}.json", session)

    def load(self, session_id: str) -> dict:
        path = self.root / f"{session_id}.json"
        if not path.exists() or not session_id.startswith("s"):
            raise NotFound(f"no session {session_id}")
        return json.loads(path.read_text(encoding="utf-8"))

    def save_puzzle(self, payload: dict) -> dict:
        with self._lock:
            payload["id"] = self._next_id("p")
            _atomic_write_json(self.root / f"{payload['id']}.json", payload)
        return payload

    def load_puzzle(self, puzzle_id: str) -> dict:
        path = self.root / f"{puzzle_id}.json"
        if not path.exists() or not puzzle_id.startswith("p"):
            raise NotFound(f"no puzzle {puzzle_id}")
        return json.loads(path.read_text(encoding="utf-8"))


def _error_status(exc: CruciverbaError) -> int:
    if isinstance(exc, NotFound):
        return 404
    if isinstance(exc, _GATEWAY_ERRORS):
        return 502
    return 400


def create_app(config: PipelineConfig | None = None) -> FastAPI:
    config = config or PipelineConfig()
    app = FastAPI(title="cruciverba", version="0.1.0")
    store = ClueStore(config.data_dir)
    sessions = _Sessions(Path(config.data_dir) / "sessions")
    gateway = config.build_gateway()
    lexicon = load_lexicon(config.lexicon_path) if config.lexicon_path else DEFAULT_LEXICON
    app.state.config = config
    app.state.store = store

    @app.exception_handler(CruciverbaError)
    async def _handle_domain_error(request: Request, exc: CruciverbaError):
        return JSONResponse(status_code=_error_status(exc),
                            content={"error": {"code": exc.code, "message": str(exc)}})

    def _bad_request(code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=400,
                            content={"error": {"code": code, "message": message}})

    def _clue_view(record: ClueRecord) -> dict:
        return record.as_dict()

    def _session_view(session: dict) -> dict:
        clues = [_clue_view(store.get(cid)) for cid in session["clue_ids"]]
        return {**session, "clues": clues}

    def _revalidate(record: ClueRecord) -> ClueRecord:
        report = validate(record.clue, record.keyword,
                          ClueStyle(record.style), lex=lexicon)
        scores = score_pair(record.clue, record.context)
        record.validation = report
        record.rouge1 = scores["rouge1"].f1
        record.rouge2 = scores["rouge2"].f1
        record.rougeL = scores["rougeL"].f1
        return record

    # -- session lifecycle --

    @app.post("/v1/sessions")
    def create_session(req: SessionRequest):
        if bool(req.text) == bool(req.title):
            return _bad_request("BadSource", "provide exactly one of text or title")
        if req.text:
            session = {
                "source_kind": "text", "title": None, "context": req.text,
                "keywords": [], "clue_ids": [], "decisions": {}, "puzzle_id": None,
            }
        else:
            client = config.build_wiki_client()
            article = client.article_record(req.title)
            verdict = filter_article(article, config.curation)
            if not verdict.accepted:
                return _bad_request("CurationRejected",
                                    "article fails curation: " + ", ".join(verdict.reasons))
            session = {
                "source_kind": "title", "title": article.title,
                "context": article.intro_text, "keywords": verdict.kept_keywords,
                "clue_ids": [], "decisions": {}, "puzzle_id": None,
            }
        session = sessions.create(session)
        return _session_view(session)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(sessions.load(session_id))

    # -- clue generation and triage --

    @app.post("/v1/sessions/{session_id}/clues")
    def make_clues(session_id: str, req: ClueRequest):
        session = sessions.load(session_id)
        if not filter_keyword(req.keyword, config.curation):
            return _bad_request("InvalidKeyword",
                                f"keyword {req.keyword!r} fails the keyword filter")
        if not 1 <= req.n <= 10:
            return _bad_request("BadCount", "n must be between 1 and 10")
        try:
            styles = [ClueStyle.parse(s) for s in req.styles]
        except ValueError as exc:
            return _bad_request("UnknownStyle", str(exc))
        if not styles:
            return _bad_request("UnknownStyle", "at least one style is required")
        article = ArticleRecord(
            title=session.get("title") or "(pasted text)",
            intro_text=session["context"], bold_keywords=session["keywords"],
            view_count=0, summary="", categories=[], url="")
        created = []
        for style in styles:
            drafts = generate_clues(article, req.keyword, style, req.n,
                                    config.generation, gateway,
                                    template_dir=config.templates_dir)
            for draft in drafts:
                existing = store.find_duplicate(draft)
                if existing is not None:
                    # regeneration reproduced a stored clue; reuse it
                    record = existing
                else:
                    _revalidate(draft)
                    store.append(draft)
                    record = draft
                if record.id not in session["clue_ids"]:
                    session["clue_ids"].append(record.id)
                created.append(_clue_view(record))
        sessions.save(session)
        return {"session_id": session_id, "clues": created}

    @app.post("/v1/clues/{clue_id}/decision")
    def decide(clue_id: str, req: DecisionRequest):
        record = store.get(clue_id)
        session = _find_session(clue_id)
        if req.decision not in ("accept", "reject", "edit"):
            return _bad_request("BadDecision", "decision must be accept, reject or edit")
        if req.decision == "edit":
            if not req.text or not req.text.strip():
                return _bad_request("BadDecision", "edit requires non-empty text")
            record = record.with_clue(req.text.strip())
            _revalidate(record)
            store.update(record)
            session["decisions"][clue_id] = {"decision": "edited", "text": req.text.strip()}
        else:
            session["decisions"][clue_id] = {"decision": req.decision + "ed"}
        sessions.save(session)
        return {"clue": _clue_view(record),
                "decision": session["decisions"][clue_id]}

    def _find_session(clue_id: str) -> dict:
        for path in sorted(sessions.root.glob("s*.json")):
            session = json.loads(path.read_text(encoding="utf-8"))
            if clue_id in session.get("clue_ids", []):
                return session
        raise NotFound(f"no session holds clue {clue_id}")

    @app.post("/v1/clues/{clue_id}/rating")
    def rate(clue_id: str, req: RatingRequest):
        record = store.get(clue_id)
        codes = [code for code, _ in rating_codebook()]
        if req.rating not in codes:
            return _bad_request("BadRating", f"rating must be one of {codes}")
        record.rating = req.rating
        store.update(record)
        return {"clue": _clue_view(record)}

    # -- puzzle --

    @app.post("/v1/sessions/{session_id}/puzzle")
    def build_puzzle(session_id: str):
        session = sessions.load(session_id)
        chosen = [cid for cid in session["clue_ids"]
                  if session["decisions"].get(cid, {}).get("decision")
                  in PUZZLE_SET_DECISIONS]
        if not chosen:
            return _bad_request("EmptySelection", "no accepted clues in this session")
        try:
            entries = [grid_mod.Entry.from_answer(cid, store.get(cid).keyword,
                                                  store.get(cid).clue)
                       for cid in chosen]
        except ValueError as exc:
            return _bad_request("BadAnswer", str(exc))
        result = grid_mod.build(entries, config.grid)
        layout_doc = json.loads(grid_mod.render(result.layout, entries, "json"))
        puzzle = sessions.save_puzzle({
            "session_id": session_id,
            "entries": [{"id": e.id, "answer_display": e.answer_display,
                         "answer_grid": e.answer_grid, "clue": e.clue}
                        for e in entries],
            "placements": [{"entry_id": p.entry_id, "row": p.row, "col": p.col,
                            "direction": p.direction}
                           for p in result.layout.placements],
            "intersections": [{"a": a, "b": b, "row": cell[0], "col": cell[1]}
                              for a, b, cell in result.layout.intersections],
            "width": result.layout.width, "height": result.layout.height,
            "unplaced": result.unplaced,
            "budget_exhausted": result.budget_exhausted,
        })
        session["puzzle_id"] = puzzle["id"]
        sessions.save(session)
        return {"puzzle_id": puzzle["id"], "layout": layout_doc,
                "unplaced": result.unplaced,
                "budget_exhausted": result.budget_exhausted}

    def _rebuild(puzzle: dict) -> tuple[grid_mod.CrosswordLayout, list[grid_mod.Entry]]:
        entries = [grid_mod.Entry(id=e["id"], answer_display=e["answer_display"],
                                  answer_grid=e["answer_grid"], clue=e["clue"])
                   for e in puzzle["entries"]]
        layout = grid_mod.CrosswordLayout(
            width=puzzle["width"], height=puzzle["height"],
            placements=[grid_mod.Placement(**p) for p in puzzle["placements"]],
            intersections=[(i["a"], i["b"], (i["row"], i["col"]))
                           for i in puzzle["intersections"]],
        )
        return layout, entries

    @app.get("/v1/puzzles/{puzzle_id}")
    def get_puzzle(puzzle_id: str, format: str = "meta"):
        puzzle = sessions.load_puzzle(puzzle_id)
        layout, entries = _rebuild(puzzle)
        if format == "meta":
            doc = json.loads(grid_mod.render(layout, entries, "json"))
            return {"puzzle_id": puzzle_id, "session_id": puzzle["session_id"],
                    "layout": doc, "unplaced": puzzle["unplaced"],
                    "budget_exhausted": puzzle["budget_exhausted"]}
        if format == "json":
            return Response(content=grid_mod.render(layout, entries, "json"),
                            media_type="application/json")
        if format == "text":
            return PlainTextResponse(grid_mod.render(layout, entries, "text"))
        if format == "html":
            return HTMLResponse(grid_mod.render(layout, entries, "html"))
        return _bad_request("BadFormat", "format must be meta, text, json or html")

    # -- reference data for the client --

    @app.get("/v1/styles")
    def styles_info():
        return [{"style": s.value, "descriptor": style_descriptor(s)}
                for s in ClueStyle]

    @app.get("/v1/ratings")
    def ratings_info():
        return [{"code": code, "description": desc}
                for code, desc in rating_codebook()]

    # serve the built review client when present, so one process covers both
    if config.ui_dir and Path(config.ui_dir, "index.html").exists():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
