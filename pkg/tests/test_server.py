import json

import pytest
from fastapi.testclient import TestClient

from cruciverba.config import GatewayConfig, PipelineConfig, WikiConfig
from cruciverba.server import create_app

from .conftest import GOLDEN_DIR, seed_wiki_cache
from .e2e_scenario import (E2E_CONTEXT, E2E_KEYWORD, E2E_N, E2E_STYLES,
                           FIXTURE_DIR, run_replay_pipeline, write_fixtures)


@pytest.fixture()
def client(tmp_path) -> TestClient:
    config = PipelineConfig()
    config.data_dir = str(tmp_path / "data")
    config.gateway = GatewayConfig(mode="replay", fixture_dir=str(FIXTURE_DIR))
    config.wiki = WikiConfig(cache_dir=str(tmp_path / "cache"))
    app = create_app(config)
    return TestClient(app, raise_server_exceptions=False)


def start_session(client, text=E2E_CONTEXT):
    resp = client.post("/v1/sessions", json={"text": text})
    assert resp.status_code == 200, resp.text
    return resp.json()


def gen_three_clues(client, session_id):
    resp = client.post(f"/v1/sessions/{session_id}/clues", json={
        "keyword": E2E_KEYWORD, "styles": [s.value for s in E2E_STYLES], "n": E2E_N})
    assert resp.status_code == 200, resp.text
    return resp.json()["clues"]


class TestSessions:
    def test_text_session(self, client):
        session = start_session(client)
        assert session["id"].startswith("s")
        assert session["context"] == E2E_CONTEXT
        assert session["clues"] == []

    def test_both_or_neither_source_rejected(self, client):
        assert client.post("/v1/sessions", json={}).status_code == 400
        resp = client.post("/v1/sessions", json={"text": "x", "title": "y"})
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "BadSource"

    def test_title_session_uses_cache_and_curation(self, tmp_path, uzbekistan_html):
        config = PipelineConfig()
        config.data_dir = str(tmp_path / "data")
        config.gateway = GatewayConfig(mode="replay", fixture_dir=str(FIXTURE_DIR))
        config.wiki = WikiConfig(cache_dir=str(tmp_path / "cache"))
        seed_wiki_cache(tmp_path / "cache", "Uzbekistan", uzbekistan_html)
        client = TestClient(create_app(config), raise_server_exceptions=False)
        resp = client.post("/v1/sessions", json={"title": "Uzbekistan"})
        assert resp.status_code == 200, resp.text
        body = resp.json()
        assert body["source_kind"] == "title"
        assert "Uzbekistan" in body["keywords"]

    def test_title_session_curation_rejection(self, tmp_path):
        config = PipelineConfig()
        config.data_dir = str(tmp_path / "data")
        config.gateway = GatewayConfig(mode="replay", fixture_dir=str(FIXTURE_DIR))
        config.wiki = WikiConfig(cache_dir=str(tmp_path / "cache"))
        seed_wiki_cache(tmp_path / "cache", "Corto",
                        "<p><b>Corto</b> ha poche parole.</p>")
        client = TestClient(create_app(config), raise_server_exceptions=False)
        resp = client.post("/v1/sessions", json={"title": "Corto"})
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "CurationRejected"
        assert "TooShort" in resp.json()["error"]["message"]

    def test_get_session_reconstructs_view(self, client):
        session = start_session(client)
        gen_three_clues(client, session["id"])
        view = client.get(f"/v1/sessions/{session['id']}").json()
        assert len(view["clues"]) == 3
        assert all(c["validation"] is not None for c in view["clues"])

    def test_unknown_session_404(self, client):
        assert client.get("/v1/sessions/s999999").status_code == 404


class TestClueGeneration:
    def test_three_styles_with_validation_and_rouge(self, client):
        session = start_session(client)
        clues = gen_three_clues(client, session["id"])
        assert [c["style"] for c in clues] == [s.value for s in E2E_STYLES]
        for clue in clues:
            assert clue["validation"]["passed"] is True
            assert clue["validation"]["style_matches_request"] is True
            assert 0.0 <= clue["rougeL"] <= 1.0
            assert clue["id"].startswith("c")

    def test_invalid_keyword(self, client):
        session = start_session(client)
        resp = client.post(f"/v1/sessions/{session['id']}/clues",
                           json={"keyword": "R2-D2", "styles": ["unrestricted"], "n": 1})
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "InvalidKeyword"

    def test_unknown_style(self, client):
        session = start_session(client)
        resp = client.post(f"/v1/sessions/{session['id']}/clues",
                           json={"keyword": E2E_KEYWORD, "styles": ["haiku"], "n": 1})
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "UnknownStyle"

    def test_replay_miss_maps_to_502(self, client):
        session = start_session(client, text="Testo senza fixture registrata.")
        resp = client.post(f"/v1/sessions/{session['id']}/clues", json={
            "keyword": E2E_KEYWORD, "styles": ["unrestricted"], "n": 1})
        assert resp.status_code == 502
        assert resp.json()["error"]["code"] == "ReplayMiss"

    def test_regenerate_reuses_stored_duplicate(self, client):
        session = start_session(client)
        first = gen_three_clues(client, session["id"])
        resp = client.post(f"/v1/sessions/{session['id']}/clues", json={
            "keyword": E2E_KEYWORD, "styles": [E2E_STYLES[0].value], "n": E2E_N})
        assert resp.status_code == 200, resp.text
        again = resp.json()["clues"]
        assert again[0]["id"] == first[0]["id"]
        view = client.get(f"/v1/sessions/{session['id']}").json()
        assert len(view["clues"]) == 3  # no duplicate entry in the session


class TestDecisionsAndRatings:
    def test_accept_reject_flow(self, client):
        session = start_session(client)
        clues = gen_three_clues(client, session["id"])
        resp = client.post(f"/v1/clues/{clues[0]['id']}/decision",
                           json={"decision": "accept"})
        assert resp.status_code == 200
        assert resp.json()["decision"] == {"decision": "accepted"}
        resp = client.post(f"/v1/clues/{clues[1]['id']}/decision",
                           json={"decision": "reject"})
        assert resp.json()["decision"] == {"decision": "rejected"}

    def test_unknown_clue_404(self, client):
        resp = client.post("/v1/clues/c999999/decision", json={"decision": "accept"})
        assert resp.status_code == 404

    def test_edit_revalidates_and_flags_leak(self, client):
        session = start_session(client)
        clues = gen_three_clues(client, session["id"])
        resp = client.post(f"/v1/clues/{clues[0]['id']}/decision", json={
            "decision": "edit",
            "text": "Lo stato dell'Uzbekistan con capitale Tashkent"})
        assert resp.status_code == 200
        body = resp.json()
        assert body["clue"]["validation"]["answer_leak"] is True
        assert body["clue"]["validation"]["passed"] is False
        assert body["decision"]["decision"] == "edited"

    def test_edit_requires_text(self, client):
        session = start_session(client)
        clues = gen_three_clues(client, session["id"])
        resp = client.post(f"/v1/clues/{clues[0]['id']}/decision",
                           json={"decision": "edit"})
        assert resp.status_code == 400

    def test_rating_stored_and_validated(self, client):
        session = start_session(client)
        clues = gen_three_clues(client, session["id"])
        resp = client.post(f"/v1/clues/{clues[0]['id']}/rating", json={"rating": "A"})
        assert resp.json()["clue"]["rating"] == "A"
        resp = client.post(f"/v1/clues/{clues[0]['id']}/rating", json={"rating": "F"})
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "BadRating"


class TestPuzzle:
    def test_empty_selection(self, client):
        session = start_session(client)
        gen_three_clues(client, session["id"])
        resp = client.post(f"/v1/sessions/{session['id']}/puzzle")
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "EmptySelection"

    def test_accept_two_build_and_render(self, client):
        session = start_session(client)
        clues = gen_three_clues(client, session["id"])
        for clue in (clues[0], clues[2]):
            client.post(f"/v1/clues/{clue['id']}/decision", json={"decision": "accept"})
        client.post(f"/v1/clues/{clues[1]['id']}/decision", json={"decision": "reject"})
        resp = client.post(f"/v1/sessions/{session['id']}/puzzle")
        assert resp.status_code == 200, resp.text
        body = resp.json()
        assert body["unplaced"] == []
        assert len(body["layout"]["across"]) + len(body["layout"]["down"]) == 2
        for fmt, check in (("text", lambda t: "Across" in t),
                           ("json", lambda t: json.loads(t)["version"] == 1),
                           ("html", lambda t: t.startswith("<!DOCTYPE html>"))):
            got = client.get(f"/v1/puzzles/{body['puzzle_id']}", params={"format": fmt})
            assert got.status_code == 200
            check(got.text)

    def test_unknown_puzzle_404(self, client):
        assert client.get("/v1/puzzles/p999999").status_code == 404


class TestReferenceData:
    def test_styles_listing(self, client):
        styles = client.get("/v1/styles").json()
        assert len(styles) == 4
        assert all(s["descriptor"] for s in styles)

    def test_ratings_listing(self, client):
        ratings = client.get("/v1/ratings").json()
        assert [r["code"] for r in ratings] == ["A", "B", "C", "D", "E"]

    def test_ui_dir_served_when_configured(self, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<!DOCTYPE html><title>rc</title>",
                                       encoding="utf-8")
        config = PipelineConfig()
        config.data_dir = str(tmp_path / "data")
        config.gateway = GatewayConfig(mode="replay", fixture_dir=str(FIXTURE_DIR))
        config.ui_dir = str(ui)
        client = TestClient(create_app(config), raise_server_exceptions=False)
        resp = client.get("/")
        assert resp.status_code == 200
        assert "rc" in resp.text
        assert client.get("/v1/styles").status_code == 200


class TestEndToEndReplay:
    """text -> gen(3 styles) -> validate -> accept subset -> build -> render,
    against pinned fixtures, producing byte-identical golden outputs."""

    def test_fixtures_are_pinned(self):
        # regenerating fixture content must agree byte-for-byte with the
        # checked-in files: templates and fixtures move together
        for path in write_fixtures(FIXTURE_DIR):
            assert path.exists()

    def test_two_runs_identical(self, tmp_path):
        first = run_replay_pipeline(tmp_path / "one")
        second = run_replay_pipeline(tmp_path / "two")
        assert first == second

    def test_matches_goldens(self, tmp_path):
        outputs = run_replay_pipeline(tmp_path / "run")
        for fmt, suffix in (("text", "txt"), ("json", "json"), ("html", "html")):
            golden = (GOLDEN_DIR / f"e2e_puzzle.{suffix}").read_bytes()
            assert outputs[fmt] == golden, f"{fmt} render deviates from golden"
