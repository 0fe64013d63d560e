import json

import pytest

from cruciverba.errors import (AuthFailure, EmptyContext, MalformedResponse,
                               RateLimited, ReplayMiss, UnparseableResponse)
from cruciverba.gateway import (GenerationParams, LLMGateway, generate_clues,
                                request_fingerprint)
from cruciverba.styles import ClueStyle

from .conftest import FakeResponse, FakeSession, make_article


def chat_response(text: str) -> FakeResponse:
    return FakeResponse(payload={"choices": [{"message": {"content": text}}]})


def write_fixture(fixture_dir, prompt: str, params: GenerationParams, text: str):
    fixture_dir.mkdir(parents=True, exist_ok=True)
    key = request_fingerprint(prompt, params)
    (fixture_dir / f"{key}.json").write_text(
        json.dumps({"prompt": prompt, "response_text": text}, ensure_ascii=False),
        encoding="utf-8")


class TestGenerationParams:
    def test_defaults_match_reference_inference_setup(self):
        params = GenerationParams()
        assert params.temperature == 0.1
        assert params.top_p == 0.95
        assert params.top_k == 50

    def test_validation(self):
        with pytest.raises(ValueError):
            GenerationParams(temperature=-1)
        with pytest.raises(ValueError):
            GenerationParams(top_p=0)
        with pytest.raises(ValueError):
            GenerationParams(max_tokens=0)


class TestGenerate:
    def test_live_call_builds_chat_body(self, tmp_path):
        session = FakeSession([chat_response("1. prima\n2. seconda")])
        gw = LLMGateway(endpoint="https://llm.example/v1/chat", api_key="sk-x",
                        session=session, transcript_path=tmp_path / "t.jsonl")
        transcript = gw.generate("un prompt", GenerationParams())
        assert transcript.raw_response == "1. prima\n2. seconda"
        body = session.calls[0]["json"]
        assert body["messages"] == [{"role": "user", "content": "un prompt"}]
        assert body["temperature"] == 0.1
        assert "top_k" not in body
        headers = session.calls[0]["headers"]
        assert headers["Authorization"] == "Bearer sk-x"

    def test_top_k_sent_when_endpoint_supports_it(self, tmp_path):
        session = FakeSession([chat_response("x")])
        gw = LLMGateway(endpoint="https://llm.example", session=session,
                        send_top_k=True)
        gw.generate("p", GenerationParams())
        assert session.calls[0]["json"]["top_k"] == 50

    def test_auth_failure_is_terminal(self):
        session = FakeSession([FakeResponse(status_code=401)])
        gw = LLMGateway(endpoint="https://llm.example", session=session)
        with pytest.raises(AuthFailure):
            gw.generate("p", GenerationParams())
        assert len(session.calls) == 1  # no retry

    def test_429_twice_then_success(self):
        session = FakeSession([FakeResponse(status_code=429),
                               FakeResponse(status_code=429),
                               chat_response("ok")])
        gw = LLMGateway(endpoint="https://llm.example", session=session,
                        sleeper=lambda s: None)
        transcript = gw.generate("p", GenerationParams())
        assert transcript.raw_response == "ok"
        assert transcript.retries == 2

    def test_rate_limit_exhausted(self):
        session = FakeSession([FakeResponse(status_code=429)] * 3)
        gw = LLMGateway(endpoint="https://llm.example", session=session,
                        sleeper=lambda s: None)
        with pytest.raises(RateLimited):
            gw.generate("p", GenerationParams())

    def test_malformed_response(self):
        session = FakeSession([FakeResponse(payload={"unexpected": True})])
        gw = LLMGateway(endpoint="https://llm.example", session=session)
        with pytest.raises(MalformedResponse):
            gw.generate("p", GenerationParams())

    def test_replay_mode_round_trip(self, tmp_path):
        params = GenerationParams()
        write_fixture(tmp_path / "fx", "il prompt", params, "1. risposta fissa")
        gw = LLMGateway(mode="replay", fixture_dir=tmp_path / "fx")
        first = gw.generate("il prompt", params)
        second = gw.generate("il prompt", params)
        assert first.raw_response == second.raw_response == "1. risposta fissa"

    def test_replay_miss(self, tmp_path):
        gw = LLMGateway(mode="replay", fixture_dir=tmp_path / "fx")
        with pytest.raises(ReplayMiss):
            gw.generate("prompt mai registrato", GenerationParams())

    def test_record_mode_writes_fixture(self, tmp_path):
        session = FakeSession([chat_response("testo registrato")])
        gw = LLMGateway(endpoint="https://llm.example", session=session,
                        mode="record", fixture_dir=tmp_path / "fx")
        gw.generate("da registrare", GenerationParams())
        replay = LLMGateway(mode="replay", fixture_dir=tmp_path / "fx")
        assert replay.generate("da registrare",
                               GenerationParams()).raw_response == "testo registrato"

    def test_request_logged_before_send(self, tmp_path):
        class Boom(Exception):
            pass

        class ExplodingSession:
            def post(self, *a, **k):
                raise Boom("transport died")

        log_path = tmp_path / "transcripts.jsonl"
        gw = LLMGateway(endpoint="https://llm.example", session=ExplodingSession(),
                        transcript_path=log_path, retries=1, sleeper=lambda s: None)
        with pytest.raises(Exception):
            gw.generate("prompt audit", GenerationParams())
        lines = [json.loads(l) for l in log_path.read_text().splitlines()]
        assert lines[0]["kind"] == "request"
        assert all(l["kind"] != "response" for l in lines)

    def test_every_response_has_logged_request(self, tmp_path):
        log_path = tmp_path / "transcripts.jsonl"
        session = FakeSession([chat_response("a"), chat_response("b")])
        gw = LLMGateway(endpoint="https://llm.example", session=session,
                        transcript_path=log_path)
        gw.generate("uno", GenerationParams())
        gw.generate("due", GenerationParams())
        lines = [json.loads(l) for l in log_path.read_text().splitlines()]
        requests_seen = {l["key"] for l in lines if l["kind"] == "request"}
        responses_seen = {l["key"] for l in lines if l["kind"] == "response"}
        assert responses_seen <= requests_seen

    def test_empty_prompt_rejected(self):
        gw = LLMGateway(endpoint="https://llm.example", session=FakeSession([]))
        with pytest.raises(ValueError):
            gw.generate("  ", GenerationParams())

    def test_params_not_mutated(self, tmp_path):
        params = GenerationParams()
        write_fixture(tmp_path / "fx", "p", params, "x")
        gw = LLMGateway(mode="replay", fixture_dir=tmp_path / "fx")
        gw.generate("p", params)
        assert params == GenerationParams()


class TestGenerateClues:
    def _replay_gateway(self, tmp_path, article, keyword, style, n, response):
        from cruciverba.styles import render_prompt
        prompt = render_prompt(article.intro_text, keyword, n, style)
        params = GenerationParams()
        write_fixture(tmp_path / "fx", prompt, params, response)
        return LLMGateway(mode="replay", fixture_dir=tmp_path / "fx"), params

    def test_three_drafts_with_style_tag(self, tmp_path):
        article = make_article()
        gw, params = self._replay_gateway(
            tmp_path, article, "Uzbekistan", ClueStyle.DEFINITE_DETERMINER_PHRASE, 3,
            "1. La repubblica asiatica con capitale Tashkent\n"
            "2. Lo stato doppiamente privo di sbocco al mare\n"
            "3. La repubblica attraversata dall'Amu Darya")
        drafts = generate_clues(article, "Uzbekistan",
                                ClueStyle.DEFINITE_DETERMINER_PHRASE, 3, params, gw)
        assert len(drafts) == 3
        assert all(d.style is ClueStyle.DEFINITE_DETERMINER_PHRASE for d in drafts)
        assert all(d.keyword == "Uzbekistan" for d in drafts)
        assert drafts[0].clue == "La repubblica asiatica con capitale Tashkent"
        assert all(d.validation is None and d.rating is None for d in drafts)

    def test_shortfall_flagged(self, tmp_path, caplog):
        article = make_article()
        gw, params = self._replay_gateway(
            tmp_path, article, "Uzbekistan", ClueStyle.UNRESTRICTED, 3,
            "1. unica definizione prodotta")
        with caplog.at_level("WARNING"):
            drafts = generate_clues(article, "Uzbekistan", ClueStyle.UNRESTRICTED,
                                    3, params, gw)
        assert len(drafts) == 1
        assert any("1 of 3" in r.message for r in caplog.records)

    def test_empty_context_fails_before_network(self, tmp_path):
        article = make_article(intro="")
        gw = LLMGateway(mode="replay", fixture_dir=tmp_path / "fx")
        with pytest.raises(EmptyContext):
            generate_clues(article, "Uzbekistan", ClueStyle.UNRESTRICTED, 3,
                           GenerationParams(), gw)

    def test_unparseable_response_propagates(self, tmp_path):
        article = make_article()
        gw, params = self._replay_gateway(
            tmp_path, article, "Uzbekistan", ClueStyle.UNRESTRICTED, 3, "???")
        with pytest.raises(UnparseableResponse):
            generate_clues(article, "Uzbekistan", ClueStyle.UNRESTRICTED, 3,
                           params, gw)
