from __future__ import annotations

import json
from pathlib import Path

import pytest

from fivew1h.baseline import (
    BaselineParseError,
    BaselineParticipant,
    build_prompt,
    parse_baseline_answer,
    quotation_report,
    run_baseline,
)
from fivew1h.config import load_baseline_example
from fivew1h.document import QUESTIONS, RawArticle

DATA_DIR = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="module")
def example():
    return load_baseline_example(DATA_DIR / "baseline_example.json")


@pytest.fixture()
def article():
    return RawArticle(id="cible", title="Un titre", body="Un corps d'article en français.")


WELL_FORMED = json.dumps({
    "who": ["Hydro-Québec"],
    "what": ["a rétabli le courant"],
    "where": ["Montréal"],
    "when": ["lundi"],
    "why": ["la tempête de verglas"],
    "how": ["en remplaçant les câbles"],
}, ensure_ascii=False)


def test_build_prompt_contains_literal_instruction(article, example):
    bundle = build_prompt(article, example)
    assert "Provide direct quotations from the text" in bundle.prompt
    assert article.body in bundle.prompt
    assert example.article.body in bundle.prompt
    assert '"who": []' in bundle.prompt


def test_build_prompt_is_pure_concatenation(article, example):
    bundle = build_prompt(article, example)
    # no truncation: every component appears in full
    for piece in (example.article.title, example.article.body, article.title, article.body):
        assert piece in bundle.prompt


def test_build_prompt_rejects_empty_body(example):
    empty = RawArticle(id="vide", title="t", body="")
    with pytest.raises(Exception, match="empty body"):
        build_prompt(empty, example)


def test_parse_well_formed():
    answer = parse_baseline_answer(WELL_FORMED)
    assert answer.answers("who") == ["Hydro-Québec"]
    assert set(answer.by_question) == set(QUESTIONS)


def test_parse_fenced():
    fenced = f"```json\n{WELL_FORMED}\n```"
    assert parse_baseline_answer(fenced).answers("where") == ["Montréal"]


def test_parse_missing_key_is_error():
    broken = json.loads(WELL_FORMED)
    del broken["how"]
    with pytest.raises(BaselineParseError, match="how") as err:
        parse_baseline_answer(json.dumps(broken))
    assert err.value.raw  # raw text retained for audit


def test_parse_scalar_coerced_to_list():
    payload = json.loads(WELL_FORMED)
    payload["who"] = "Hydro-Québec"
    assert parse_baseline_answer(json.dumps(payload)).answers("who") == ["Hydro-Québec"]


def test_parse_never_partial():
    with pytest.raises(BaselineParseError):
        parse_baseline_answer("pas du json")


class EchoClient:
    def __init__(self, responses: dict[str, str] | str):
        self.responses = responses
        self.calls = 0

    def complete(self, prompt: str) -> str:
        self.calls += 1
        if isinstance(self.responses, str):
            return self.responses
        for key, value in self.responses.items():
            if key in prompt:
                return value
        raise RuntimeError("no scripted response")


def test_run_baseline_cold_then_warm(tmp_path, example):
    articles = [RawArticle(id="a1", title="T1", body="Corps un."),
                RawArticle(id="a2", title="T2", body="Corps deux.")]
    client = EchoClient(WELL_FORMED)
    first = run_baseline(articles, client, tmp_path, example)
    assert client.calls == 2
    assert all(result.ok and not result.cached for result in first.values())

    # warm cache: zero client calls, byte-identical parse
    second = run_baseline(articles, client, tmp_path, example)
    assert client.calls == 2
    assert all(result.cached for result in second.values())
    assert {k: v.answer for k, v in first.items()} == {k: v.answer for k, v in second.items()}


def test_run_baseline_raw_response_stored_verbatim(tmp_path, example):
    raw = f"```json\n{WELL_FORMED}\n```"
    articles = [RawArticle(id="a1", title="T1", body="Corps un.")]
    run_baseline(articles, EchoClient(raw), tmp_path, example)
    assert (tmp_path / "a1.txt").read_text(encoding="utf-8") == raw


def test_run_baseline_isolates_failures(tmp_path, example):
    articles = [RawArticle(id="bon", title="T", body="Corps."),
                RawArticle(id="mauvais", title="T", body="Autre corps.")]

    class FlakyClient:
        def complete(self, prompt: str) -> str:
            if "Autre corps." in prompt:
                raise RuntimeError("quota exceeded")
            return WELL_FORMED

    results = run_baseline(articles, FlakyClient(), tmp_path, example)
    assert results["bon"].ok
    assert not results["mauvais"].ok
    assert "quota" in results["mauvais"].error


def test_run_baseline_cold_cache_without_client(tmp_path):
    articles = [RawArticle(id="a1", title="T", body="Corps.")]
    results = run_baseline(articles, None, tmp_path)
    assert not results["a1"].ok


def test_quotation_report_flags_non_verbatim(article):
    answer = parse_baseline_answer(WELL_FORMED)
    report = quotation_report(article, answer)
    assert "who" in report  # nothing from WELL_FORMED occurs in this article


def test_run_baseline_parallel_replay_matches_sequential(tmp_path, example):
    articles = [RawArticle(id=f"a{i}", title="T", body=f"Corps {i}.") for i in range(6)]
    run_baseline(articles, EchoClient(WELL_FORMED), tmp_path, example)
    sequential = run_baseline(articles, None, tmp_path, jobs=1)
    parallel = run_baseline(articles, None, tmp_path, jobs=3)
    assert {k: v.answer for k, v in sequential.items()} == {k: v.answer for k, v in parallel.items()}


def test_baseline_participant(tmp_path, example):
    articles = [RawArticle(id="a1", title="T", body="Corps.")]
    results = run_baseline(articles, EchoClient(WELL_FORMED), tmp_path, example)
    participant = BaselineParticipant(results)
    assert participant.answers("a1", "who") == ["Hydro-Québec"]
    assert participant.answers("inconnu", "who") is None
