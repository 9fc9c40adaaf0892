"""One-shot chat-completion baseline: prompt assembly, answer parsing, and a
cache-first runner so comparisons replay byte-identically without network.

The chat client is a minimal contract (endpoint, model, temperature 0, one
user message); the concrete model is configuration, not code. Raw responses
are cached verbatim per article id before any parsing, so a warm cache
makes the whole run deterministic and offline.
"""

from __future__ import annotations

import json
import logging
import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import requests

from .document import QUESTIONS, RawArticle

log = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent / "data"

_ANSWER_TEMPLATE = json.dumps({q: [] for q in ("who", "what", "where", "when", "why", "how")}, indent=4)

_FENCE_RE = re.compile(r"^```[a-zA-Z]*\s*\n(.*)\n```\s*$", re.DOTALL)


class BaselineError(Exception):
    pass


class BaselineParseError(BaselineError):
    """Unusable model output; keeps the raw text for audit."""

    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


@dataclass(frozen=True)
class ExampleArticle:
    article: RawArticle
    answers: dict[str, list[str]]


@dataclass(frozen=True)
class PromptBundle:
    instructions: str
    example: ExampleArticle
    target: RawArticle
    prompt: str


@dataclass(frozen=True)
class BaselineAnswer:
    by_question: dict[str, list[str]]

    def answers(self, question: str) -> list[str]:
        return self.by_question[question]


def load_instruction_template(path: str | Path | None = None) -> str:
    path = Path(path) if path else DATA_DIR / "baseline_prompt.txt"
    return path.read_text(encoding="utf-8")


def _render_article(article: RawArticle) -> str:
    return f"{article.title}\n\n{article.body}"


def build_prompt(article: RawArticle, example: ExampleArticle,
                 template: str | None = None) -> PromptBundle:
    """Assemble the one-shot prompt around the target article. No truncation."""
    if not article.body:
        raise BaselineError(f"article {article.id!r} has an empty body")
    if not example.article.body or not example.answers:
        raise BaselineError("one-shot example needs both an article and its answers")
    template = template if template is not None else load_instruction_template()
    prompt = template.format(
        example_article=_render_article(example.article),
        example_answers=json.dumps(example.answers, ensure_ascii=False, indent=4),
        article=_render_article(article),
        answer_template=_ANSWER_TEMPLATE,
    )
    return PromptBundle(instructions=template, example=example, target=article, prompt=prompt)


def parse_baseline_answer(raw: str) -> BaselineAnswer:
    """Strict parse of the JSON answer object; tolerates code fences only."""
    text = raw.strip()
    fenced = _FENCE_RE.match(text)
    if fenced:
        text = fenced.group(1).strip()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BaselineParseError(f"response is not valid JSON: {exc}", raw) from exc
    if not isinstance(obj, dict):
        raise BaselineParseError("response JSON is not an object", raw)
    missing = set(QUESTIONS) - set(obj)
    extra = set(obj) - set(QUESTIONS)
    if missing:
        raise BaselineParseError(f"response object missing key(s) {sorted(missing)}", raw)
    if extra:
        raise BaselineParseError(f"response object has unexpected key(s) {sorted(extra)}", raw)
    by_question: dict[str, list[str]] = {}
    for question in QUESTIONS:
        value = obj[question]
        if isinstance(value, str):
            value = [value]
        if not isinstance(value, list):
            raise BaselineParseError(f"value for {question!r} is neither string nor list", raw)
        by_question[question] = [str(item) for item in value]
    return BaselineAnswer(by_question=by_question)


class ChatClient(Protocol):
    def complete(self, prompt: str) -> str: ...


class HttpChatClient:
    """Generic chat-completion HTTP client: one user message, temperature 0."""

    def __init__(self, endpoint: str, model: str, api_key_env: str = "FIVEW1H_BASELINE_API_KEY",
                 timeout_s: float = 120.0,
                 response_path: tuple = ("choices", 0, "message", "content")):
        self.endpoint = endpoint
        self.model = model
        self.timeout_s = timeout_s
        self.response_path = response_path
        self.session = requests.Session()
        key = os.environ.get(api_key_env)
        if key:
            self.session.headers["Authorization"] = f"Bearer {key}"

    def complete(self, prompt: str) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        response = self.session.post(self.endpoint, json=payload, timeout=self.timeout_s)
        response.raise_for_status()
        data = response.json()
        for key in self.response_path:
            data = data[key]
        return str(data)


@dataclass(frozen=True)
class BaselineResult:
    answer: BaselineAnswer | None
    error: str | None
    cached: bool

    @property
    def ok(self) -> bool:
        return self.answer is not None


def _cache_path(cache_dir: Path, article_id: str) -> Path:
    return cache_dir / f"{article_id}.txt"


def _write_atomic(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_baseline(articles: list[RawArticle], client: ChatClient | None, cache_dir: str | Path,
                 example: ExampleArticle | None = None,
                 template: str | None = None,
                 jobs: int = 1) -> dict[str, BaselineResult]:
    """Cache-first baseline over a list of articles.

    On a cache miss the client is called once and the raw response is stored
    verbatim (write-then-rename) before parsing. Per-article failures are
    recorded and never stop the run; ``jobs`` bounds request parallelism.
    """
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)

    def one(article: RawArticle) -> BaselineResult:
        path = _cache_path(cache_dir, article.id)
        cached = path.exists()
        try:
            if cached:
                raw = path.read_text(encoding="utf-8")
            else:
                if client is None:
                    raise BaselineError("cold cache and no chat client configured")
                if example is None:
                    raise BaselineError("cold cache requires a one-shot example")
                bundle = build_prompt(article, example, template)
                raw = client.complete(bundle.prompt)
                _write_atomic(path, raw)
            return BaselineResult(answer=parse_baseline_answer(raw), error=None, cached=cached)
        except Exception as exc:
            log.warning("baseline failed for article %s: %s", article.id, exc)
            return BaselineResult(answer=None, error=str(exc), cached=cached)

    ordered = sorted(articles, key=lambda a: a.id)
    if jobs <= 1:
        return {article.id: one(article) for article in ordered}
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        outcomes = list(pool.map(one, ordered))
    return {article.id: outcome for article, outcome in zip(ordered, outcomes)}


def quotation_report(article: RawArticle, answer: BaselineAnswer) -> dict[str, list[str]]:
    """Answers that are not verbatim passages of the article (reported, not
    enforced; models violate the instruction and scoring tolerates it)."""
    violations: dict[str, list[str]] = {}
    for question in QUESTIONS:
        bad = [text for text in answer.answers(question)
               if text not in article.body and text not in article.title]
        if bad:
            violations[question] = bad
    return violations


class BaselineParticipant:
    """Evaluation participant view over parsed baseline results."""

    def __init__(self, results: dict[str, BaselineResult], participant_id: str = "baseline"):
        self.id = participant_id
        self._results = results

    def answers(self, article_id: str, question: str) -> list[str] | None:
        result = self._results.get(article_id)
        if result is None or result.answer is None:
            return None
        return result.answer.answers(question)
