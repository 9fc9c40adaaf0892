"""File-backed and HTTP-backed annotation providers."""

from __future__ import annotations

import os
from pathlib import Path

import requests

from ..document import RawArticle, document_from_json, parse_document
from .base import AnnotationProviderError, ProviderLayers

REMOTE_TOKEN_ENV = "FIVEW1H_REMOTE_TOKEN"


class FileProvider:
    """Serves pre-annotated interchange documents from a directory, by article id."""

    name = "file"
    capabilities = frozenset({"sentences", "tokens", "pos", "chunks", "ner", "coref", "qa"})

    def __init__(self, annotations_dir: str | Path):
        self.annotations_dir = Path(annotations_dir)

    def annotate_layers(self, article: RawArticle) -> ProviderLayers:
        path = self.annotations_dir / f"{article.id}.json"
        if not path.exists():
            raise AnnotationProviderError(f"file provider: no annotation file for article {article.id!r} at {path}")
        doc = parse_document(path.read_bytes())
        if doc.article.body != article.body:
            raise AnnotationProviderError(
                f"file provider: annotation file {path} was built for a different body text of {article.id!r}")
        return ProviderLayers(
            sentences=doc.sentences,
            tokens=doc.tokens,
            entities=doc.entities,
            temporals=doc.temporals,
            coref_chains=doc.coref_chains,
            qa_answers=doc.qa_answers,
        )

    def qa(self, context: str, question: str) -> tuple[str, float]:
        raise AnnotationProviderError("file provider does not answer live QA calls")


class RemoteProvider:
    """Client for the annotation sidecar wire contract.

    POST /annotate {id,title,body} -> annotation layers in the interchange
    schema (minus the article); POST /qa {context,question} -> {answer,score};
    GET /health -> {status}. Credentials come from the environment only.
    """

    name = "remote"
    capabilities = frozenset({"sentences", "tokens", "pos", "chunks", "ner", "coref", "qa"})

    def __init__(self, endpoint: str, timeout_s: float = 30.0, retries: int = 2,
                 pool_size: int = 4):
        self.endpoint = endpoint.rstrip("/")
        self.timeout_s = timeout_s
        self.retries = max(0, retries)
        self.session = requests.Session()
        adapter = requests.adapters.HTTPAdapter(pool_connections=pool_size, pool_maxsize=pool_size)
        self.session.mount("http://", adapter)
        self.session.mount("https://", adapter)
        token = os.environ.get(REMOTE_TOKEN_ENV)
        if token:
            self.session.headers["Authorization"] = f"Bearer {token}"

    def _post(self, path: str, payload: dict) -> dict:
        url = f"{self.endpoint}{path}"
        last_error: Exception | None = None
        for _ in range(self.retries + 1):
            try:
                response = self.session.post(url, json=payload, timeout=self.timeout_s)
                response.raise_for_status()
                return response.json()
            except requests.RequestException as exc:
                last_error = exc
        raise AnnotationProviderError(f"remote provider unavailable at {url}: {last_error}")

    def annotate_layers(self, article: RawArticle) -> ProviderLayers:
        layers = self._post("/annotate", {"id": article.id, "title": article.title, "body": article.body})
        payload = {
            "article": {"id": article.id, "title": article.title, "body": article.body},
            **{k: layers.get(k, []) for k in
               ("sentences", "tokens", "entities", "temporals", "coref_chains", "qa_answers")},
        }
        doc = document_from_json(payload)
        return ProviderLayers(
            sentences=doc.sentences,
            tokens=doc.tokens,
            entities=doc.entities,
            temporals=doc.temporals,
            coref_chains=doc.coref_chains,
            qa_answers=doc.qa_answers,
        )

    def qa(self, context: str, question: str) -> tuple[str, float]:
        data = self._post("/qa", {"context": context, "question": question})
        return (str(data.get("answer", "")), float(data.get("score", 0.0)))

    def health(self) -> str:
        url = f"{self.endpoint}/health"
        try:
            response = self.session.get(url, timeout=self.timeout_s)
            response.raise_for_status()
            return str(response.json().get("status", "unknown"))
        except requests.RequestException as exc:
            raise AnnotationProviderError(f"remote provider unavailable at {url}: {exc}") from exc
