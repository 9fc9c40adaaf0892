"""Corpus loading, the answer-agreement metric, pairwise agreement matrices,
threshold sweeps, and answer-count statistics.

Agreement between two answer lists is 2*matches/(len(A)+len(B)), where
matches come from greedy one-to-one pairing of cross pairs in descending
word-overlap similarity. Two empty lists agree perfectly (both assert "no
answer in the article"); one empty list against a non-empty one scores 0.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

from .document import QUESTIONS, AnnotatedDocument, RawArticle
from .extract import similarity
from .pipeline import PipelineOptions, PipelineResources, run_document
from .selection import AnswerSet, select

log = logging.getLogger(__name__)

DEFAULT_SIM_THRESHOLD = 0.5


class CorpusError(Exception):
    pass


@dataclass(frozen=True)
class CorpusArticle:
    article: RawArticle
    # annotator id -> question -> verbatim answers; a missing question key
    # means "not annotated", an empty list means "asserted no answer".
    gold: dict[str, dict[str, list[str]]] = field(default_factory=dict)


@dataclass
class AnnotatedCorpus:
    articles: list[CorpusArticle]

    def __post_init__(self) -> None:
        self.articles.sort(key=lambda ca: ca.article.id)

    @property
    def article_ids(self) -> list[str]:
        return [ca.article.id for ca in self.articles]

    @property
    def annotator_ids(self) -> list[str]:
        ids = {a for ca in self.articles for a in ca.gold}
        return sorted(ids)

    def by_id(self, article_id: str) -> CorpusArticle:
        for ca in self.articles:
            if ca.article.id == article_id:
                return ca
        raise KeyError(article_id)


def read_manifest(corpus_dir: str | Path) -> list[str]:
    corpus_dir = Path(corpus_dir)
    manifest_path = corpus_dir / "manifest.json"
    if not manifest_path.exists():
        raise CorpusError(f"no manifest.json in {corpus_dir}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{manifest_path}: malformed JSON: {exc}") from exc
    ids = manifest.get("articles")
    if not isinstance(ids, list) or not ids:
        raise CorpusError(f"{manifest_path}: expected a non-empty 'articles' id list")
    if len(set(ids)) != len(ids):
        raise CorpusError(f"{manifest_path}: duplicate article ids")
    return list(ids)


def load_corpus_article(corpus_dir: str | Path, article_id: str) -> CorpusArticle:
    path = Path(corpus_dir) / "articles" / f"{article_id}.json"
    if not path.exists():
        raise CorpusError(f"article file missing for id {article_id!r}: {path}")
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{path}: malformed JSON: {exc}") from exc
    if record.get("id") != article_id:
        raise CorpusError(f"{path}: id field {record.get('id')!r} does not match manifest {article_id!r}")
    article = RawArticle(id=article_id, title=record.get("title", ""), body=record.get("body", ""),
                         outlet=record.get("outlet"))
    if not article.title or not article.body:
        raise CorpusError(f"{path}: title and body must be non-empty")
    gold: dict[str, dict[str, list[str]]] = {}
    for annotator, by_question in record.get("annotations", {}).items():
        clean: dict[str, list[str]] = {}
        for question, answers in by_question.items():
            if question not in QUESTIONS:
                raise CorpusError(f"{path}: unknown question {question!r} under annotator {annotator!r}")
            if not isinstance(answers, list) or not all(isinstance(a, str) for a in answers):
                raise CorpusError(f"{path}: answers for {annotator!r}/{question} must be a list of strings")
            for answer in answers:
                if answer not in article.body and answer not in article.title:
                    raise CorpusError(
                        f"{path}: answer {answer!r} by {annotator!r} is not a verbatim passage")
            clean[question] = list(answers)
        gold[annotator] = clean
    return CorpusArticle(article=article, gold=gold)


def load_corpus(corpus_dir: str | Path) -> AnnotatedCorpus:
    """Load a corpus directory: manifest.json plus articles/<id>.json files."""
    ids = read_manifest(corpus_dir)
    return AnnotatedCorpus(articles=[load_corpus_article(corpus_dir, i) for i in ids])


# --- agreement metric ------------------------------------------------------


def match_answers(a: Sequence[str], b: Sequence[str],
                  sim_threshold: float = DEFAULT_SIM_THRESHOLD) -> list[tuple[int, int]]:
    """Greedy one-to-one matching of cross pairs by descending similarity."""
    pairs = []
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            sim = similarity(ai, bj)
            if sim >= sim_threshold:
                pairs.append((-sim, i, j))
    pairs.sort()
    matched: list[tuple[int, int]] = []
    used_a: set[int] = set()
    used_b: set[int] = set()
    for _neg_sim, i, j in pairs:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        matched.append((i, j))
    matched.sort()
    return matched


def agreement(a: Sequence[str], b: Sequence[str],
              sim_threshold: float = DEFAULT_SIM_THRESHOLD) -> float:
    """Ratio of similar answers to the total answers of both participants."""
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    matches = match_answers(a, b, sim_threshold)
    return 2.0 * len(matches) / (len(a) + len(b))


# --- participants ----------------------------------------------------------


class Participant(Protocol):
    id: str

    def answers(self, article_id: str, question: str) -> list[str] | None:
        """Answer texts, or None when this article/question was not annotated."""
        ...


class AnnotatorParticipant:
    def __init__(self, corpus: AnnotatedCorpus, annotator_id: str):
        if annotator_id not in corpus.annotator_ids:
            raise CorpusError(f"unknown annotator id {annotator_id!r}")
        self.id = annotator_id
        self._corpus = corpus

    def answers(self, article_id: str, question: str) -> list[str] | None:
        gold = self._corpus.by_id(article_id).gold.get(self.id)
        if gold is None or question not in gold:
            return None
        return list(gold[question])


class SystemParticipant:
    """Runs the extraction pipeline once per article and answers from cache.

    Re-selection at other thresholds reuses the cached scored candidates,
    which is what makes the threshold sweep cheap.
    """

    def __init__(self, corpus: AnnotatedCorpus, resources: PipelineResources,
                 options: PipelineOptions, annotate_fn, participant_id: str = "system"):
        self.id = participant_id
        self._corpus = corpus
        self._resources = resources
        self._options = options
        self._annotate_fn = annotate_fn
        self._scored_cache: dict[str, dict] = {}
        self._answers_cache: dict[str, AnswerSet] = {}

    def _ensure(self, article_id: str) -> None:
        if article_id in self._scored_cache:
            return
        doc: AnnotatedDocument = self._annotate_fn(self._corpus.by_id(article_id).article)
        scored, answer_set = run_document(doc, self._resources, self._options)
        self._scored_cache[article_id] = scored
        self._answers_cache[article_id] = answer_set

    def answer_set(self, article_id: str) -> AnswerSet:
        self._ensure(article_id)
        return self._answers_cache[article_id]

    def answers(self, article_id: str, question: str) -> list[str] | None:
        return self.answer_set(article_id).texts(question)

    def answers_at(self, article_id: str, question: str, tau: float) -> list[str]:
        self._ensure(article_id)
        thresholds = self._options.thresholds.with_value(question, tau)
        chosen = select(self._scored_cache[article_id], thresholds, self._options.weights)
        return chosen.texts(question)


# --- reports ---------------------------------------------------------------


@dataclass(frozen=True)
class AgreementReport:
    participants: tuple[str, ...]
    # question -> {(id_a, id_b) sorted: mean agreement or None when no shared articles}
    per_question: dict[str, dict[tuple[str, str], float | None]]
    overall_mean: float | None

    def get(self, question: str, a: str, b: str) -> float | None:
        return self.per_question[question][tuple(sorted((a, b)))]  # type: ignore[index]

    def to_json(self) -> dict:
        return {
            "participants": list(self.participants),
            "per_question": {
                q: {f"{a}|{b}": value for (a, b), value in table.items()}
                for q, table in self.per_question.items()
            },
            "overall_mean": self.overall_mean,
        }


def pairwise_agreement(corpus: AnnotatedCorpus, participants: Sequence[Participant],
                       sim_threshold: float = DEFAULT_SIM_THRESHOLD) -> AgreementReport:
    """Mean per-article agreement for every pair, per question.

    Articles where either member lacks annotations for a question are
    skipped for that pair/question.
    """
    if len(participants) < 2:
        raise CorpusError("pairwise agreement needs at least two participants")
    ids = [p.id for p in participants]
    if len(set(ids)) != len(ids):
        raise CorpusError(f"duplicate participant ids: {ids}")
    per_question: dict[str, dict[tuple[str, str], float | None]] = {q: {} for q in QUESTIONS}
    all_values: list[float] = []
    for x in range(len(participants)):
        for y in range(x + 1, len(participants)):
            pa, pb = participants[x], participants[y]
            key = tuple(sorted((pa.id, pb.id)))
            for question in QUESTIONS:
                values = []
                for article_id in corpus.article_ids:
                    answers_a = pa.answers(article_id, question)
                    answers_b = pb.answers(article_id, question)
                    if answers_a is None or answers_b is None:
                        continue
                    values.append(agreement(answers_a, answers_b, sim_threshold))
                mean = sum(values) / len(values) if values else None
                per_question[question][key] = mean  # type: ignore[index]
                if mean is not None:
                    all_values.append(mean)
    overall = sum(all_values) / len(all_values) if all_values else None
    return AgreementReport(participants=tuple(ids), per_question=per_question, overall_mean=overall)


@dataclass(frozen=True)
class SweepResult:
    question: str
    curve: tuple[tuple[float, float], ...]
    best_tau: float

    def to_json(self) -> dict:
        return {
            "question": self.question,
            "curve": [{"tau": tau, "mean_agreement": mean} for tau, mean in self.curve],
            "best_tau": self.best_tau,
        }


def threshold_sweep(corpus: AnnotatedCorpus, system: SystemParticipant,
                    grid: Sequence[float], question: str,
                    sim_threshold: float = DEFAULT_SIM_THRESHOLD) -> SweepResult:
    """Mean system-vs-annotator agreement at each threshold on the grid.

    The argmax threshold breaks ties toward the smaller value.
    """
    if not grid:
        raise CorpusError("threshold grid is empty")
    annotators = [AnnotatorParticipant(corpus, a) for a in corpus.annotator_ids]
    if not annotators:
        raise CorpusError("corpus has no gold annotations to sweep against")
    curve = []
    for tau in grid:
        annotator_means = []
        for annotator in annotators:
            values = []
            for article_id in corpus.article_ids:
                gold = annotator.answers(article_id, question)
                if gold is None:
                    continue
                values.append(agreement(system.answers_at(article_id, question, tau), gold, sim_threshold))
            if values:
                annotator_means.append(sum(values) / len(values))
        curve.append((tau, sum(annotator_means) / len(annotator_means) if annotator_means else 0.0))
    best_tau, best = curve[0]
    for tau, mean in curve[1:]:
        if mean > best or (mean == best and tau < best_tau):
            best_tau, best = tau, mean
    return SweepResult(question=question, curve=tuple(curve), best_tau=best_tau)


def answer_count_stats(corpus: AnnotatedCorpus,
                       participants: Sequence[Participant]) -> dict[str, dict[str, float | None]]:
    """Mean number of answers per question per participant, plus an
    all-questions mean over every (article, question) cell present."""
    stats: dict[str, dict[str, float | None]] = {}
    for participant in participants:
        by_question: dict[str, float | None] = {}
        all_counts: list[int] = []
        for question in QUESTIONS:
            counts = []
            for article_id in corpus.article_ids:
                answers = participant.answers(article_id, question)
                if answers is None:
                    continue
                counts.append(len(answers))
            by_question[question] = sum(counts) / len(counts) if counts else None
            all_counts.extend(counts)
        by_question["all"] = sum(all_counts) / len(all_counts) if all_counts else None
        stats[participant.id] = by_question
    return stats
