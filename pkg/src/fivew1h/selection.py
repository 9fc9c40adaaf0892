"""Threshold-based answer selection and the factor-breakdown report.

All scored candidates at or above the per-question threshold are returned,
sorted by score descending with deterministic tie-breaking (earlier
sentence, then earlier offset). Each answer keeps its full factor
breakdown so every returned score can be decomposed line by line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .document import QUESTIONS, Span
from .score import DEFAULT_WEIGHTS, ScoredCandidate

DEFAULT_THRESHOLD = 0.5

EXPLAIN_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FactorContribution:
    weight: float
    score: float

    @property
    def contribution(self) -> float:
        return self.weight * self.score


@dataclass(frozen=True)
class Answer:
    question: str
    text: str
    span: Span
    sentence_index: int
    total: float
    factors: dict[str, FactorContribution]
    provenance: tuple[str, ...]


@dataclass
class Thresholds:
    by_question: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for question, value in self.by_question.items():
            if question not in QUESTIONS:
                raise ValueError(f"unknown question {question!r} in thresholds")
            if not value >= 0.0:
                raise ValueError(f"threshold for {question} must be >= 0, got {value}")
            # values above 1.0 are allowed as an explicit "select nothing"

    def get(self, question: str) -> float:
        return self.by_question.get(question, DEFAULT_THRESHOLD)

    def with_value(self, question: str, value: float) -> "Thresholds":
        merged = dict(self.by_question)
        merged[question] = value
        return Thresholds(by_question=merged)


@dataclass(frozen=True)
class AnswerSet:
    answers: dict[str, tuple[Answer, ...]]

    def for_question(self, question: str) -> tuple[Answer, ...]:
        return self.answers.get(question, ())

    def texts(self, question: str) -> list[str]:
        return [a.text for a in self.for_question(question)]


def _to_answer(sc: ScoredCandidate, weights_q: dict[str, float]) -> Answer:
    cand = sc.candidate
    factors = {
        name: FactorContribution(weight=weights_q[name], score=sc.factor_scores[name])
        for name in weights_q
    }
    return Answer(
        question=cand.question,
        text=cand.text,
        span=cand.span,
        sentence_index=cand.sentence_index,
        total=sc.total,
        factors=factors,
        provenance=tuple(sorted(cand.provenance)),
    )


def select(
    scored: dict[str, list[ScoredCandidate]],
    thresholds: Thresholds | None = None,
    weights: dict[str, dict[str, float]] | None = None,
) -> AnswerSet:
    """Filter each question's candidates by its threshold and rank them."""
    thresholds = thresholds or Thresholds()
    weights = weights or DEFAULT_WEIGHTS
    answers: dict[str, tuple[Answer, ...]] = {}
    for question in QUESTIONS:
        tau = thresholds.get(question)
        kept = [sc for sc in scored.get(question, []) if sc.total >= tau]
        kept.sort(key=lambda sc: (-sc.total, sc.candidate.sentence_index, sc.candidate.span.start))
        answers[question] = tuple(_to_answer(sc, weights[question]) for sc in kept)
    return AnswerSet(answers=answers)


def explain(answer: Answer) -> str:
    """Human-readable factor breakdown; contributions sum to the total."""
    lines = [
        f"{answer.question}: {answer.text!r} (sentence {answer.sentence_index}, "
        f"offsets [{answer.span.start},{answer.span.end}))",
        f"  provenance: {', '.join(answer.provenance) if answer.provenance else '-'}",
    ]
    running = 0.0
    for name, fc in answer.factors.items():
        running += fc.contribution
        lines.append(f"  {name:<20} weight={fc.weight:<6.3f} score={fc.score:<8.4f} -> {fc.contribution:.4f}")
    assert abs(running - answer.total) <= EXPLAIN_SUM_TOLERANCE
    lines.append(f"  {'total':<20} {answer.total:.4f}")
    return "\n".join(lines)


def answer_to_json(answer: Answer) -> dict:
    return {
        "text": answer.text,
        "span": {"start": answer.span.start, "end": answer.span.end},
        "sentence_index": answer.sentence_index,
        "score": answer.total,
        "provenance": list(answer.provenance),
        "factors": {
            name: {"weight": fc.weight, "score": fc.score, "contribution": fc.contribution}
            for name, fc in answer.factors.items()
        },
    }


def answer_set_to_json(article_id: str, answer_set: AnswerSet) -> dict:
    return {
        "id": article_id,
        "answers": {
            question: [answer_to_json(a) for a in answer_set.for_question(question)]
            for question in QUESTIONS
        },
    }
