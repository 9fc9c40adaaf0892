"""Explainable who/what/when/where/why/how answer extraction for French news
articles, with an agreement-based evaluation harness."""

from .document import (
    AnnotatedDocument,
    CorefChain,
    Chunk,
    EntitySpan,
    QaAnswer,
    QUESTIONS,
    RawArticle,
    Sentence,
    Span,
    TemporalSpan,
    Token,
    parse_document,
    sentence_of,
    serialize_document,
    validate_document,
)
from .extract import Candidate, dedup_candidates, similarity
from .score import DEFAULT_WEIGHTS, ScoredCandidate, aggregate
from .selection import Answer, AnswerSet, Thresholds, explain, select
from .evaluate import agreement, match_answers

__version__ = "0.1.0"

__all__ = [
    "AnnotatedDocument",
    "Answer",
    "AnswerSet",
    "Candidate",
    "Chunk",
    "CorefChain",
    "DEFAULT_WEIGHTS",
    "EntitySpan",
    "QUESTIONS",
    "QaAnswer",
    "RawArticle",
    "ScoredCandidate",
    "Sentence",
    "Span",
    "TemporalSpan",
    "Thresholds",
    "Token",
    "agreement",
    "aggregate",
    "dedup_candidates",
    "explain",
    "match_answers",
    "parse_document",
    "select",
    "sentence_of",
    "serialize_document",
    "similarity",
    "validate_document",
    "__version__",
]
