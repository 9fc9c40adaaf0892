"""Per-factor candidate scores and their weighted totals for all six questions.

Every factor score lands in [0,1]; a candidate's total is the dot product of
its factor scores with the question's weight vector, which must sum to 1.
Default weights ship exactly as configured in ``DEFAULT_WEIGHTS``; they are
config, not code, and can be overridden per run.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .document import AnnotatedDocument
from .extract import Candidate, similarity
from .resources import Gazetteer

log = logging.getLogger(__name__)

DEFAULT_WEIGHTS: dict[str, dict[str, float]] = {
    "who": {
        "frequency": 0.40,
        "position": 0.25,
        "title_presence": 0.20,
        "per_type": 0.10,
        "qa_similarity": 0.05,
    },
    "what": {
        "position": 0.50,
        "length": 0.15,
        "who_average": 0.15,
        "action_verbs": 0.08,
        "np_vp_np": 0.07,
        "qa_similarity": 0.05,
    },
    "when": {
        "temporal_precision": 0.40,
        "frequency": 0.30,
        "position": 0.25,
        "qa_similarity": 0.05,
    },
    "where": {
        "position": 0.32,
        "frequency": 0.30,
        "containment": 0.30,
        "size": 0.03,
        "qa_similarity": 0.05,
    },
    "why": {
        "major_causal": 0.35,
        "minor_causal": 0.25,
        "position": 0.20,
        "causal_verbs": 0.15,
        "qa_similarity": 0.05,
    },
    "how": {
        "verb_tense": 0.45,
        "copulative_phrases": 0.30,
        "prepositions": 0.20,
        "qa_similarity": 0.05,
    },
}

TEMPORAL_PRECISION = {"TIME": 1.00, "DATE": 0.66, "SET": 0.33, "DURATION": 0.00}

# Step values for the how verb-tense factor.
TENSE_BOTH = 1.00
TENSE_GERUND = 0.66
TENSE_FUTURE = 0.33
TENSE_NONE = 0.00

AREA_MIN_M2 = 225.0           # a small property
AREA_MAX_M2 = 5.3e11          # 530,000 km2, covering most countries
NEUTRAL_SIZE_SCORE = 0.5      # unresolved locations

WEIGHT_SUM_TOLERANCE = 1e-9

DENOM_N = "N"
DENOM_N_MINUS_1 = "N_MINUS_1"


class ScoringError(Exception):
    pass


@dataclass(frozen=True)
class ScoredCandidate:
    candidate: Candidate
    factor_scores: dict[str, float]
    total: float


def validate_weights(weights: dict[str, dict[str, float]]) -> None:
    for question, table in weights.items():
        expected = set(DEFAULT_WEIGHTS.get(question, table))
        if set(table) != expected:
            raise ScoringError(
                f"{question}: factor names {sorted(table)} do not match expected {sorted(expected)}")
        for name, w in table.items():
            if w < 0:
                raise ScoringError(f"{question}: weight {name} is negative ({w})")
        total = sum(table.values())
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ScoringError(f"{question}: weights sum to {total!r}, expected 1.0")


def position_score(sentence_index: int, n_sentences: int, denominator: str = DENOM_N) -> float:
    """1 - index/denominator with 0-based indices, clamped to [0,1].

    The N-1 variant returns 1.0 for single-sentence documents.
    """
    if n_sentences < 1:
        raise ScoringError("n_sentences must be >= 1")
    if not (0 <= sentence_index < n_sentences):
        raise ScoringError(f"sentence_index {sentence_index} outside [0,{n_sentences})")
    if denominator == DENOM_N_MINUS_1:
        if n_sentences == 1:
            return 1.0
        value = 1.0 - sentence_index / (n_sentences - 1)
    elif denominator == DENOM_N:
        value = 1.0 - sentence_index / n_sentences
    else:
        raise ScoringError(f"unknown position denominator {denominator!r}")
    return min(1.0, max(0.0, value))


def normalized_ratio(value: float, max_over_candidates: float) -> float:
    if value < 0 or max_over_candidates < value:
        raise ScoringError(f"normalized_ratio needs 0 <= value <= max, got {value}, {max_over_candidates}")
    if max_over_candidates == 0:
        return 0.0
    return value / max_over_candidates


def aggregate(weights_q: dict[str, float], factor_scores: dict[str, float]) -> float:
    """Weighted sum; factor names must match the weight table exactly."""
    missing = set(weights_q) - set(factor_scores)
    extra = set(factor_scores) - set(weights_q)
    if missing:
        raise ScoringError(f"missing factor score(s): {sorted(missing)}")
    if extra:
        raise ScoringError(f"unexpected factor score(s): {sorted(extra)}")
    return sum(weights_q[name] * factor_scores[name] for name in weights_q)


def size_score(area_m2: float | None) -> float:
    """Log-normalized location size; small scores high, missing is neutral."""
    if area_m2 is None:
        return NEUTRAL_SIZE_SCORE
    ratio = (math.log(area_m2) - math.log(AREA_MIN_M2)) / (math.log(AREA_MAX_M2) - math.log(AREA_MIN_M2))
    return 1.0 - min(1.0, max(0.0, ratio))


def _binary(flag: bool) -> float:
    return 1.0 if flag else 0.0


def _qa_similarity(cand: Candidate, doc: AnnotatedDocument, threshold: float) -> float:
    answer = doc.qa_answer(cand.question)
    if answer is None:
        return 0.0
    return _binary(similarity(cand.text, answer.text) >= threshold)


def _surface_count(text: str, body: str) -> int:
    needle = text.casefold()
    if not needle:
        return 0
    return body.casefold().count(needle)


def _scored(cand: Candidate, weights_q: dict[str, float], factor_scores: dict[str, float]) -> ScoredCandidate:
    return ScoredCandidate(candidate=cand, factor_scores=factor_scores,
                           total=aggregate(weights_q, factor_scores))


def score_who(cands: list[Candidate], doc: AnnotatedDocument,
              weights: dict[str, dict[str, float]] | None = None,
              sim_threshold: float = 0.5,
              position_denominator: str = DENOM_N) -> list[ScoredCandidate]:
    weights_q = (weights or DEFAULT_WEIGHTS)["who"]
    raw_freq = []
    for cand in cands:
        chain = doc.coref_count(cand.span)
        raw_freq.append(chain if chain is not None else cand.features.get("occurrence_count", 1))
    max_freq = max(raw_freq, default=0)
    out = []
    for cand, freq in zip(cands, raw_freq):
        factor_scores = {
            "frequency": normalized_ratio(freq, max_freq),
            "position": position_score(cand.sentence_index, doc.n_sentences, position_denominator),
            "title_presence": _binary(similarity(cand.text, doc.article.title) >= sim_threshold),
            "per_type": _binary(bool(cand.features.get("is_per"))),
            "qa_similarity": _qa_similarity(cand, doc, sim_threshold),
        }
        out.append(_scored(cand, weights_q, factor_scores))
    return out


def score_what(cands: list[Candidate], doc: AnnotatedDocument, who_scored: list[ScoredCandidate],
               weights: dict[str, dict[str, float]] | None = None,
               sim_threshold: float = 0.5,
               position_denominator: str = DENOM_N) -> list[ScoredCandidate]:
    weights_q = (weights or DEFAULT_WEIGHTS)["what"]
    lengths = [_token_count(cand, doc) for cand in cands]
    max_len = max(lengths, default=0)
    who_by_sentence: dict[int, list[float]] = {}
    for sc in who_scored:
        who_by_sentence.setdefault(sc.candidate.sentence_index, []).append(sc.total)
    out = []
    for cand, length in zip(cands, lengths):
        who_totals = who_by_sentence.get(cand.sentence_index, [])
        factor_scores = {
            "position": position_score(cand.sentence_index, doc.n_sentences, position_denominator),
            "length": normalized_ratio(length, max_len),
            "who_average": (sum(who_totals) / len(who_totals)) if who_totals else 0.0,
            "action_verbs": _binary(bool(cand.features.get("has_action_verb"))),
            "np_vp_np": _binary(_has_np_vp_np(doc, cand.sentence_index)),
            "qa_similarity": _qa_similarity(cand, doc, sim_threshold),
        }
        out.append(_scored(cand, weights_q, factor_scores))
    return out


def score_when(cands: list[Candidate], doc: AnnotatedDocument,
               weights: dict[str, dict[str, float]] | None = None,
               sim_threshold: float = 0.5,
               position_denominator: str = DENOM_N) -> list[ScoredCandidate]:
    weights_q = (weights or DEFAULT_WEIGHTS)["when"]
    counts = [_surface_count(cand.text, doc.article.body) for cand in cands]
    max_count = max(counts, default=0)
    out = []
    for cand, count in zip(cands, counts):
        klass = cand.features.get("klass")
        if klass not in TEMPORAL_PRECISION:
            log.warning("when candidate %r has no temporal class; treating as DATE", cand.text)
            klass = "DATE"
        factor_scores = {
            "temporal_precision": TEMPORAL_PRECISION[klass],
            "frequency": normalized_ratio(count, max_count),
            "position": position_score(cand.sentence_index, doc.n_sentences, position_denominator),
            "qa_similarity": _qa_similarity(cand, doc, sim_threshold),
        }
        out.append(_scored(cand, weights_q, factor_scores))
    return out


def score_where(cands: list[Candidate], doc: AnnotatedDocument, gazetteer: Gazetteer,
                weights: dict[str, dict[str, float]] | None = None,
                sim_threshold: float = 0.5,
                position_denominator: str = DENOM_N,
                containment_direction: str = "enclosing") -> list[ScoredCandidate]:
    """Where factors; ``containment_direction`` picks which end of the
    contains() relation is rewarded ("enclosing": being contained by other
    candidates scores high, which matches the prose reading)."""
    weights_q = (weights or DEFAULT_WEIGHTS)["where"]
    entries = [gazetteer.entries.get(cand.features.get("gazetteer_id", "")) for cand in cands]
    distinct = {e.id: e for e in entries if e is not None}
    raw_containment = []
    for entry in entries:
        if entry is None:
            raw_containment.append(0)
            continue
        if containment_direction == "enclosing":
            count = sum(1 for other in distinct.values()
                        if other.id != entry.id and gazetteer.contains(other, entry))
        elif containment_direction == "enclosed":
            count = sum(1 for other in distinct.values()
                        if other.id != entry.id and gazetteer.contains(entry, other))
        else:
            raise ScoringError(f"unknown containment direction {containment_direction!r}")
        raw_containment.append(count)
    max_containment = max(raw_containment, default=0)
    counts = [_surface_count(cand.text, doc.article.body) for cand in cands]
    max_count = max(counts, default=0)
    out = []
    for cand, entry, contained, count in zip(cands, entries, raw_containment, counts):
        factor_scores = {
            "position": position_score(cand.sentence_index, doc.n_sentences, position_denominator),
            "frequency": normalized_ratio(count, max_count),
            "containment": normalized_ratio(contained, max_containment),
            "size": size_score(entry.area_m2 if entry is not None else None),
            "qa_similarity": _qa_similarity(cand, doc, sim_threshold),
        }
        out.append(_scored(cand, weights_q, factor_scores))
    return out


def score_why(cands: list[Candidate], doc: AnnotatedDocument,
              weights: dict[str, dict[str, float]] | None = None,
              sim_threshold: float = 0.5,
              position_denominator: str = DENOM_N_MINUS_1) -> list[ScoredCandidate]:
    weights_q = (weights or DEFAULT_WEIGHTS)["why"]
    majors = [cand.features.get("major_conj_count", 0) for cand in cands]
    minors = [cand.features.get("minor_conj_count", 0) for cand in cands]
    verbs = [cand.features.get("causal_verb_count", 0) for cand in cands]
    max_major, max_minor, max_verbs = (max(xs, default=0) for xs in (majors, minors, verbs))
    out = []
    for cand, major, minor, verb in zip(cands, majors, minors, verbs):
        factor_scores = {
            "major_causal": normalized_ratio(major, max_major),
            "minor_causal": normalized_ratio(minor, max_minor),
            "position": position_score(cand.sentence_index, doc.n_sentences, position_denominator),
            "causal_verbs": normalized_ratio(verb, max_verbs),
            "qa_similarity": _qa_similarity(cand, doc, sim_threshold),
        }
        out.append(_scored(cand, weights_q, factor_scores))
    return out


def score_how(cands: list[Candidate], doc: AnnotatedDocument,
              weights: dict[str, dict[str, float]] | None = None,
              sim_threshold: float = 0.5,
              position_denominator: str = DENOM_N) -> list[ScoredCandidate]:
    weights_q = (weights or DEFAULT_WEIGHTS)["how"]
    copulatives = [cand.features.get("copulative_phrase_count", 0) for cand in cands]
    max_copulative = max(copulatives, default=0)
    out = []
    for cand, copulative in zip(cands, copulatives):
        gerund = bool(cand.features.get("has_gerund"))
        future = bool(cand.features.get("has_future"))
        if gerund and future:
            tense = TENSE_BOTH
        elif gerund:
            tense = TENSE_GERUND
        elif future:
            tense = TENSE_FUTURE
        else:
            tense = TENSE_NONE
        factor_scores = {
            "verb_tense": tense,
            "copulative_phrases": normalized_ratio(copulative, max_copulative),
            "prepositions": _binary(bool(cand.features.get("has_preposition"))),
            "qa_similarity": _qa_similarity(cand, doc, sim_threshold),
        }
        out.append(_scored(cand, weights_q, factor_scores))
    return out


def _token_count(cand: Candidate, doc: AnnotatedDocument) -> int:
    return sum(1 for t in doc.tokens
               if cand.span.start <= t.span.start and t.span.end <= cand.span.end)


def _has_np_vp_np(doc: AnnotatedDocument, sentence_index: int) -> bool:
    kinds = [c.kind for c in doc.sentences[sentence_index].chunk_sequence]
    return any(kinds[i:i + 3] == ["NP", "VP", "NP"] for i in range(len(kinds) - 2))
