"""Candidate extraction for the six questions, plus the word-overlap
similarity measure used for deduplication and every "similarity" factor.

Similarity is Dice overlap on long words: tokenize on non-letter
boundaries, lowercase, keep diacritics, keep only words of length >= 4,
then 2*|A inter B| / (|A| + |B|) over multisets. Both sides empty scores
1.0; exactly one side empty scores 0.0.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

from .annotate.detectors import detect_gerunds
from .document import AnnotatedDocument, Sentence, Span, sentence_of
from .resources import Gazetteer, Lexicon, match_lexicon_in_text

DEFAULT_DEDUP_THRESHOLD = 0.5

LONG_WORD_MIN = 4

_WORD_RE = re.compile(r"[^\W\d_]+")

PROVENANCE_TAGS = frozenset({
    "NER", "NP_SUBJECT", "VP_SEQUENCE", "ACTION_VERB", "TITLE_SIMILAR",
    "TEMPORAL_REGEX", "CAUSAL_VERB", "CAUSAL_MARKER", "GERUND", "PREPOSITION", "QA",
})


@dataclass
class Candidate:
    question: str
    span: Span
    text: str
    sentence_index: int
    provenance: set[str] = field(default_factory=set)
    features: dict = field(default_factory=dict)

    def sort_key(self) -> tuple[int, int]:
        return (self.span.start, self.span.end)


def long_words(text: str) -> Counter:
    return Counter(w.casefold() for w in _WORD_RE.findall(text) if len(w) >= LONG_WORD_MIN)


def similarity(a: str, b: str) -> float:
    """Dice overlap of words longer than three letters; symmetric, in [0,1]."""
    wa, wb = long_words(a), long_words(b)
    total = sum(wa.values()) + sum(wb.values())
    if total == 0:
        return 1.0
    if not wa or not wb:
        return 0.0
    inter = sum((wa & wb).values())
    return 2.0 * inter / total


def dedup_candidates(cands: list[Candidate], threshold: float = DEFAULT_DEDUP_THRESHOLD) -> list[Candidate]:
    """Greedy scan in document order; near-duplicates fold into the first kept.

    The kept candidate absorbs the dropped one's provenance tags, OR-merges
    boolean features, max-merges numeric ones, and counts distinct absorbed
    spans in the ``occurrence_count`` feature (the same span proposed by two
    extraction routes is one occurrence).
    """
    kept: list[Candidate] = []
    kept_spans: list[set[tuple[int, int]]] = []
    for cand in sorted(cands, key=Candidate.sort_key):
        span_key = (cand.span.start, cand.span.end)
        absorbed = False
        for prior, spans in zip(kept, kept_spans):
            if similarity(prior.text, cand.text) >= threshold:
                prior.provenance |= cand.provenance
                spans.add(span_key)
                prior.features["occurrence_count"] = len(spans)
                for key, value in cand.features.items():
                    if key == "occurrence_count":
                        continue
                    if key not in prior.features:
                        prior.features[key] = value
                    elif isinstance(value, bool) and isinstance(prior.features[key], bool):
                        prior.features[key] = prior.features[key] or value
                    elif isinstance(value, (int, float)) and isinstance(prior.features[key], (int, float)):
                        prior.features[key] = max(prior.features[key], value)
                absorbed = True
                break
        if not absorbed:
            cand.features["occurrence_count"] = 1
            kept.append(cand)
            kept_spans.append({span_key})
    return kept


def _root_vp_index(sentence: Sentence) -> int | None:
    """The root VP is taken to be the first VP chunk of a VP-root sentence."""
    if sentence.root_kind != "VP":
        return None
    for i, chunk in enumerate(sentence.chunk_sequence):
        if chunk.kind == "VP":
            return i
    return None


def extract_who(doc: AnnotatedDocument, dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD) -> list[Candidate]:
    """PER/ORG entities plus NP subjects preceding VP sentence roots."""
    cands: list[Candidate] = []
    for entity in doc.entities:
        if entity.label not in ("PER", "ORG"):
            continue
        cands.append(Candidate(
            question="who",
            span=entity.span,
            text=entity.span.text,
            sentence_index=sentence_of(doc, entity.span),
            provenance={"NER"},
            features={"is_per": entity.label == "PER"},
        ))
    for sentence in doc.sentences:
        root = _root_vp_index(sentence)
        if root is None or root == 0:
            continue
        subject = sentence.chunk_sequence[root - 1]
        if subject.kind != "NP":
            continue
        cands.append(Candidate(
            question="who",
            span=subject.span,
            text=subject.span.text,
            sentence_index=sentence.index,
            provenance={"NP_SUBJECT"},
            features={"is_per": False},
        ))
    return dedup_candidates(cands, dedup_threshold)


def _sentence_candidate(doc: AnnotatedDocument, sentence: Sentence, question: str,
                        provenance: set[str], features: dict | None = None) -> Candidate:
    return Candidate(
        question=question,
        span=sentence.span,
        text=sentence.span.text,
        sentence_index=sentence.index,
        provenance=set(provenance),
        features=dict(features or {}),
    )


def extract_what(doc: AnnotatedDocument, action_verbs: Lexicon,
                 dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD) -> list[Candidate]:
    """VP-sequence spans, action-verb sentences, and title-similar sentences."""
    body = doc.article.body
    title = doc.article.title
    action_hits: dict[int, bool] = {}
    for sentence in doc.sentences:
        tokens = doc.sentence_tokens(sentence.index)
        action_hits[sentence.index] = bool(match_lexicon_in_text(action_verbs, tokens, body))

    cands: list[Candidate] = []
    for sentence in doc.sentences:
        base_features = {"has_action_verb": action_hits[sentence.index]}
        root = _root_vp_index(sentence)
        if root is not None and root + 1 < len(sentence.chunk_sequence):
            following = sentence.chunk_sequence[root + 1:]
            start = following[0].span.start
            end = following[-1].span.end
            cands.append(Candidate(
                question="what",
                span=Span(start, end, body[start:end]),
                text=body[start:end],
                sentence_index=sentence.index,
                provenance={"VP_SEQUENCE"},
                features=dict(base_features),
            ))
        if action_hits[sentence.index]:
            cands.append(_sentence_candidate(doc, sentence, "what", {"ACTION_VERB"}, base_features))
        if similarity(sentence.span.text, title) >= dedup_threshold:
            cands.append(_sentence_candidate(doc, sentence, "what", {"TITLE_SIMILAR"}, base_features))
    return dedup_candidates(cands, dedup_threshold)


def extract_when(doc: AnnotatedDocument, dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD) -> list[Candidate]:
    """DATE entities union temporal-detector spans; features carry the class."""
    cands: list[Candidate] = []
    for temporal in doc.temporals:
        cands.append(Candidate(
            question="when",
            span=temporal.span,
            text=temporal.span.text,
            sentence_index=sentence_of(doc, temporal.span),
            provenance={"TEMPORAL_REGEX"},
            features={"klass": temporal.klass},
        ))
    covered = [t.span for t in doc.temporals]
    for entity in doc.entities:
        if entity.label != "DATE":
            continue
        if any(span.overlaps(entity.span) for span in covered):
            continue
        cands.append(Candidate(
            question="when",
            span=entity.span,
            text=entity.span.text,
            sentence_index=sentence_of(doc, entity.span),
            provenance={"NER"},
            features={"klass": "DATE"},
        ))
    return dedup_candidates(cands, dedup_threshold)


def extract_where(doc: AnnotatedDocument, gazetteer: Gazetteer,
                  dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD) -> list[Candidate]:
    """LOC entities, resolved against the gazetteer when possible."""
    cands: list[Candidate] = []
    for entity in doc.entities:
        if entity.label != "LOC":
            continue
        entry = gazetteer.lookup(entity.span.text)
        features: dict = {}
        if entry is not None:
            features["gazetteer_id"] = entry.id
        cands.append(Candidate(
            question="where",
            span=entity.span,
            text=entity.span.text,
            sentence_index=sentence_of(doc, entity.span),
            provenance={"NER"},
            features=features,
        ))
    return dedup_candidates(cands, dedup_threshold)


def extract_why(doc: AnnotatedDocument, causal_verbs: Lexicon, causal_major: Lexicon,
                causal_minor: Lexicon, dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD) -> list[Candidate]:
    """Whole sentences containing causal verbs or major/minor causal markers.

    Marker-count features count distinct lexicon entries matched in the
    sentence, not repeated occurrences of one entry.
    """
    body = doc.article.body
    cands: list[Candidate] = []
    for sentence in doc.sentences:
        tokens = doc.sentence_tokens(sentence.index)
        verbs = {m.entry for m in match_lexicon_in_text(causal_verbs, tokens, body)}
        major = {m.entry for m in match_lexicon_in_text(causal_major, tokens, body)}
        minor = {m.entry for m in match_lexicon_in_text(causal_minor, tokens, body)}
        if not (verbs or major or minor):
            continue
        provenance = set()
        if verbs:
            provenance.add("CAUSAL_VERB")
        if major or minor:
            provenance.add("CAUSAL_MARKER")
        cands.append(_sentence_candidate(doc, sentence, "why", provenance, {
            "major_conj_count": len(major),
            "minor_conj_count": len(minor),
            "causal_verb_count": len(verbs),
        }))
    return dedup_candidates(cands, dedup_threshold)


def extract_how(doc: AnnotatedDocument, copulative: Lexicon, method_prepositions: Lexicon,
                dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD) -> list[Candidate]:
    """Whole sentences containing a gerund, a copulative phrase, or a method
    preposition/modal adverb."""
    body = doc.article.body
    cands: list[Candidate] = []
    for sentence in doc.sentences:
        tokens = doc.sentence_tokens(sentence.index)
        gerunds = detect_gerunds(tokens)
        copulatives = {m.entry for m in match_lexicon_in_text(copulative, tokens, body)}
        prepositions = {m.entry for m in match_lexicon_in_text(method_prepositions, tokens, body)}
        if not (gerunds or copulatives or prepositions):
            continue
        provenance = set()
        if gerunds:
            provenance.add("GERUND")
        if copulatives or prepositions:
            provenance.add("PREPOSITION")
        has_future = any(t.tense == "FUTURE" for t in tokens if t.pos in ("VERB", "AUX"))
        cands.append(_sentence_candidate(doc, sentence, "how", provenance, {
            "has_gerund": bool(gerunds),
            "has_future": has_future,
            "copulative_phrase_count": len(copulatives),
            "has_preposition": bool(prepositions),
        }))
    return dedup_candidates(cands, dedup_threshold)
