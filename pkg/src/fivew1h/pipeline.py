"""End-to-end wiring: extraction, scoring, and selection for one document."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .document import QUESTIONS, AnnotatedDocument
from .extract import (
    Candidate,
    extract_how,
    extract_what,
    extract_when,
    extract_where,
    extract_who,
    extract_why,
)
from .resources import Gazetteer, Lexicon, load_gazetteer, load_lexicon
from .score import (
    DEFAULT_WEIGHTS,
    DENOM_N,
    DENOM_N_MINUS_1,
    ScoredCandidate,
    score_how,
    score_what,
    score_when,
    score_where,
    score_who,
    score_why,
    validate_weights,
)
from .selection import AnswerSet, Thresholds, select

DATA_DIR = Path(__file__).resolve().parent / "data"

# The why factors divide position by N-1; every other question divides by N.
DEFAULT_POSITION_DENOMINATORS = {q: (DENOM_N_MINUS_1 if q == "why" else DENOM_N) for q in QUESTIONS}


@dataclass
class PipelineResources:
    action_verbs: Lexicon
    causal_verbs: Lexicon
    causal_major: Lexicon
    causal_minor: Lexicon
    copulative: Lexicon
    method_markers: Lexicon
    gazetteer: Gazetteer


def default_resources(data_dir: str | Path | None = None) -> PipelineResources:
    data_dir = Path(data_dir) if data_dir else DATA_DIR
    return PipelineResources(
        action_verbs=load_lexicon(data_dir / "action_verbs.txt"),
        causal_verbs=load_lexicon(data_dir / "causal_verbs.txt"),
        causal_major=load_lexicon(data_dir / "causal_major.txt"),
        causal_minor=load_lexicon(data_dir / "causal_minor.txt"),
        copulative=load_lexicon(data_dir / "copulative_phrases.txt"),
        method_markers=Lexicon.merged(
            "method_markers",
            load_lexicon(data_dir / "method_prepositions.txt"),
            load_lexicon(data_dir / "modal_adverbs.txt"),
        ),
        gazetteer=load_gazetteer(data_dir / "gazetteer.json"),
    )


@dataclass
class PipelineOptions:
    weights: dict[str, dict[str, float]] = field(default_factory=lambda: DEFAULT_WEIGHTS)
    thresholds: Thresholds = field(default_factory=Thresholds)
    dedup_threshold: float = 0.5
    similarity_threshold: float | None = None  # defaults to dedup_threshold
    position_denominators: dict[str, str] = field(
        default_factory=lambda: dict(DEFAULT_POSITION_DENOMINATORS))
    containment_direction: str = "enclosing"

    def __post_init__(self) -> None:
        validate_weights(self.weights)
        if self.similarity_threshold is None:
            self.similarity_threshold = self.dedup_threshold


def extract_candidates(doc: AnnotatedDocument, resources: PipelineResources,
                       dedup_threshold: float = 0.5) -> dict[str, list[Candidate]]:
    return {
        "who": extract_who(doc, dedup_threshold),
        "what": extract_what(doc, resources.action_verbs, dedup_threshold),
        "when": extract_when(doc, dedup_threshold),
        "where": extract_where(doc, resources.gazetteer, dedup_threshold),
        "why": extract_why(doc, resources.causal_verbs, resources.causal_major,
                           resources.causal_minor, dedup_threshold),
        "how": extract_how(doc, resources.copulative, resources.method_markers, dedup_threshold),
    }


def score_candidates(doc: AnnotatedDocument, cands: dict[str, list[Candidate]],
                     resources: PipelineResources,
                     options: PipelineOptions) -> dict[str, list[ScoredCandidate]]:
    sim = options.similarity_threshold
    denom = options.position_denominators
    who_scored = score_who(cands["who"], doc, options.weights, sim, denom["who"])
    return {
        "who": who_scored,
        "what": score_what(cands["what"], doc, who_scored, options.weights, sim, denom["what"]),
        "when": score_when(cands["when"], doc, options.weights, sim, denom["when"]),
        "where": score_where(cands["where"], doc, resources.gazetteer, options.weights, sim,
                             denom["where"], options.containment_direction),
        "why": score_why(cands["why"], doc, options.weights, sim, denom["why"]),
        "how": score_how(cands["how"], doc, options.weights, sim, denom["how"]),
    }


def run_document(doc: AnnotatedDocument, resources: PipelineResources,
                 options: PipelineOptions | None = None
                 ) -> tuple[dict[str, list[ScoredCandidate]], AnswerSet]:
    options = options or PipelineOptions()
    cands = extract_candidates(doc, resources, options.dedup_threshold)
    scored = score_candidates(doc, cands, resources, options)
    return scored, select(scored, options.thresholds, options.weights)
