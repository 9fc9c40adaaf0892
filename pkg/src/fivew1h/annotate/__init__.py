"""Annotation layer assembly.

``annotate`` merges provider layers in order ("first provider wins" per
layer), always runs the built-in temporal detector, and optionally chains
the Q&A prompts through the first provider that declares the qa capability.
"""

from __future__ import annotations

import dataclasses
from typing import Sequence

from ..document import (
    AnnotatedDocument,
    DocumentValidationError,
    RawArticle,
    TemporalSpan,
    validate_document,
)
from .base import (
    AnnotationConfigError,
    AnnotationError,
    AnnotationProvider,
    AnnotationProviderError,
    ProviderLayers,
)
from .detectors import (
    default_temporal_patterns,
    detect_gerunds,
    detect_temporal_expressions,
    load_temporal_patterns,
    merge_adjacent_temporals,
)
from .heuristic import HeuristicProvider
from .providers import FileProvider, RemoteProvider
from .qa_chain import (
    DEFAULT_RETENTION_THRESHOLD,
    QaPromptSet,
    load_qa_prompts,
    run_qa_chain,
)

__all__ = [
    "AnnotationConfigError",
    "AnnotationError",
    "AnnotationProvider",
    "AnnotationProviderError",
    "FileProvider",
    "HeuristicProvider",
    "ProviderLayers",
    "QaPromptSet",
    "RemoteProvider",
    "annotate",
    "default_temporal_patterns",
    "detect_gerunds",
    "detect_temporal_expressions",
    "load_qa_prompts",
    "load_temporal_patterns",
    "merge_adjacent_temporals",
    "run_qa_chain",
]

_MERGEABLE_LAYERS = ("sentences", "tokens", "entities", "temporals", "coref_chains", "qa_answers")


def annotate(
    article: RawArticle,
    providers: Sequence[AnnotationProvider],
    qa_prompts: QaPromptSet | None = None,
    qa_retention_threshold: float = DEFAULT_RETENTION_THRESHOLD,
    temporal_patterns=None,
) -> AnnotatedDocument:
    """Build a validated AnnotatedDocument from an ordered provider list.

    Later providers never overwrite a layer an earlier provider filled.
    The temporal detector always runs; its spans union with any provider
    temporals before adjacent-merge.
    """
    if not providers:
        raise AnnotationConfigError("no annotation providers configured")

    merged = ProviderLayers()
    for provider in providers:
        layers = provider.annotate_layers(article)
        for layer in _MERGEABLE_LAYERS:
            if not getattr(merged, layer) and getattr(layers, layer):
                setattr(merged, layer, tuple(getattr(layers, layer)))

    if not merged.sentences or not merged.tokens:
        names = ", ".join(p.name for p in providers)
        raise AnnotationConfigError(
            f"no provider supplied sentences+tokens+pos (providers tried: {names})")

    doc = AnnotatedDocument(
        article=article,
        sentences=merged.sentences,
        tokens=merged.tokens,
        entities=merged.entities,
        temporals=merged.temporals,
        coref_chains=merged.coref_chains,
        qa_answers=(),
    )

    detected: list[TemporalSpan] = list(merged.temporals)
    patterns = temporal_patterns if temporal_patterns is not None else default_temporal_patterns()
    for sentence in doc.sentences:
        detected.extend(detect_temporal_expressions(
            sentence.span.text, patterns=patterns, offset=sentence.span.start))
    deduped: dict[tuple[int, int], TemporalSpan] = {}
    for span in sorted(detected, key=lambda t: (t.span.start, t.span.end)):
        deduped.setdefault((span.span.start, span.span.end), span)
    temporals = merge_adjacent_temporals(list(deduped.values()), doc)
    doc = dataclasses.replace(doc, temporals=tuple(temporals))

    qa_answers = tuple(merged.qa_answers)
    if not qa_answers and qa_prompts is not None:
        qa_provider = next((p for p in providers if "qa" in p.capabilities), None)
        if qa_provider is not None:
            qa_answers = tuple(run_qa_chain(
                doc, qa_provider.qa, qa_prompts, retention_threshold=qa_retention_threshold))
    doc = dataclasses.replace(doc, qa_answers=qa_answers)

    violations = validate_document(doc)
    if violations:
        raise DocumentValidationError(violations)
    return doc
