"""Provider contract for filling annotation layers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

from ..document import CorefChain, EntitySpan, QaAnswer, RawArticle, Sentence, TemporalSpan, Token

# Capability flags a provider may declare. "pos" rides along with "tokens"
# (a token layer without POS tags is useless downstream) but is kept as a
# separate flag so configuration errors can name it.
CAPABILITIES = ("sentences", "tokens", "pos", "chunks", "ner", "coref", "qa")


class AnnotationError(Exception):
    pass


class AnnotationConfigError(AnnotationError):
    pass


class AnnotationProviderError(AnnotationError):
    """A provider failed; message names the provider/endpoint."""


@dataclass
class ProviderLayers:
    """Partial annotation layers returned by one provider.

    Layers a provider does not fill stay empty; they are never fabricated.
    """

    sentences: tuple[Sentence, ...] = ()
    tokens: tuple[Token, ...] = ()
    entities: tuple[EntitySpan, ...] = ()
    temporals: tuple[TemporalSpan, ...] = ()
    coref_chains: tuple[CorefChain, ...] = ()
    qa_answers: tuple[QaAnswer, ...] = ()


@runtime_checkable
class AnnotationProvider(Protocol):
    name: str
    capabilities: frozenset[str]

    def annotate_layers(self, article: RawArticle) -> ProviderLayers: ...

    def qa(self, context: str, question: str) -> tuple[str, float]:
        """Extractive QA call; only meaningful when "qa" is declared."""
        raise NotImplementedError
