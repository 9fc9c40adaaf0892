from __future__ import annotations

import dataclasses
import json

import pytest

from fivew1h.document import (
    AnnotatedDocument,
    CorefChain,
    DocumentParseError,
    DocumentValidationError,
    EntitySpan,
    RawArticle,
    Sentence,
    Span,
    Token,
    parse_document,
    sentence_of,
    serialize_document,
    validate_document,
)


def minimal_doc() -> AnnotatedDocument:
    body = "Justin Trudeau parle."
    return AnnotatedDocument(
        article=RawArticle(id="mini", title="Une annonce", body=body),
        sentences=(Sentence(index=0, span=Span(0, len(body), body), root_kind="VP"),),
        tokens=(
            Token(span=Span(0, 6, "Justin"), lemma="justin", pos="PROPN", sentence_index=0),
            Token(span=Span(7, 14, "Trudeau"), lemma="trudeau", pos="PROPN", sentence_index=0),
            Token(span=Span(15, 20, "parle"), lemma="parler", pos="VERB", sentence_index=0, tense="PRESENT"),
            Token(span=Span(20, 21, "."), lemma=".", pos="PUNCT", sentence_index=0),
        ),
        entities=(EntitySpan(label="PER", span=Span(0, 14, "Justin Trudeau")),),
    )


def test_minimal_document_roundtrip():
    doc = minimal_doc()
    assert validate_document(doc) == []
    assert doc.n_sentences == 1
    parsed = parse_document(serialize_document(doc))
    assert parsed == doc


def test_parse_rejects_out_of_bounds_entity_span():
    doc = minimal_doc()
    payload = json.loads(serialize_document(doc))
    payload["entities"][0]["span"] = {"start": 0, "end": 9999, "text": "Justin Trudeau"}
    with pytest.raises(DocumentValidationError) as err:
        parse_document(json.dumps(payload))
    assert any(v.layer == "entities" for v in err.value.violations)


def test_parse_rejects_unknown_fields():
    payload = json.loads(serialize_document(minimal_doc()))
    payload["surprise"] = True
    with pytest.raises(DocumentParseError, match="unknown field"):
        parse_document(json.dumps(payload))


def test_parse_error_reports_location():
    with pytest.raises(DocumentParseError, match="line 1"):
        parse_document(b"{not json")


def test_fixture_document_counts(fixture_doc):
    assert fixture_doc.n_sentences == 12
    assert len(fixture_doc.entities) == 3
    chain = fixture_doc.coref_chains[0]
    assert len(chain) == 4
    for mention in chain.mentions:
        assert fixture_doc.coref_count(mention) == 4


def test_fixture_roundtrip_is_identity(fixture_doc, fixture_doc_text):
    assert serialize_document(fixture_doc) == fixture_doc_text
    assert parse_document(serialize_document(fixture_doc)) == fixture_doc


def test_every_span_matches_source_slice(fixture_doc):
    body = fixture_doc.article.body
    spans = [s.span for s in fixture_doc.sentences]
    spans += [t.span for t in fixture_doc.tokens]
    spans += [c.span for c in fixture_doc.chunks]
    spans += [e.span for e in fixture_doc.entities]
    spans += [t.span for t in fixture_doc.temporals]
    spans += [m for ch in fixture_doc.coref_chains for m in ch.mentions]
    assert spans
    for span in spans:
        assert span.text == body[span.start:span.end]


def test_validate_flags_overlapping_tokens():
    doc = minimal_doc()
    bad_token = Token(span=Span(3, 10, doc.article.body[3:10]), lemma="x", pos="NOUN", sentence_index=0)
    doc = dataclasses.replace(doc, tokens=doc.tokens[:2] + (bad_token,) + doc.tokens[2:])
    violations = validate_document(doc)
    assert sum("overlap" in v.message for v in violations) == 1


def test_validate_flags_duplicate_chain_mentions():
    doc = minimal_doc()
    mention = Span(0, 14, "Justin Trudeau")
    doc = dataclasses.replace(doc, coref_chains=(CorefChain(mentions=(mention, mention)),))
    violations = validate_document(doc)
    assert sum("duplicate mention" in v.message for v in violations) == 1


def test_validate_empty_document_needs_sentence():
    doc = AnnotatedDocument(article=RawArticle(id="x", title="t", body="corps"))
    violations = validate_document(doc)
    assert any("no sentences" in v.message for v in violations)


def test_sentence_of_boundaries(fixture_doc):
    body = fixture_doc.article.body
    assert sentence_of(fixture_doc, Span(0, 1, body[0:1])) == 0
    last = fixture_doc.sentences[-1].span
    assert sentence_of(fixture_doc, Span(last.start + 2, last.start + 4, body[last.start + 2:last.start + 4])) == 11


def test_sentence_of_straddling_span_uses_start(fixture_doc):
    first = fixture_doc.sentences[0].span
    straddle = Span(first.end - 2, first.end + 5, fixture_doc.article.body[first.end - 2:first.end + 5])
    assert sentence_of(fixture_doc, straddle) == 0


def test_sentence_of_outside_all_sentences(fixture_doc):
    body = fixture_doc.article.body
    gap = body.index("\n")
    with pytest.raises(ValueError, match="outside"):
        sentence_of(fixture_doc, Span(gap, gap + 1, body[gap:gap + 1]))
