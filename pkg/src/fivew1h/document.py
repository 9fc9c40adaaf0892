"""Annotated-document data model, JSON interchange format, and validation.

A document is a raw article (id, outlet, title, body) plus standoff
annotation layers: sentences (with their chunk sequences), tokens, named
entities, temporal expressions, coreference chains, and retained Q&A
answers. All span offsets are Unicode code points into ``article.body``;
every span stores a redundant copy of the covered text so annotation files
stay human-auditable and drift between text and offsets is detectable.

The interchange format is one UTF-8 JSON object per file; the exact field
names are documented in ``schema/annotated_document.schema.json`` at the
repository root. Unknown fields are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

QUESTIONS = ("who", "what", "when", "where", "why", "how")

POS_TAGS = frozenset({
    "NOUN", "PROPN", "VERB", "AUX", "ADJ", "ADV", "ADP",
    "DET", "PRON", "CONJ", "NUM", "PUNCT", "OTHER",
})
TENSES = frozenset({"PRESENT", "FUTURE", "PAST", "PARTICIPLE_PRESENT", "OTHER"})
ENTITY_LABELS = frozenset({"PER", "ORG", "LOC", "DATE", "MISC"})
TEMPORAL_CLASSES = frozenset({"TIME", "DATE", "SET", "DURATION"})
CHUNK_KINDS = frozenset({"NP", "VP"})
ROOT_KINDS = frozenset({"NP", "VP", "OTHER"})


class DocumentError(Exception):
    """Base class for document parsing/validation failures."""


class DocumentParseError(DocumentError):
    """Malformed interchange syntax; carries a location when known."""


class DocumentValidationError(DocumentError):
    """An invariant violation, naming the offending layer."""

    def __init__(self, violations: list["Violation"]):
        self.violations = violations
        lines = "; ".join(str(v) for v in violations[:5])
        more = "" if len(violations) <= 5 else f" (+{len(violations) - 5} more)"
        super().__init__(f"invalid document: {lines}{more}")


@dataclass(frozen=True)
class Violation:
    layer: str
    message: str

    def __str__(self) -> str:
        return f"[{self.layer}] {self.message}"


@dataclass(frozen=True)
class RawArticle:
    id: str
    title: str
    body: str
    outlet: str | None = None


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    text: str

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def covers(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class Token:
    span: Span
    lemma: str
    pos: str
    sentence_index: int
    tense: str | None = None


@dataclass(frozen=True)
class Chunk:
    kind: str
    span: Span
    head_token: int


@dataclass(frozen=True)
class Sentence:
    index: int
    span: Span
    root_kind: str
    chunk_sequence: tuple[Chunk, ...] = ()


@dataclass(frozen=True)
class EntitySpan:
    label: str
    span: Span


@dataclass(frozen=True)
class TemporalSpan:
    klass: str
    span: Span


@dataclass(frozen=True)
class CorefChain:
    mentions: tuple[Span, ...]

    def __len__(self) -> int:
        return len(self.mentions)


@dataclass(frozen=True)
class QaAnswer:
    question: str
    text: str
    confidence: float


@dataclass(frozen=True)
class AnnotatedDocument:
    """Immutable after construction; safe to share across parallel workers."""

    article: RawArticle
    sentences: tuple[Sentence, ...] = ()
    tokens: tuple[Token, ...] = ()
    entities: tuple[EntitySpan, ...] = ()
    temporals: tuple[TemporalSpan, ...] = ()
    coref_chains: tuple[CorefChain, ...] = ()
    qa_answers: tuple[QaAnswer, ...] = ()

    @property
    def chunks(self) -> tuple[Chunk, ...]:
        """All chunks, flattened across sentences in sentence order."""
        return tuple(c for s in self.sentences for c in s.chunk_sequence)

    @property
    def n_sentences(self) -> int:
        return len(self.sentences)

    def sentence_tokens(self, index: int) -> tuple[Token, ...]:
        return tuple(t for t in self.tokens if t.sentence_index == index)

    def sentence_text(self, index: int) -> str:
        return self.sentences[index].span.text

    def qa_answer(self, question: str) -> QaAnswer | None:
        for a in self.qa_answers:
            if a.question == question:
                return a
        return None

    def coref_count(self, span: Span) -> int | None:
        """Size of the chain containing ``span``, or None if no chain covers it."""
        for chain in self.coref_chains:
            for mention in chain.mentions:
                if mention.start == span.start and mention.end == span.end:
                    return len(chain)
        for chain in self.coref_chains:
            for mention in chain.mentions:
                if mention.overlaps(span):
                    return len(chain)
        return None


def sentence_of(doc: AnnotatedDocument, span: Span) -> int:
    """Index of the sentence containing ``span``'s start offset."""
    for s in doc.sentences:
        if s.span.start <= span.start < s.span.end:
            return s.index
    raise ValueError(
        f"span [{span.start},{span.end}) falls outside every sentence"
    )


# --- validation -----------------------------------------------------------


def _check_span(span: Span, body: str, layer: str, out: list[Violation]) -> None:
    if not (0 <= span.start < span.end <= len(body)):
        out.append(Violation(layer, f"span offsets [{span.start},{span.end}) out of bounds (len={len(body)})"))
        return
    actual = body[span.start:span.end]
    if span.text != actual:
        out.append(Violation(layer, f"span text {span.text!r} != body slice {actual!r} at [{span.start},{span.end})"))


def validate_document(doc: AnnotatedDocument) -> list[Violation]:
    """Every invariant of the model; empty list iff the document is valid."""
    out: list[Violation] = []
    body = doc.article.body

    if not doc.article.title:
        out.append(Violation("article", "title is empty"))
    if not doc.article.body:
        out.append(Violation("article", "body is empty"))
    if not doc.article.id:
        out.append(Violation("article", "id is empty"))

    if not doc.sentences:
        out.append(Violation("sentences", "document has no sentences (N_sentence >= 1 required)"))
    for i, s in enumerate(doc.sentences):
        if s.index != i:
            out.append(Violation("sentences", f"sentence indices not contiguous from 0: position {i} has index {s.index}"))
        if s.root_kind not in ROOT_KINDS:
            out.append(Violation("sentences", f"sentence {i}: unknown root_kind {s.root_kind!r}"))
        _check_span(s.span, body, "sentences", out)
        prev_end = None
        for c in s.chunk_sequence:
            if c.kind not in CHUNK_KINDS:
                out.append(Violation("chunks", f"sentence {i}: unknown chunk kind {c.kind!r}"))
            _check_span(c.span, body, "chunks", out)
            if prev_end is not None and c.span.start < prev_end:
                out.append(Violation("chunks", f"sentence {i}: chunks overlap or are unordered at offset {c.span.start}"))
            prev_end = c.span.end
            if not (0 <= c.head_token < len(doc.tokens)):
                out.append(Violation("chunks", f"sentence {i}: head_token {c.head_token} out of range"))

    by_sentence: dict[int, list[Token]] = {}
    for t in doc.tokens:
        if t.pos not in POS_TAGS:
            out.append(Violation("tokens", f"unknown pos {t.pos!r} for token {t.span.text!r}"))
        if t.tense is not None and t.tense not in TENSES:
            out.append(Violation("tokens", f"unknown tense {t.tense!r} for token {t.span.text!r}"))
        if not (0 <= t.sentence_index < len(doc.sentences)):
            out.append(Violation("tokens", f"token {t.span.text!r} references missing sentence {t.sentence_index}"))
        _check_span(t.span, body, "tokens", out)
        by_sentence.setdefault(t.sentence_index, []).append(t)
    for idx, toks in by_sentence.items():
        prev = None
        for t in toks:
            if prev is not None and t.span.start < prev.span.end:
                out.append(Violation("tokens", f"sentence {idx}: tokens overlap or are unordered at offset {t.span.start}"))
            prev = t

    for e in doc.entities:
        if e.label not in ENTITY_LABELS:
            out.append(Violation("entities", f"unknown entity label {e.label!r}"))
        _check_span(e.span, body, "entities", out)

    for tm in doc.temporals:
        if tm.klass not in TEMPORAL_CLASSES:
            out.append(Violation("temporals", f"unknown temporal class {tm.klass!r}"))
        _check_span(tm.span, body, "temporals", out)

    for ci, chain in enumerate(doc.coref_chains):
        if not chain.mentions:
            out.append(Violation("coref_chains", f"chain {ci} has no mentions"))
        seen: set[tuple[int, int]] = set()
        for m in chain.mentions:
            _check_span(m, body, "coref_chains", out)
            key = (m.start, m.end)
            if key in seen:
                out.append(Violation("coref_chains", f"chain {ci} has duplicate mention at [{m.start},{m.end})"))
            seen.add(key)

    seen_q: set[str] = set()
    for a in doc.qa_answers:
        if a.question not in QUESTIONS:
            out.append(Violation("qa_answers", f"unknown question {a.question!r}"))
        if a.question in seen_q:
            out.append(Violation("qa_answers", f"more than one retained answer for {a.question!r}"))
        seen_q.add(a.question)
        if not (0.0 <= a.confidence <= 1.0):
            out.append(Violation("qa_answers", f"confidence {a.confidence} outside [0,1]"))

    return out


# --- interchange format ---------------------------------------------------


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise DocumentParseError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise DocumentParseError(f"{where}: missing field(s) {sorted(missing)}")


def _span_from_json(obj: dict, where: str) -> Span:
    if not isinstance(obj, dict):
        raise DocumentParseError(f"{where}: span must be an object")
    _require_keys(obj, {"start", "end", "text"}, {"start", "end", "text"}, where)
    start, end, text = obj["start"], obj["end"], obj["text"]
    if not isinstance(start, int) or not isinstance(end, int) or not isinstance(text, str):
        raise DocumentParseError(f"{where}: span fields must be (int, int, str)")
    return Span(start=start, end=end, text=text)


def _span_to_json(span: Span) -> dict:
    return {"start": span.start, "end": span.end, "text": span.text}


def document_from_json(data: dict) -> AnnotatedDocument:
    """Build a document from a decoded interchange object; validates fully."""
    if not isinstance(data, dict):
        raise DocumentParseError("top level: expected an object")
    _require_keys(
        data,
        {"article", "sentences", "tokens", "entities", "temporals", "coref_chains", "qa_answers"},
        {"article"},
        "top level",
    )

    art = data["article"]
    _require_keys(art, {"id", "outlet", "title", "body"}, {"id", "title", "body"}, "article")
    article = RawArticle(id=art["id"], title=art["title"], body=art["body"], outlet=art.get("outlet"))

    sentences = []
    for i, s in enumerate(data.get("sentences", [])):
        _require_keys(s, {"index", "span", "root_kind", "chunks"}, {"index", "span", "root_kind"}, f"sentences[{i}]")
        chunks = []
        for j, c in enumerate(s.get("chunks", [])):
            _require_keys(c, {"kind", "span", "head_token"}, {"kind", "span", "head_token"}, f"sentences[{i}].chunks[{j}]")
            chunks.append(Chunk(kind=c["kind"], span=_span_from_json(c["span"], f"sentences[{i}].chunks[{j}]"),
                                head_token=c["head_token"]))
        sentences.append(Sentence(index=s["index"], span=_span_from_json(s["span"], f"sentences[{i}]"),
                                  root_kind=s["root_kind"], chunk_sequence=tuple(chunks)))

    tokens = []
    for i, t in enumerate(data.get("tokens", [])):
        _require_keys(t, {"span", "lemma", "pos", "tense", "sentence_index"}, {"span", "lemma", "pos", "sentence_index"},
                      f"tokens[{i}]")
        tokens.append(Token(span=_span_from_json(t["span"], f"tokens[{i}]"), lemma=t["lemma"], pos=t["pos"],
                            tense=t.get("tense"), sentence_index=t["sentence_index"]))

    entities = []
    for i, e in enumerate(data.get("entities", [])):
        _require_keys(e, {"label", "span"}, {"label", "span"}, f"entities[{i}]")
        entities.append(EntitySpan(label=e["label"], span=_span_from_json(e["span"], f"entities[{i}]")))

    temporals = []
    for i, tm in enumerate(data.get("temporals", [])):
        _require_keys(tm, {"klass", "span"}, {"klass", "span"}, f"temporals[{i}]")
        temporals.append(TemporalSpan(klass=tm["klass"], span=_span_from_json(tm["span"], f"temporals[{i}]")))

    chains = []
    for i, ch in enumerate(data.get("coref_chains", [])):
        _require_keys(ch, {"mentions"}, {"mentions"}, f"coref_chains[{i}]")
        chains.append(CorefChain(mentions=tuple(
            _span_from_json(m, f"coref_chains[{i}].mentions[{j}]") for j, m in enumerate(ch["mentions"])
        )))

    answers = []
    for i, a in enumerate(data.get("qa_answers", [])):
        _require_keys(a, {"question", "text", "confidence"}, {"question", "text", "confidence"}, f"qa_answers[{i}]")
        answers.append(QaAnswer(question=a["question"], text=a["text"], confidence=a["confidence"]))

    doc = AnnotatedDocument(
        article=article,
        sentences=tuple(sentences),
        tokens=tuple(tokens),
        entities=tuple(entities),
        temporals=tuple(temporals),
        coref_chains=tuple(chains),
        qa_answers=tuple(answers),
    )
    violations = validate_document(doc)
    if violations:
        raise DocumentValidationError(violations)
    return doc


def parse_document(data: bytes | str) -> AnnotatedDocument:
    """Parse one UTF-8 interchange file; round-trips with serialize_document."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentParseError(f"not valid UTF-8: {exc}") from exc
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise DocumentParseError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        return document_from_json(obj)
    except (TypeError, AttributeError) as exc:
        raise DocumentParseError(f"malformed document structure: {exc}") from exc


def document_to_json(doc: AnnotatedDocument) -> dict:
    obj: dict = {
        "article": {"id": doc.article.id, "title": doc.article.title, "body": doc.article.body},
        "sentences": [
            {
                "index": s.index,
                "span": _span_to_json(s.span),
                "root_kind": s.root_kind,
                "chunks": [
                    {"kind": c.kind, "span": _span_to_json(c.span), "head_token": c.head_token}
                    for c in s.chunk_sequence
                ],
            }
            for s in doc.sentences
        ],
        "tokens": [
            {"span": _span_to_json(t.span), "lemma": t.lemma, "pos": t.pos,
             "tense": t.tense, "sentence_index": t.sentence_index}
            for t in doc.tokens
        ],
        "entities": [{"label": e.label, "span": _span_to_json(e.span)} for e in doc.entities],
        "temporals": [{"klass": tm.klass, "span": _span_to_json(tm.span)} for tm in doc.temporals],
        "coref_chains": [{"mentions": [_span_to_json(m) for m in ch.mentions]} for ch in doc.coref_chains],
        "qa_answers": [{"question": a.question, "text": a.text, "confidence": a.confidence} for a in doc.qa_answers],
    }
    if doc.article.outlet is not None:
        obj["article"]["outlet"] = doc.article.outlet
    return obj


def serialize_document(doc: AnnotatedDocument) -> str:
    return json.dumps(document_to_json(doc), ensure_ascii=False, sort_keys=True, indent=2) + "\n"
