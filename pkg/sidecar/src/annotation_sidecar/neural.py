"""Neural engine: spaCy preprocessing plus transformer models for NER,
coreference, and extractive QA.

Model identifiers come from the environment so deployments can swap models
without touching the wire schema:

    SIDECAR_SPACY_MODEL   (default fr_core_news_lg)
    SIDECAR_NER_MODEL     (default Jean-Baptiste/camembert-ner)
    SIDECAR_QA_MODEL      (default etalab-ia/camembert-base-squadFR-fquad-piaf)
    SIDECAR_COREF_MODEL   (optional; empty disables coreference)

Heavy imports happen inside ``load`` so the module stays importable on
machines without the ML stack.
"""

from __future__ import annotations

import os

_NER_LABEL_MAP = {
    "PER": "PER", "PERSON": "PER",
    "ORG": "ORG",
    "LOC": "LOC", "GPE": "LOC",
    "DATE": "DATE",
    "MISC": "MISC",
}

_TENSE_MAP = {"Pres": "PRESENT", "Fut": "FUTURE", "Past": "PAST", "Imp": "PAST"}


class NeuralEngineUnavailable(RuntimeError):
    pass


class NeuralEngine:
    name = "neural"

    def __init__(self):
        self._nlp = None
        self._ner = None
        self._qa = None
        self._coref = None

    def load(self) -> None:
        try:
            import spacy
            from transformers import pipeline
        except ImportError as exc:
            raise NeuralEngineUnavailable(f"neural stack not installed: {exc}") from exc
        self._nlp = spacy.load(os.environ.get("SIDECAR_SPACY_MODEL", "fr_core_news_lg"))
        self._ner = pipeline("token-classification",
                             model=os.environ.get("SIDECAR_NER_MODEL", "Jean-Baptiste/camembert-ner"),
                             aggregation_strategy="simple")
        self._qa = pipeline("question-answering",
                            model=os.environ.get("SIDECAR_QA_MODEL",
                                                 "etalab-ia/camembert-base-squadFR-fquad-piaf"))
        coref_model = os.environ.get("SIDECAR_COREF_MODEL", "")
        if coref_model:
            self._coref = pipeline("token-classification", model=coref_model,
                                   aggregation_strategy="simple")

    def annotate(self, article_id: str, title: str, body: str) -> dict:
        if self._nlp is None:
            raise NeuralEngineUnavailable("models not loaded")
        doc = self._nlp(body)
        sentences = []
        tokens = []
        sent_index_of = {}
        for index, sent in enumerate(doc.sents):
            sent_index_of[sent.start] = index
            chunks = []
            for np in sent.noun_chunks:
                chunks.append({"kind": "NP",
                               "span": {"start": np.start_char, "end": np.end_char, "text": np.text},
                               "head_token": np.root.i})
            for tok in sent:
                if tok.pos_ in ("VERB", "AUX") and (tok.dep_ == "ROOT" or tok.head.i == tok.i):
                    chunks.append({"kind": "VP",
                                   "span": {"start": tok.idx, "end": tok.idx + len(tok.text),
                                            "text": tok.text},
                                   "head_token": tok.i})
            chunks.sort(key=lambda c: c["span"]["start"])
            chunks = _drop_overlaps(chunks)
            root_kind = "VP" if sent.root.pos_ in ("VERB", "AUX") else (
                "NP" if sent.root.pos_ in ("NOUN", "PROPN", "PRON") else "OTHER")
            sentences.append({"index": index,
                              "span": {"start": sent.start_char, "end": sent.end_char,
                                       "text": sent.text},
                              "root_kind": root_kind,
                              "chunks": chunks})
        for index, sent in enumerate(doc.sents):
            for tok in sent:
                pos = tok.pos_ if tok.pos_ in {"NOUN", "PROPN", "VERB", "AUX", "ADJ", "ADV",
                                               "ADP", "DET", "PRON", "NUM", "PUNCT"} else (
                    "CONJ" if tok.pos_ in ("CCONJ", "SCONJ") else "OTHER")
                tense = None
                if pos in ("VERB", "AUX"):
                    morph_tense = tok.morph.get("Tense")
                    verb_form = tok.morph.get("VerbForm")
                    if "Part" in verb_form and morph_tense and morph_tense[0] == "Pres":
                        tense = "PARTICIPLE_PRESENT"
                    elif morph_tense:
                        tense = _TENSE_MAP.get(morph_tense[0], "OTHER")
                    else:
                        tense = "OTHER"
                tokens.append({"span": {"start": tok.idx, "end": tok.idx + len(tok.text),
                                        "text": tok.text},
                               "lemma": tok.lemma_.casefold(),
                               "pos": pos, "tense": tense, "sentence_index": index})
        entities = []
        for ent in self._ner(body):
            label = _NER_LABEL_MAP.get(ent["entity_group"].upper())
            if label is None:
                label = "MISC"
            start, end = int(ent["start"]), int(ent["end"])
            if start < end:
                entities.append({"label": label,
                                 "span": {"start": start, "end": end, "text": body[start:end]}})
        chains = []
        if self._coref is not None:
            chains = self._coref_chains(body)
        return {"sentences": sentences, "tokens": tokens, "entities": entities,
                "temporals": [], "coref_chains": chains, "qa_answers": []}

    def qa(self, context: str, question: str) -> tuple[str, float]:
        if self._qa is None:
            raise NeuralEngineUnavailable("models not loaded")
        result = self._qa(question=question, context=context)
        return (str(result.get("answer", "")), float(result.get("score", 0.0)))

    def _coref_chains(self, body: str) -> list[dict]:
        groups: dict[str, list[dict]] = {}
        for mention in self._coref(body):
            start, end = int(mention["start"]), int(mention["end"])
            if start >= end:
                continue
            groups.setdefault(mention["entity_group"], []).append(
                {"start": start, "end": end, "text": body[start:end]})
        return [{"mentions": mentions} for mentions in groups.values() if len(mentions) >= 2]


def _drop_overlaps(chunks: list[dict]) -> list[dict]:
    kept: list[dict] = []
    last_end = -1
    for chunk in chunks:
        if chunk["span"]["start"] >= last_end:
            kept.append(chunk)
            last_end = chunk["span"]["end"]
    return kept
