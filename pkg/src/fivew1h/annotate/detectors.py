"""Deterministic built-in detectors: temporal expressions and gerunds.

The temporal grammar is a data file of named regex patterns
(``data/temporal_patterns.json``), each classified TIME/DATE/SET/DURATION,
so coverage can grow without code changes. Detection and merging are
deterministic and idempotent.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from ..document import AnnotatedDocument, Span, TemporalSpan, Token

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

# Most precise first; drives merge class selection and the when-precision score.
PRECISION_ORDER = ("TIME", "DATE", "SET", "DURATION")

_MERGE_CONJUNCTIONS = {"et", "ou", "ni", "puis"}


@dataclass(frozen=True)
class TemporalPattern:
    name: str
    klass: str
    regex: re.Pattern


def load_temporal_patterns(path: str | Path | None = None) -> list[TemporalPattern]:
    path = Path(path) if path else DATA_DIR / "temporal_patterns.json"
    raw = json.loads(path.read_text(encoding="utf-8"))
    patterns = []
    for rec in raw:
        patterns.append(TemporalPattern(
            name=rec["name"],
            klass=rec["klass"],
            regex=re.compile(rec["pattern"], flags=re.IGNORECASE),
        ))
    return patterns


_DEFAULT_PATTERNS: list[TemporalPattern] | None = None


def default_temporal_patterns() -> list[TemporalPattern]:
    global _DEFAULT_PATTERNS
    if _DEFAULT_PATTERNS is None:
        _DEFAULT_PATTERNS = load_temporal_patterns()
    return _DEFAULT_PATTERNS


def detect_temporal_expressions(
    text: str,
    patterns: list[TemporalPattern] | None = None,
    offset: int = 0,
) -> list[TemporalSpan]:
    """Match the pattern grammar over one sentence's text.

    Overlapping matches resolve longest-first (ties: earlier start, then
    pattern order), so "chaque lundi" beats the bare weekday inside it.
    Offsets are shifted by ``offset`` into the host document.
    """
    if patterns is None:
        patterns = default_temporal_patterns()
    raw: list[tuple[int, int, int, int, str, str]] = []
    for order, pat in enumerate(patterns):
        for m in pat.regex.finditer(text):
            if m.start() == m.end():
                continue
            raw.append((-(m.end() - m.start()), m.start(), order, m.end(), pat.klass, m.group(0)))
    raw.sort()
    taken: list[tuple[int, int]] = []
    spans: list[TemporalSpan] = []
    for neg_len, start, _order, end, klass, matched in raw:
        if any(start < e and s < end for s, e in taken):
            continue
        taken.append((start, end))
        spans.append(TemporalSpan(klass=klass, span=Span(offset + start, offset + end, matched)))
    spans.sort(key=lambda t: t.span.start)
    return spans


def merge_adjacent_temporals(
    spans: list[TemporalSpan],
    doc: AnnotatedDocument,
) -> list[TemporalSpan]:
    """Merge runs of temporal spans separated only by conjunctions/punctuation.

    The merged span takes the most precise class present in its run
    (TIME > DATE > SET > DURATION). Idempotent: gaps between merged spans
    always contain non-mergeable material.
    """
    if not spans:
        return []
    body = doc.article.body
    ordered = sorted(spans, key=lambda t: (t.span.start, t.span.end))
    merged: list[list[TemporalSpan]] = [[ordered[0]]]
    for current in ordered[1:]:
        previous = merged[-1][-1]
        if current.span.start < previous.span.end:
            merged[-1].append(current)  # overlapping detections collapse
        elif _gap_is_separator(body, previous.span.end, current.span.start, doc):
            merged[-1].append(current)
        else:
            merged.append([current])
    out: list[TemporalSpan] = []
    for run in merged:
        if len(run) == 1:
            out.append(run[0])
            continue
        start = run[0].span.start
        end = max(t.span.end for t in run)
        klass = min(run, key=lambda t: PRECISION_ORDER.index(t.klass)).klass
        out.append(TemporalSpan(klass=klass, span=Span(start, end, body[start:end])))
    return out


def _gap_is_separator(body: str, start: int, end: int, doc: AnnotatedDocument) -> bool:
    if start >= end:
        return True
    gap = body[start:end]
    conj_from_pos = {
        t.span.text.casefold()
        for t in doc.tokens
        if t.pos == "CONJ" and start <= t.span.start and t.span.end <= end
    }
    allowed = _MERGE_CONJUNCTIONS | conj_from_pos
    for piece in re.findall(r"[^\W\d_]+", gap):
        if piece.casefold() not in allowed:
            return False
    # Any leftover characters are whitespace, digits, or punctuation.
    return not re.search(r"\d", gap)


def detect_gerunds(tokens: list[Token] | tuple[Token, ...]) -> list[int]:
    """Indices of VERB tokens ending in "ant" directly preceded by "en" (ADP)."""
    hits = []
    for i, tok in enumerate(tokens):
        if tok.pos != "VERB":
            continue
        if not tok.span.text.casefold().endswith("ant"):
            continue
        if i == 0:
            continue
        prev = tokens[i - 1]
        if prev.pos == "ADP" and prev.span.text.casefold() == "en":
            hits.append(i)
    return hits
