"""Lexicon store and geographic gazetteer.

Lexicon files are UTF-8, one entry per line, ``#`` comments and blank lines
ignored, with an optional header line ``match_on: lemma``. The gazetteer is
a JSON list of place records carrying area, bounding box, and a parent
chain used for containment checks.
"""

from __future__ import annotations

import json
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .document import Span, Token

log = logging.getLogger(__name__)

MATCH_SURFACE = "SURFACE"
MATCH_LEMMA = "LEMMA"

# Longest multiword lexicon entry we attempt to match, in tokens.
_MAX_WINDOW = 8


class ResourceError(Exception):
    pass


def strip_diacritics(text: str) -> str:
    decomposed = unicodedata.normalize("NFD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def _letters_key(text: str) -> str:
    """Lowercased, diacritic-stripped, letters-and-digits-only key.

    Robust to apostrophes, spacing, and heuristic-lemmatizer cedilla drift
    ("annonçer" vs "annoncer").
    """
    return "".join(ch for ch in strip_diacritics(text.casefold()) if ch.isalnum())


@dataclass(frozen=True)
class Lexicon:
    name: str
    entries: frozenset[str]
    match_on: str = MATCH_SURFACE

    def __contains__(self, entry: str) -> bool:
        return entry.casefold() in self.entries

    @staticmethod
    def merged(name: str, *parts: "Lexicon") -> "Lexicon":
        if not parts:
            raise ResourceError("merged() needs at least one lexicon")
        modes = {p.match_on for p in parts}
        if len(modes) != 1:
            raise ResourceError(f"cannot merge lexicons with mixed match modes: {sorted(modes)}")
        entries = frozenset().union(*(p.entries for p in parts))
        return Lexicon(name=name, entries=entries, match_on=modes.pop())


@dataclass(frozen=True)
class LexiconMatch:
    span: Span
    entry: str


def load_lexicon(path: str | Path, name: str | None = None) -> Lexicon:
    """Load a lexicon file; entries lowercased and deduplicated."""
    path = Path(path)
    match_on = MATCH_SURFACE
    entries: list[str] = []
    for raw_line in path.read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        header = re.fullmatch(r"match_on:\s*(\w+)", line, flags=re.IGNORECASE)
        if header:
            mode = header.group(1).upper()
            if mode not in (MATCH_SURFACE, MATCH_LEMMA):
                raise ResourceError(f"{path}: unknown match_on mode {mode!r}")
            match_on = mode
            continue
        entries.append(line.casefold())
    if not entries:
        raise ResourceError(f"{path}: lexicon has no entries")
    seen: set[str] = set()
    unique: list[str] = []
    for e in entries:
        if e in seen:
            log.warning("%s: duplicate lexicon entry %r kept once", path, e)
            continue
        seen.add(e)
        unique.append(e)
    return Lexicon(name=name or path.stem, entries=frozenset(unique), match_on=match_on)


def match_lexicon(lex: Lexicon, tokens: list[Token] | tuple[Token, ...]) -> list[LexiconMatch]:
    """Longest-match-first, non-overlapping matches over a token sequence.

    Multiword entries match contiguous token runs; comparison uses a
    normalized letters-only key so elided forms ("l'effet") line up with
    their space-separated lexicon entries.
    """
    if not tokens:
        return []
    by_key: dict[str, str] = {}
    max_words = 1
    for entry in sorted(lex.entries):
        key = _letters_key(entry)
        if key:
            by_key.setdefault(key, entry)
            max_words = max(max_words, len(entry.split()))
    window_cap = min(_MAX_WINDOW, max(max_words * 2, 1))

    def token_key(tok: Token) -> str:
        base = tok.lemma if lex.match_on == MATCH_LEMMA else tok.span.text
        return _letters_key(base)

    keys = [token_key(t) for t in tokens]
    matches: list[LexiconMatch] = []
    i = 0
    n = len(tokens)
    while i < n:
        if not keys[i]:
            i += 1
            continue
        found = None
        for width in range(min(window_cap, n - i), 0, -1):
            window = keys[i:i + width]
            if any(not k for k in window):
                continue
            candidate = "".join(window)
            entry = by_key.get(candidate)
            if entry is not None:
                found = (width, entry)
                break
        if found is None:
            i += 1
            continue
        width, entry = found
        start = tokens[i].span.start
        end = tokens[i + width - 1].span.end
        # Span text is rebuilt by the caller's document; store the raw window.
        text = " ".join(t.span.text for t in tokens[i:i + width])
        matches.append(LexiconMatch(span=Span(start, end, text), entry=entry))
        i += width
    return matches


def match_lexicon_in_text(lex: Lexicon, tokens: list[Token] | tuple[Token, ...], body: str) -> list[LexiconMatch]:
    """Like match_lexicon but with span text taken verbatim from the body."""
    out = []
    for m in match_lexicon(lex, tokens):
        out.append(LexiconMatch(span=Span(m.span.start, m.span.end, body[m.span.start:m.span.end]), entry=m.entry))
    return out


def expand_with_synonyms(lex: Lexicon, table_path: str | Path) -> Lexicon:
    """Union the lexicon with synonyms of its existing entries.

    Table format: ``entry<TAB>syn1,syn2``. Offline build step; monotone and
    idempotent for a fixed table.
    """
    table_path = Path(table_path)
    if not table_path.exists():
        raise ResourceError(f"synonym table not found: {table_path}")
    table: dict[str, list[str]] = {}
    for raw_line in table_path.read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" not in line:
            raise ResourceError(f"{table_path}: malformed synonym line {line!r}")
        entry, syns = line.split("\t", 1)
        table[entry.strip().casefold()] = [s.strip().casefold() for s in syns.split(",") if s.strip()]
    added: set[str] = set()
    for entry in lex.entries:
        added.update(table.get(entry, ()))
    return Lexicon(name=lex.name, entries=lex.entries | frozenset(added), match_on=lex.match_on)


# --- gazetteer -------------------------------------------------------------


@dataclass(frozen=True)
class GazetteerEntry:
    id: str
    name: str
    aliases: tuple[str, ...] = ()
    area_m2: float | None = None
    bbox: tuple[float, float, float, float] | None = None  # min_lat, min_lon, max_lat, max_lon
    parent_id: str | None = None


@dataclass
class Gazetteer:
    entries: dict[str, GazetteerEntry] = field(default_factory=dict)
    _by_name: dict[str, str] = field(default_factory=dict)

    @staticmethod
    def _norm(name: str) -> str:
        return strip_diacritics(name.casefold()).strip()

    def add(self, entry: GazetteerEntry) -> None:
        if entry.bbox is not None:
            min_lat, min_lon, max_lat, max_lon = entry.bbox
            if not (min_lat < max_lat and min_lon < max_lon):
                raise ResourceError(f"gazetteer {entry.id}: degenerate bbox {entry.bbox}")
        if entry.area_m2 is not None and entry.area_m2 <= 0:
            raise ResourceError(f"gazetteer {entry.id}: area must be > 0")
        self.entries[entry.id] = entry
        for key in (entry.name, *entry.aliases):
            self._by_name.setdefault(self._norm(key), entry.id)

    def lookup(self, name: str) -> GazetteerEntry | None:
        entry_id = self._by_name.get(self._norm(name))
        return self.entries.get(entry_id) if entry_id else None

    def parent_chain(self, entry: GazetteerEntry) -> list[GazetteerEntry]:
        chain: list[GazetteerEntry] = []
        seen = {entry.id}
        current = entry
        while current.parent_id:
            parent = self.entries.get(current.parent_id)
            if parent is None or parent.id in seen:
                break
            chain.append(parent)
            seen.add(parent.id)
            current = parent
        return chain

    def contains(self, outer: GazetteerEntry, inner: GazetteerEntry) -> bool:
        """True iff inner sits inside outer (parent chain or bbox inclusion).

        Irreflexive by convention; unknown geometry yields False.
        """
        if outer.id == inner.id:
            return False
        if any(p.id == outer.id for p in self.parent_chain(inner)):
            return True
        if outer.bbox is not None and inner.bbox is not None:
            o_min_lat, o_min_lon, o_max_lat, o_max_lon = outer.bbox
            i_min_lat, i_min_lon, i_max_lat, i_max_lon = inner.bbox
            return (o_min_lat <= i_min_lat and i_max_lat <= o_max_lat
                    and o_min_lon <= i_min_lon and i_max_lon <= o_max_lon)
        return False


def load_gazetteer(path: str | Path) -> Gazetteer:
    path = Path(path)
    try:
        records = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ResourceError(f"{path}: malformed gazetteer JSON: {exc}") from exc
    if not isinstance(records, list):
        raise ResourceError(f"{path}: gazetteer must be a JSON list of records")
    gaz = Gazetteer()
    for rec in records:
        bbox = tuple(rec["bbox"]) if rec.get("bbox") else None
        gaz.add(GazetteerEntry(
            id=rec["id"],
            name=rec["name"],
            aliases=tuple(rec.get("aliases", ())),
            area_m2=rec.get("area_m2"),
            bbox=bbox,  # type: ignore[arg-type]
            parent_id=rec.get("parent_id"),
        ))
    for entry in gaz.entries.values():
        seen = {entry.id}
        current = entry
        while current.parent_id:
            if current.parent_id in seen:
                raise ResourceError(f"{path}: parent cycle through {entry.id}")
            seen.add(current.parent_id)
            nxt = gaz.entries.get(current.parent_id)
            if nxt is None:
                break
            current = nxt
    return gaz


def lookup_location(name: str, gaz: Gazetteer) -> GazetteerEntry | None:
    """Case- and diacritic-insensitive match on canonical name or alias."""
    return gaz.lookup(name)


def contains(outer: GazetteerEntry, inner: GazetteerEntry, gaz: Gazetteer) -> bool:
    return gaz.contains(outer, inner)
