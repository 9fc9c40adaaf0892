"""Heuristic annotation provider: deterministic, model-free French layers.

Sentences come from punctuation rules, tokens from whitespace/punctuation
splitting with French elision handling, POS from closed-class lexicons plus
suffix heuristics, entities from capitalized-run detection cued by small
name/organization lexicons and the gazetteer. No coreference, no Q&A.

This provider exists so the test suite and the default pipeline run with no
models; its tagging is intentionally crude but stable.
"""

from __future__ import annotations

import re
from pathlib import Path

from ..document import Chunk, EntitySpan, RawArticle, Sentence, Span, Token
from ..resources import Gazetteer, load_gazetteer, load_lexicon
from .base import ProviderLayers

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

_LETTER = r"[^\W\d_]"
_TOKEN_RE = re.compile(
    rf"aujourd['’]hui"
    rf"|\d+(?:[.,]\d+)?"
    rf"|qu['’]"
    rf"|{_LETTER}['’]"
    rf"|{_LETTER}+(?:-{_LETTER}+)*"
    rf"|\S",
    re.IGNORECASE,
)

_SENTENCE_END_RE = re.compile(r"[.!?…]+[»”\")\]]*\s+")
_ABBREVIATIONS = {"m", "mm", "mme", "dr", "dre", "st", "ste", "p", "ex", "etc", "me", "pr", "art", "no"}

_DET = set("""le la les l' un une des du au aux ce cet cette ces mon ma mes ton ta tes son sa ses
notre nos votre vos leur leurs quel quelle quels quelles chaque plusieurs quelques tout toute
tous toutes aucun aucune certains certaines""".split())
_ADP = set("""à de d' en dans sur sous avec sans pour par chez vers entre derrière devant depuis
pendant durant contre selon via dès jusque jusqu' malgré parmi envers moyennant hors outre""".split())
_PRON = set("""il elle ils elles je j' tu nous vous on qui que qu' dont où se s' me m' te t' lui y
celui celle ceux celles cela ça ceci rien personne chacun chacune quiconque lequel laquelle""".split())
_CONJ = set("et ou mais donc or ni car quand lorsque si comme puisque quoique sinon tandis".split())
_AUX = set("""est sont était étaient sera seront serait seraient a ont avait avaient aura auront
aurait auraient été être avoir suis es sommes êtes ai as avons avez fut furent soit soient ayant étant""".split())
_ADV = set("""très plus moins bien mal déjà encore toujours jamais souvent parfois ici là ailleurs
hier demain maintenant bientôt tôt tard vite ensemble ainsi alors aussi trop assez peu beaucoup
environ presque surtout enfin ensuite puis avant après ne n' pas non oui aujourd'hui
rapidement clairement récemment actuellement immédiatement directement finalement particulièrement
probablement officiellement évidemment seulement notamment également gravement fortement largement
lentement prudemment progressivement automatiquement manuellement systématiquement conjointement
méthodiquement efficacement discrètement massivement autrement principalement essentiellement
graduellement cependant toutefois néanmoins pourtant""".split())
_NOUN_CLOSED = set("""janvier février mars avril mai juin juillet août septembre octobre novembre
décembre lundi mardi mercredi jeudi vendredi samedi dimanche été hiver automne printemps matin
soir nuit jour jours semaine semaines mois année années an ans heure heures minute minutes fois
midi minuit veille lendemain week-end""".split())

# Frequent non-verb words the suffix rules would mis-tag.
_NOT_VERB = set("""enfant enfants restaurant restaurants instant instants habitant habitants
montant montants géant géants volant carburant assistant assistante étudiant étudiants important
courant suivant vivant puissant président présent accident incident agent argent parent parents
client clients caméra opéra hier mer fer hiver cher amer super plaisir avenir loisir désir soupir
gens moment comment commentaire dent vent cent centre ministre membre nombre titre ordre cadre""".split())

# Frequent 3rd-person present forms the bare suffix rules cannot see
# (-er verbs end in a plain "e", colliding with nouns).
_COMMON_PRESENT_3SG = set("""annonce approuve confirme affirme déclare demande lance ferme ouvre
organise décide adopte présente dévoile publie propose estime ajoute explique précise souligne
indique dénonce critique accuse réclame menace protège bloque rejette vote signe crée salue
rencontre visite quitte réduit augmente finance investit promet prévoit déploie installe évacue
répare remplace transforme construit détruit annule suspend reporte révèle exige embauche
licencie manifeste proteste négocie enquête juge témoigne gagne perd paie verse débute continue
termine commence fonctionne célèbre inaugure rénove reconstruit arrose creuse surveille évalue
planifie confie accorde refuse retire dépose retourne arrive reste demeure devient semble""".split())

_IRREGULAR_3SG_LEMMAS = {
    "investit": "investir", "promet": "promettre", "prévoit": "prévoir", "réduit": "réduire",
    "construit": "construire", "détruit": "détruire", "reconstruit": "reconstruire",
    "suspend": "suspendre", "perd": "perdre", "devient": "devenir",
}

_IRREGULAR_VERBS = {
    "dit": ("dire", "PAST"), "fait": ("faire", "PAST"), "faisant": ("faire", "PARTICIPLE_PRESENT"),
    "mis": ("mettre", "PAST"), "pris": ("prendre", "PAST"), "vu": ("voir", "PAST"),
    "eu": ("avoir", "PAST"), "peut": ("pouvoir", "PRESENT"), "veut": ("vouloir", "PRESENT"),
    "doit": ("devoir", "PRESENT"), "va": ("aller", "PRESENT"), "vont": ("aller", "PRESENT"),
    "sait": ("savoir", "PRESENT"), "faut": ("falloir", "PRESENT"),
    "devra": ("devoir", "FUTURE"), "devront": ("devoir", "FUTURE"),
    "pourra": ("pouvoir", "FUTURE"), "pourront": ("pouvoir", "FUTURE"),
    "fera": ("faire", "FUTURE"), "feront": ("faire", "FUTURE"),
    "ira": ("aller", "FUTURE"), "iront": ("aller", "FUTURE"),
    "prend": ("prendre", "PRESENT"), "prennent": ("prendre", "PRESENT"),
    "met": ("mettre", "PRESENT"), "mettent": ("mettre", "PRESENT"),
    "rend": ("rendre", "PRESENT"), "rendent": ("rendre", "PRESENT"),
    "vient": ("venir", "PRESENT"), "viennent": ("venir", "PRESENT"),
    "tient": ("tenir", "PRESENT"), "tiennent": ("tenir", "PRESENT"),
    "suit": ("suivre", "PRESENT"), "vit": ("vivre", "PRESENT"),
    "craint": ("craindre", "PRESENT"), "meurt": ("mourir", "PRESENT"),
}

_RUN_CONNECTORS = {"de", "du", "des", "le", "la", "les", "d'", "d’", "l'", "l’"}


def _split_paragraph_sentences(text: str, base: int) -> list[tuple[int, int]]:
    bounds: list[tuple[int, int]] = []
    start = 0
    for m in _SENTENCE_END_RE.finditer(text):
        nxt = m.end()
        if nxt >= len(text):
            break
        follower = text[nxt]
        if not (follower.isupper() or follower.isdigit() or follower in "«\"“‘'("):
            continue
        before = text[:m.start()].rstrip()
        last_word = re.split(r"[\s'’]", before)[-1] if before else ""
        if text[m.start()] == "." and last_word.casefold().rstrip(".") in _ABBREVIATIONS:
            continue
        bounds.append((start, m.end()))
        start = nxt
    if start < len(text):
        bounds.append((start, len(text)))
    out = []
    for s, e in bounds:
        chunk = text[s:e]
        ls = len(chunk) - len(chunk.lstrip())
        rs = len(chunk) - len(chunk.rstrip())
        if s + ls < e - rs:
            out.append((base + s + ls, base + e - rs))
    return out


def split_sentence_spans(body: str) -> list[tuple[int, int]]:
    """Sentence boundaries: newlines are hard breaks, then punctuation rules."""
    spans: list[tuple[int, int]] = []
    offset = 0
    for line in body.split("\n"):
        if line.strip():
            spans.extend(_split_paragraph_sentences(line, offset))
        offset += len(line) + 1
    return spans


class HeuristicProvider:
    name = "heuristic"
    capabilities = frozenset({"sentences", "tokens", "pos", "chunks", "ner"})

    def __init__(self, gazetteer: Gazetteer | None = None, data_dir: str | Path | None = None):
        data_dir = Path(data_dir) if data_dir else DATA_DIR
        self.gazetteer = gazetteer if gazetteer is not None else load_gazetteer(data_dir / "gazetteer.json")
        self.first_names = load_lexicon(data_dir / "first_names.txt").entries
        self.org_cues = load_lexicon(data_dir / "org_cues.txt").entries
        self.per_titles = load_lexicon(data_dir / "per_titles.txt").entries

    # --- POS / lemma / tense -------------------------------------------

    def _closed_class(self, low: str) -> str | None:
        if low in _DET:
            return "DET"
        if low in _ADP:
            return "ADP"
        if low in _PRON:
            return "PRON"
        if low in _CONJ:
            return "CONJ"
        if low in _AUX:
            return "AUX"
        if low in _ADV:
            return "ADV"
        if low in _NOUN_CLOSED:
            return "NOUN"
        return None

    def _verb_by_suffix(self, low: str) -> tuple[str, str] | None:
        if low in _NOT_VERB:
            return None
        if low in _IRREGULAR_VERBS:
            return _IRREGULAR_VERBS[low]
        if low in _COMMON_PRESENT_3SG:
            if low.endswith(("it", "end", "ut")):
                return (_IRREGULAR_3SG_LEMMAS.get(low, low), "PRESENT")
            return (low[:-1] + "er" if low.endswith("e") else low, "PRESENT")
        n = len(low)
        if low.endswith("ant") and n >= 5:
            if low.endswith("issant"):
                lemma = low[:-6] + "ir"
            elif low.endswith("uisant"):
                lemma = low[:-6] + "uire"
            else:
                lemma = low[:-3] + "er"
            return (lemma, "PARTICIPLE_PRESENT")
        for ending in ("eraient", "erait", "iraient", "irait"):
            if low.endswith(ending) and n >= len(ending) + 3:
                return (low[: -len(ending)] + ending[0] + "r", "OTHER")
        if n >= 7 and (low.endswith("rait") or low.endswith("raient")):
            cut = 4 if low.endswith("rait") else 6
            return (low[:-cut] + "re", "OTHER")
        for ending in ("erai", "eras", "era", "erons", "erez", "eront",
                       "irai", "iras", "ira", "irons", "irez", "iront"):
            if low.endswith(ending) and n >= len(ending) + 3:
                return (low[: -len(ending)] + ending[0] + "r", "FUTURE")
        if n >= 5 and (low.endswith("aient") or low.endswith("ait") or low.endswith("ais")):
            cut = 5 if low.endswith("aient") else 3
            return (low[:-cut] + "er", "PAST")
        if n >= 4 and low.endswith(("ée", "és", "ées")):
            cut = 2 if low.endswith("ée") else (2 if low.endswith("és") else 3)
            return (low[:-cut] + "er", "PAST")
        if n >= 4 and low.endswith("é"):
            return (low[:-1] + "er", "PAST")
        if n >= 5 and low.endswith(("ent", "ons", "ez")) and not low.endswith("ment"):
            cut = 3 if low.endswith(("ent", "ons")) else 2
            return (low[:-cut] + "er", "PRESENT")
        if n >= 4 and low.endswith("er") and not low.endswith("ier"):
            return (low, "OTHER")
        if n >= 4 and low.endswith("ir"):
            return (low, "OTHER")
        return None

    def _aux_tense(self, low: str) -> str:
        if low in {"sera", "seront", "aura", "auront"}:
            return "FUTURE"
        if low in {"était", "étaient", "avait", "avaient", "fut", "furent", "été"}:
            return "PAST"
        if low in {"serait", "seraient", "aurait", "auraient"}:
            return "OTHER"
        return "PRESENT"

    def _tag(self, surface: str, sentence_initial: bool, next_capitalized: bool) -> tuple[str, str, str | None]:
        """Return (pos, lemma, tense) for one token surface."""
        low = surface.casefold().replace("’", "'")
        if not any(ch.isalnum() for ch in surface):
            return ("PUNCT", surface, None)
        if surface[0].isdigit():
            return ("NUM", low, None)
        capitalized = surface[0].isupper()
        closed = self._closed_class(low)
        if capitalized and not sentence_initial and closed is None:
            return ("PROPN", low, None)
        if capitalized and sentence_initial and closed is None:
            known = (low in self.first_names or low in self.org_cues
                     or self.gazetteer.lookup(surface) is not None)
            if known or next_capitalized:
                return ("PROPN", low, None)
        if closed == "AUX":
            return ("AUX", "être" if low in {"est", "sont", "était", "étaient", "sera", "seront",
                                             "serait", "seraient", "été", "être", "suis", "es",
                                             "sommes", "êtes", "fut", "furent", "soit", "soient",
                                             "étant"} else "avoir",
                    self._aux_tense(low))
        if closed is not None:
            return (closed, low, None)
        verb = self._verb_by_suffix(low)
        if verb is not None:
            lemma, tense = verb
            return ("VERB", lemma, tense)
        return ("NOUN", low, None)

    # --- layers ---------------------------------------------------------

    def annotate_layers(self, article: RawArticle) -> ProviderLayers:
        body = article.body
        sentence_spans = split_sentence_spans(body)
        tokens: list[Token] = []
        sentences: list[Sentence] = []
        entities: list[EntitySpan] = []

        for s_index, (s_start, s_end) in enumerate(sentence_spans):
            sentence_text = body[s_start:s_end]
            raw = [(m.start() + s_start, m.end() + s_start, m.group(0))
                   for m in _TOKEN_RE.finditer(sentence_text)]
            sentence_token_start = len(tokens)
            for j, (t_start, t_end, surface) in enumerate(raw):
                next_cap = j + 1 < len(raw) and raw[j + 1][2][:1].isupper()
                pos, lemma, tense = self._tag(surface, sentence_initial=(j == 0), next_capitalized=next_cap)
                tokens.append(Token(span=Span(t_start, t_end, surface), lemma=lemma, pos=pos,
                                    tense=tense, sentence_index=s_index))
            sentence_tokens = tokens[sentence_token_start:]
            chunks = self._chunk(sentence_tokens, sentence_token_start, body)
            root_kind = "VP" if any(c.kind == "VP" for c in chunks) else ("NP" if chunks else "OTHER")
            sentences.append(Sentence(index=s_index, span=Span(s_start, s_end, sentence_text),
                                      root_kind=root_kind, chunk_sequence=tuple(chunks)))
            entities.extend(self._entities(sentence_tokens, body))

        return ProviderLayers(sentences=tuple(sentences), tokens=tuple(tokens), entities=tuple(entities))

    def _chunk(self, sentence_tokens: list[Token], base_index: int, body: str) -> list[Chunk]:
        np_pos = {"DET", "NOUN", "PROPN", "NUM", "ADJ", "PRON"}
        vp_pos = {"VERB", "AUX"}
        chunks: list[Chunk] = []
        kind: str | None = None
        members: list[int] = []

        def close() -> None:
            nonlocal kind, members
            if kind and members:
                toks = [sentence_tokens[i] for i in members]
                if kind == "VP" and not any(t.pos in vp_pos for t in toks):
                    kind, members = None, []
                    return
                head_pref = {"NOUN", "PROPN", "NUM", "PRON"} if kind == "NP" else {"VERB"}
                head = members[-1]
                for i in reversed(members):
                    if sentence_tokens[i].pos in head_pref:
                        head = i
                        break
                else:
                    if kind == "VP":
                        for i in reversed(members):
                            if sentence_tokens[i].pos == "AUX":
                                head = i
                                break
                start = sentence_tokens[members[0]].span.start
                end = sentence_tokens[members[-1]].span.end
                span = Span(start, end, body[start:end])
                chunks.append(Chunk(kind=kind, span=span, head_token=base_index + head))
            kind, members = None, []

        for i, tok in enumerate(sentence_tokens):
            if tok.pos in vp_pos:
                if kind != "VP":
                    close()
                    kind = "VP"
                members.append(i)
            elif tok.pos in np_pos:
                if kind != "NP":
                    close()
                    kind = "NP"
                members.append(i)
            elif tok.pos == "ADV" and kind == "VP":
                members.append(i)
            else:
                close()
        close()
        return chunks

    def _entities(self, sentence_tokens: list[Token], body: str) -> list[EntitySpan]:
        entities: list[EntitySpan] = []
        n = len(sentence_tokens)
        i = 0
        while i < n:
            if not self._startable(sentence_tokens, i):
                i += 1
                continue
            run = [i]
            j = i + 1
            while j < n:
                cand = sentence_tokens[j]
                low = cand.span.text.casefold()
                if cand.span.text[:1].isupper() and cand.pos != "PUNCT":
                    run.append(j)
                    j += 1
                elif low in _RUN_CONNECTORS and j + 1 < n and sentence_tokens[j + 1].span.text[:1].isupper():
                    run.append(j)
                    j += 1
                else:
                    break
            start = sentence_tokens[run[0]].span.start
            end = sentence_tokens[run[-1]].span.end
            label = self._classify_run(sentence_tokens, run, body[start:end])
            if label is not None:
                entities.append(EntitySpan(label=label, span=Span(start, end, body[start:end])))
            i = j
        return entities

    def _startable(self, sentence_tokens: list[Token], i: int) -> bool:
        tok = sentence_tokens[i]
        surface = tok.span.text
        if not surface[:1].isupper() or tok.pos == "PUNCT":
            return False
        low = surface.casefold()
        if i > 0:
            return low not in _RUN_CONNECTORS or (i + 1 < len(sentence_tokens)
                                                  and sentence_tokens[i + 1].span.text[:1].isupper())
        if low in self.first_names or low in self.org_cues or self.gazetteer.lookup(surface) is not None:
            return True
        return i + 1 < len(sentence_tokens) and sentence_tokens[i + 1].span.text[:1].isupper()

    def _classify_run(self, sentence_tokens: list[Token], run: list[int], text: str) -> str | None:
        toks = [sentence_tokens[i] for i in run]
        lows = [t.span.text.casefold() for t in toks]
        content = [i for i, t in zip(run, toks) if t.span.text.casefold() not in _RUN_CONNECTORS]
        if not content:
            return None
        if any(low in self.org_cues for low in lows):
            return "ORG"
        if any(len(t.span.text) >= 2 and t.span.text.isupper() for t in toks):
            return "ORG"
        first = run[0]
        title_window = sentence_tokens[max(0, first - 2):first]
        if lows[0] in self.first_names or any(
                w.span.text.casefold() in self.per_titles for w in title_window):
            return "PER"
        if self.gazetteer.lookup(text) is not None or any(
                self.gazetteer.lookup(t.span.text) is not None for t in toks):
            return "LOC"
        if len(content) >= 2:
            return "PER"
        return "MISC"


def _infinitive_from_stem(stem: str) -> str:
    if stem.endswith(("er", "ir")):
        return stem
    if stem.endswith("r"):
        return stem + "e"
    return stem + "er"
