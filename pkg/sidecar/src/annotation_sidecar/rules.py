"""Deterministic rule-based annotation engine.

Stands in for the neural stack when models are unavailable (CI, tests,
air-gapped runs): punctuation sentence splitting, regex tokenization with
French elision, closed-class + suffix POS tagging, flat NP/VP chunking,
capitalized-run entity detection, exact-repetition coreference chains, and
overlap-scored extractive QA. Identical input always yields identical
output.
"""

from __future__ import annotations

import re
from collections import Counter

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
_ABBREVIATIONS = {"m", "mm", "mme", "dr", "dre", "st", "ste", "p", "ex", "etc", "me", "pr"}

_DET = set("""le la les l' un une des du au aux ce cet cette ces mon ma mes son sa ses notre nos
votre vos leur leurs quel quelle quels quelles chaque plusieurs quelques tout toute tous toutes""".split())
_ADP = set("""à de d' en dans sur sous avec sans pour par chez vers entre derrière devant depuis
pendant durant contre selon via dès jusque jusqu' malgré parmi envers moyennant hors""".split())
_PRON = set("""il elle ils elles je j' tu nous vous on qui que qu' dont où se s' me m' te t' lui y
celui celle ceux celles cela ça ceci rien personne chacun""".split())
_CONJ = set("et ou mais donc or ni car quand lorsque si comme puisque quoique sinon".split())
_AUX = set("""est sont était étaient sera seront serait seraient a ont avait avaient aura auront
aurait auraient été être avoir suis es sommes êtes ai as avons avez fut furent soit soient ayant étant""".split())
_ADV = set("""très plus moins bien mal déjà encore toujours jamais souvent parfois ici là hier
demain maintenant bientôt tôt tard vite ensemble ainsi alors aussi trop assez peu beaucoup environ
presque surtout enfin ensuite puis avant après ne n' pas non oui aujourd'hui notamment également
seulement rapidement récemment actuellement immédiatement finalement cependant toutefois""".split())
_NOUN_CLOSED = set("""janvier février mars avril mai juin juillet août septembre octobre novembre
décembre lundi mardi mercredi jeudi vendredi samedi dimanche été hiver automne printemps matin soir
nuit jour jours semaine semaines mois année années an ans heure heures minute minutes fois midi minuit""".split())
_NOT_VERB = set("""enfant enfants restaurant instant habitant habitants montant important courant
suivant vivant puissant président présent accident agent argent parent parents client moment
comment gens dent vent cent centre ministre membre nombre titre ordre cadre caméra hier mer fer
hiver cher plaisir avenir loisir désir""".split())
_PRESENT_3SG = set("""annonce approuve confirme affirme déclare demande lance ferme ouvre organise
décide adopte présente dévoile publie propose estime ajoute explique précise souligne indique
dénonce critique accuse réclame menace protège bloque rejette vote signe crée salue rencontre
visite quitte réduit augmente finance investit promet prévoit déploie installe évacue répare
remplace transforme construit détruit reste demeure devient semble débute continue termine commence""".split())
_IRREGULAR = {
    "dit": ("dire", "PAST"), "fait": ("faire", "PAST"), "faisant": ("faire", "PARTICIPLE_PRESENT"),
    "mis": ("mettre", "PAST"), "pris": ("prendre", "PAST"), "vu": ("voir", "PAST"),
    "peut": ("pouvoir", "PRESENT"), "veut": ("vouloir", "PRESENT"), "doit": ("devoir", "PRESENT"),
    "va": ("aller", "PRESENT"), "vont": ("aller", "PRESENT"),
    "fera": ("faire", "FUTURE"), "feront": ("faire", "FUTURE"),
    "devra": ("devoir", "FUTURE"), "pourra": ("pouvoir", "FUTURE"),
}
_ORG_CUES = set("""société ministère université banque groupe agence commission fédération syndicat
conseil office régie institut centre association entreprise fondation coopérative caisse chambre
bureau comité direction parti hydro-québec radio-canada sûreté presse journal devoir""".split())
_PER_TITLES = set("""m. mme dr dre me pr monsieur madame ministre président présidente député
députée maire mairesse chef porte-parole directeur directrice professeur professeure première premier""".split())
_FIRST_NAMES = set("""justin françois valérie sophie marie jean pierre catherine philippe geneviève
marc julie luc simon isabelle martin paul jacques denis claude michel anne chantal éric patrick
stéphane caroline mélanie alexandre gabriel david daniel richard maxime hugo léa camille émile
félix olivier nathalie sylvie lucie bruno andré gilles serge louise hélène dominique mathieu
nicolas sarah laurent véronique guillaume antoine thomas émilie étienne yves robert benoît""".split())
_PLACES = set("""montréal québec canada ottawa gatineau laval sherbrooke saguenay lévis longueuil
toronto ontario trois-rivières paris france états-unis new york washington vancouver calgary""".split())
_CONNECTORS = {"de", "du", "des", "le", "la", "les", "d'", "d’", "l'", "l’"}

_NP_POS = {"DET", "NOUN", "PROPN", "NUM", "ADJ", "PRON"}
_VP_POS = {"VERB", "AUX"}

_WORD_RE = re.compile(r"[^\W\d_]+")


def _split_sentences(body: str) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    offset = 0
    for line in body.split("\n"):
        if line.strip():
            start = 0
            bounds = []
            for m in _SENTENCE_END_RE.finditer(line):
                nxt = m.end()
                if nxt >= len(line):
                    break
                if not (line[nxt].isupper() or line[nxt].isdigit() or line[nxt] in "«\"“("):
                    continue
                before = line[:m.start()].rstrip()
                last = re.split(r"[\s'’]", before)[-1] if before else ""
                if line[m.start()] == "." and last.casefold().rstrip(".") in _ABBREVIATIONS:
                    continue
                bounds.append((start, m.end()))
                start = nxt
            if start < len(line):
                bounds.append((start, len(line)))
            for s, e in bounds:
                chunk = line[s:e]
                ls = len(chunk) - len(chunk.lstrip())
                rs = len(chunk) - len(chunk.rstrip())
                if s + ls < e - rs:
                    spans.append((offset + s + ls, offset + e - rs))
        offset += len(line) + 1
    return spans


def _verb_by_suffix(low: str) -> tuple[str, str] | None:
    if low in _NOT_VERB:
        return None
    if low in _IRREGULAR:
        return _IRREGULAR[low]
    if low in _PRESENT_3SG:
        return (low[:-1] + "er" if low.endswith("e") else low, "PRESENT")
    n = len(low)
    if low.endswith("ant") and n >= 5:
        if low.endswith("issant"):
            return (low[:-6] + "ir", "PARTICIPLE_PRESENT")
        if low.endswith("uisant"):
            return (low[:-6] + "uire", "PARTICIPLE_PRESENT")
        return (low[:-3] + "er", "PARTICIPLE_PRESENT")
    for ending in ("erai", "eras", "era", "erons", "erez", "eront",
                   "irai", "iras", "ira", "irons", "irez", "iront"):
        if low.endswith(ending) and n >= len(ending) + 3:
            return (low[: -len(ending)] + ending[0] + "r", "FUTURE")
    if n >= 5 and (low.endswith("aient") or low.endswith("ait") or low.endswith("ais")):
        cut = 5 if low.endswith("aient") else 3
        return (low[:-cut] + "er", "PAST")
    if n >= 4 and low.endswith(("ée", "és", "ées")):
        cut = 3 if low.endswith("ées") else 2
        return (low[:-cut] + "er", "PAST")
    if n >= 4 and low.endswith("é"):
        return (low[:-1] + "er", "PAST")
    if n >= 5 and low.endswith(("ent", "ons", "ez")) and not low.endswith("ment"):
        cut = 3 if low.endswith(("ent", "ons")) else 2
        return (low[:-cut] + "er", "PRESENT")
    if n >= 4 and low.endswith("er") and not low.endswith("ier"):
        return (low, "OTHER")
    return None


def _aux_info(low: str) -> tuple[str, str]:
    lemma = "être" if low in {"est", "sont", "était", "étaient", "sera", "seront", "serait",
                              "seraient", "été", "être", "suis", "es", "sommes", "êtes", "fut",
                              "furent", "soit", "soient", "étant"} else "avoir"
    if low in {"sera", "seront", "aura", "auront"}:
        return lemma, "FUTURE"
    if low in {"était", "étaient", "avait", "avaient", "fut", "furent", "été"}:
        return lemma, "PAST"
    return lemma, "PRESENT"


class RuleEngine:
    name = "rules"

    def annotate(self, article_id: str, title: str, body: str) -> dict:
        sentence_spans = _split_sentences(body)
        tokens: list[dict] = []
        sentences: list[dict] = []
        entities: list[dict] = []
        propn_runs: list[tuple[str, int, int]] = []

        for index, (s_start, s_end) in enumerate(sentence_spans):
            text = body[s_start:s_end]
            raw = [(m.start() + s_start, m.end() + s_start, m.group(0))
                   for m in _TOKEN_RE.finditer(text)]
            base = len(tokens)
            for j, (t_start, t_end, surface) in enumerate(raw):
                next_cap = j + 1 < len(raw) and raw[j + 1][2][:1].isupper()
                pos, lemma, tense = self._tag(surface, j == 0, next_cap)
                tokens.append({
                    "span": {"start": t_start, "end": t_end, "text": surface},
                    "lemma": lemma, "pos": pos, "tense": tense, "sentence_index": index,
                })
            sentence_tokens = tokens[base:]
            chunks = self._chunks(sentence_tokens, base, body)
            root_kind = "VP" if any(c["kind"] == "VP" for c in chunks) else ("NP" if chunks else "OTHER")
            sentences.append({
                "index": index,
                "span": {"start": s_start, "end": s_end, "text": text},
                "root_kind": root_kind,
                "chunks": chunks,
            })
            for run_start, run_end, label in self._entity_runs(sentence_tokens):
                surface = body[run_start:run_end]
                entities.append({"label": label,
                                 "span": {"start": run_start, "end": run_end, "text": surface}})
                propn_runs.append((surface.casefold(), run_start, run_end))

        chains = []
        by_surface: dict[str, list[tuple[int, int]]] = {}
        for surface, start, end in propn_runs:
            by_surface.setdefault(surface, []).append((start, end))
        for surface in sorted(by_surface):
            mentions = sorted(set(by_surface[surface]))
            if len(mentions) >= 2:
                chains.append({"mentions": [
                    {"start": s, "end": e, "text": body[s:e]} for s, e in mentions
                ]})

        return {
            "sentences": sentences,
            "tokens": tokens,
            "entities": entities,
            "temporals": [],
            "coref_chains": chains,
            "qa_answers": [],
        }

    def qa(self, context: str, question: str) -> tuple[str, float]:
        """Best sentence by long-word overlap with the question."""
        spans = _split_sentences(context)
        if not spans:
            return ("", 0.0)
        q_words = Counter(w.casefold() for w in _WORD_RE.findall(question) if len(w) >= 4)
        best_text, best_score = context[spans[0][0]:spans[0][1]], 0.0
        for start, end in spans:
            sentence = context[start:end]
            s_words = Counter(w.casefold() for w in _WORD_RE.findall(sentence) if len(w) >= 4)
            total = sum(q_words.values()) + sum(s_words.values())
            score = 2.0 * sum((q_words & s_words).values()) / total if total else 0.0
            if score > best_score:
                best_text, best_score = sentence, score
        return (best_text, round(best_score, 6))

    # -- internals -------------------------------------------------------

    def _tag(self, surface: str, sentence_initial: bool, next_cap: bool) -> tuple[str, str, str | None]:
        low = surface.casefold().replace("’", "'")
        if not any(ch.isalnum() for ch in surface):
            return ("PUNCT", surface, None)
        if surface[0].isdigit():
            return ("NUM", low, None)
        capitalized = surface[0].isupper()
        for pos, table in (("DET", _DET), ("ADP", _ADP), ("PRON", _PRON), ("CONJ", _CONJ)):
            if low in table:
                if capitalized and not sentence_initial:
                    return ("PROPN", low, None)
                return (pos, low, None)
        if low in _AUX:
            lemma, tense = _aux_info(low)
            return ("AUX", lemma, tense)
        if low in _ADV:
            return ("ADV", low, None)
        if low in _NOUN_CLOSED:
            return ("NOUN", low, None)
        if capitalized and not sentence_initial:
            return ("PROPN", low, None)
        if capitalized and sentence_initial and (
                low in _FIRST_NAMES or low in _ORG_CUES or low in _PLACES or next_cap):
            return ("PROPN", low, None)
        verb = _verb_by_suffix(low)
        if verb is not None:
            return ("VERB", verb[0], verb[1])
        return ("NOUN", low, None)

    def _chunks(self, sentence_tokens: list[dict], base: int, body: str) -> list[dict]:
        chunks: list[dict] = []
        kind: str | None = None
        members: list[int] = []

        def close() -> None:
            nonlocal kind, members
            if kind and members:
                prefer = {"NOUN", "PROPN", "NUM", "PRON"} if kind == "NP" else {"VERB", "AUX"}
                head = members[-1]
                for i in reversed(members):
                    if sentence_tokens[i]["pos"] in prefer:
                        head = i
                        break
                start = sentence_tokens[members[0]]["span"]["start"]
                end = sentence_tokens[members[-1]]["span"]["end"]
                chunks.append({"kind": kind,
                               "span": {"start": start, "end": end, "text": body[start:end]},
                               "head_token": base + head})
            kind, members = None, []

        for i, tok in enumerate(sentence_tokens):
            pos = tok["pos"]
            if pos in _VP_POS:
                if kind != "VP":
                    close()
                    kind = "VP"
                members.append(i)
            elif pos in _NP_POS:
                if kind != "NP":
                    close()
                    kind = "NP"
                members.append(i)
            elif pos == "ADV" and kind == "VP":
                members.append(i)
            else:
                close()
        close()
        return chunks

    def _entity_runs(self, sentence_tokens: list[dict]) -> list[tuple[int, int, str]]:
        runs: list[tuple[int, int, str]] = []
        n = len(sentence_tokens)
        i = 0
        while i < n:
            if not self._startable(sentence_tokens, i):
                i += 1
                continue
            run = [i]
            j = i + 1
            while j < n:
                surface = sentence_tokens[j]["span"]["text"]
                low = surface.casefold()
                if surface[:1].isupper() and sentence_tokens[j]["pos"] != "PUNCT":
                    run.append(j)
                    j += 1
                elif low in _CONNECTORS and j + 1 < n and \
                        sentence_tokens[j + 1]["span"]["text"][:1].isupper():
                    run.append(j)
                    j += 1
                else:
                    break
            start = sentence_tokens[run[0]]["span"]["start"]
            end = sentence_tokens[run[-1]]["span"]["end"]
            label = self._classify(sentence_tokens, run)
            if label:
                runs.append((start, end, label))
            i = j
        return runs

    def _startable(self, sentence_tokens: list[dict], i: int) -> bool:
        surface = sentence_tokens[i]["span"]["text"]
        if not surface[:1].isupper() or sentence_tokens[i]["pos"] == "PUNCT":
            return False
        low = surface.casefold()
        if i > 0:
            return low not in _CONNECTORS or (
                i + 1 < len(sentence_tokens)
                and sentence_tokens[i + 1]["span"]["text"][:1].isupper())
        if low in _FIRST_NAMES or low in _ORG_CUES or low in _PLACES:
            return True
        return i + 1 < len(sentence_tokens) and sentence_tokens[i + 1]["span"]["text"][:1].isupper()

    def _classify(self, sentence_tokens: list[dict], run: list[int]) -> str | None:
        toks = [sentence_tokens[i] for i in run]
        lows = [t["span"]["text"].casefold() for t in toks]
        content = [low for low in lows if low not in _CONNECTORS]
        if not content:
            return None
        if any(low in _ORG_CUES for low in lows):
            return "ORG"
        if any(len(t["span"]["text"]) >= 2 and t["span"]["text"].isupper() for t in toks):
            return "ORG"
        first = run[0]
        window = sentence_tokens[max(0, first - 2):first]
        if lows[0] in _FIRST_NAMES or any(
                w["span"]["text"].casefold() in _PER_TITLES for w in window):
            return "PER"
        if " ".join(content) in _PLACES or any(low in _PLACES for low in content):
            return "LOC"
        if len(content) >= 2:
            return "PER"
        return "MISC"
