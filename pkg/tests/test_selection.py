from __future__ import annotations

import pytest

from fivew1h.document import Span
from fivew1h.extract import Candidate
from fivew1h.score import DEFAULT_WEIGHTS, ScoredCandidate
from fivew1h.selection import Thresholds, answer_set_to_json, explain, select


def scored_who(text: str, total: float, sentence_index: int = 0, start: int = 0,
               factors: dict | None = None) -> ScoredCandidate:
    weights = DEFAULT_WEIGHTS["who"]
    if factors is None:
        # spread the total across factors proportionally to the weights
        factors = {name: total for name in weights}
    cand = Candidate(question="who", span=Span(start, start + len(text), text), text=text,
                     sentence_index=sentence_index, provenance={"NER"})
    return ScoredCandidate(candidate=cand, factor_scores=factors,
                           total=sum(weights[n] * factors[n] for n in weights))


def test_select_zero_threshold_returns_all():
    scored = {"who": [scored_who("a", 0.2), scored_who("b", 0.9, start=50)]}
    chosen = select(scored, Thresholds(by_question={"who": 0.0}))
    assert len(chosen.for_question("who")) == 2


def test_select_unreachable_threshold_returns_none():
    scored = {"who": [scored_who("a", 0.99)]}
    chosen = select(scored, Thresholds(by_question={q: 1.0 for q in ("who",)}))
    # total is strictly below 1.0 here, so nothing survives
    assert chosen.for_question("who") == ()


def test_select_filters_by_threshold():
    scored = {"who": [scored_who("forte", 0.95), scored_who("faible", 0.55, start=50)]}
    chosen = select(scored, Thresholds(by_question={"who": 0.6}))
    assert chosen.texts("who") == ["forte"]


def test_select_orders_by_score_then_position():
    same_low = scored_who("tard", 0.7, sentence_index=3, start=300)
    same_early = scored_who("tôt", 0.7, sentence_index=1, start=100)
    best = scored_who("mieux", 0.9, sentence_index=5, start=500)
    chosen = select({"who": [same_low, same_early, best]}, Thresholds(by_question={"who": 0.0}))
    assert chosen.texts("who") == ["mieux", "tôt", "tard"]


def test_select_tie_breaks_on_offset_within_sentence():
    a = scored_who("second", 0.7, sentence_index=0, start=40)
    b = scored_who("premier", 0.7, sentence_index=0, start=10)
    chosen = select({"who": [a, b]}, Thresholds(by_question={"who": 0.0}))
    assert chosen.texts("who") == ["premier", "second"]


def test_select_is_pure_and_repeatable():
    scored = {"who": [scored_who("a", 0.8), scored_who("b", 0.6, start=50)]}
    thresholds = Thresholds(by_question={"who": 0.5})
    first = answer_set_to_json("x", select(scored, thresholds))
    second = answer_set_to_json("x", select(scored, thresholds))
    assert first == second


def test_thresholds_validate_range():
    with pytest.raises(ValueError):
        Thresholds(by_question={"who": -0.1})
    with pytest.raises(ValueError):
        Thresholds(by_question={"quoi": 0.5})
    Thresholds(by_question={"who": 1.01})  # explicit "select nothing" is allowed


def test_explain_contributions_sum_to_total():
    factors = dict(frequency=1.0, position=1.0, title_presence=1.0, per_type=1.0, qa_similarity=0.0)
    sc = scored_who("Justin Trudeau", 0.95, factors=factors)
    answer = select({"who": [sc]}, Thresholds(by_question={"who": 0.0})).for_question("who")[0]
    text = explain(answer)
    lines = text.splitlines()
    assert len([line for line in lines if "weight=" in line]) == 5
    assert "0.9500" in lines[-1]
    assert "qa_similarity" in text  # zero-score factor still listed
    contributions = [fc.contribution for fc in answer.factors.values()]
    assert abs(sum(contributions) - answer.total) <= 1e-9


def test_threshold_monotonicity_on_counts():
    scored = {"who": [scored_who(f"c{i}", i / 10, start=i * 20) for i in range(11)]}
    previous = None
    for step in range(11):
        tau = step / 10
        count = len(select(scored, Thresholds(by_question={"who": tau})).for_question("who"))
        if previous is not None:
            assert count <= previous
        previous = count
